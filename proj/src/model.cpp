#include "jdst/model.hpp"

#include <json.hpp>

#include <sstream>
#include <stdexcept>

#include "jdst/checkpoint.hpp"

namespace jdst {

using nlohmann::json;

std::string ModelConfig::to_json() const {
  json j;
  j["embed_dim"] = embed_dim;
  j["act_dim"] = act_dim;
  j["candidate_capacity"] = candidate_capacity;
  j["act_threshold"] = act_threshold;
  j["separate_encoders"] = separate_encoders;
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  json j = json::parse(text);
  ModelConfig c;
  c.embed_dim = j.at("embed_dim").get<int>();
  c.act_dim = j.at("act_dim").get<int>();
  c.candidate_capacity = j.at("candidate_capacity").get<int>();
  c.act_threshold = j.at("act_threshold").get<Real>();
  c.separate_encoders = j.at("separate_encoders").get<bool>();
  return c;
}

JointModel::JointModel(Vocab vocab, ModelConfig cfg, uint64_t seed)
    : vocab_(std::move(vocab)), cfg_(cfg), tagset_(vocab_.slots) {
  Rng rng(seed);
  const int v = static_cast<int>(vocab_.tokens.size());
  const int a = static_cast<int>(vocab_.system_acts.size());
  const int d = cfg_.state_hidden();
  const int u_hid = cfg_.utterance_hidden();
  const int state_in = cfg_.act_out() + 2 * u_hid;

  act_enc_.init(store_, "act", static_cast<int>(vocab_.slots.size()), a, cfg_.embed_dim,
                cfg_.act_out(), cfg_.act_out(), rng);
  const std::string utt_prefix = separate() ? "lu.utt" : "enc.utt";
  const std::string state_prefix = separate() ? "lu.state" : "enc.state";
  utt_lu_.init(store_, utt_prefix, v, cfg_.embed_dim, u_hid, rng);
  state_lu_.init(store_, state_prefix, state_in, d, rng);
  if (separate()) {
    utt_dst_.init(store_, "dst.utt", v, cfg_.embed_dim, u_hid, rng);
    state_dst_.init(store_, "dst.state", state_in, d, rng);
  }
  lu_.init(store_, "lu", d, static_cast<int>(vocab_.intents.size()),
           static_cast<int>(vocab_.user_acts.size()), 2 * u_hid + cfg_.act_out(),
           cfg_.tagger_hidden(), tagset_.size(), rng);
  lu_.act_threshold = cfg_.act_threshold;
  scorer_.init(store_, "dst.scorer", d, a, rng);
}

std::string JointModel::meta_json() const {
  json j;
  j["format"] = "jdst-checkpoint";
  j["model"] = json::parse(cfg_.to_json());
  j["vocab"] = json::parse(vocab_.to_json());
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(vocab_.hash()));
  j["vocab_hash"] = std::string(hex);
  // fixed concatenation orders, pinned for checkpoint compatibility
  j["feature_order"]["value_layout"] = "dontcare,null,candidates";
  j["feature_order"]["r_slot"] = "a_slot,p_dontcare,p_null";
  j["feature_order"]["r_cand"] = "a_cand,p_prev,m_v,m_u";
  j["feature_order"]["tagger_output"] = "backward,forward";
  j["feature_order"]["state_input"] = "a_t,u_e";
  return j.dump();
}

void JointModel::save(const std::string& path) const {
  save_checkpoint(path, store_, meta_json());
}

std::unique_ptr<JointModel> JointModel::load(const std::string& path) {
  std::string meta;
  read_checkpoint(path, &meta);
  json j = json::parse(meta);
  if (!j.contains("format") || j.at("format") != "jdst-checkpoint")
    throw std::runtime_error("checkpoint: unrecognized metadata in " + path);
  ModelConfig cfg = ModelConfig::from_json(j.at("model").dump());
  Vocab vocab = Vocab::from_json(j.at("vocab").dump());
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(vocab.hash()));
  std::string stored = j.at("vocab_hash").get<std::string>();
  if (stored != hex)
    throw std::runtime_error("checkpoint: vocab hash mismatch: stored " + stored +
                             " vs recomputed " + hex);
  auto model = std::make_unique<JointModel>(std::move(vocab), cfg, 0);
  load_checkpoint(path, model->params(), nullptr);
  return model;
}

TurnGold make_turn_gold(const Turn& turn, const Vocab& vocab, const TagSet& tags) {
  TurnGold g;
  g.turn = &turn;
  g.intent = turn.intent.empty() ? -1 : vocab.intent_id(turn.intent);
  g.act_targets = Tensor::zeros({static_cast<int>(vocab.user_acts.size())});
  for (const std::string& a : turn.user_acts) {
    int id = vocab.user_act_id(a);
    if (id >= 0) g.act_targets.data[id] = 1.0;
  }
  g.tags = derive_iob_tags(turn.tokens.size(), turn.spans, tags);
  return g;
}

DialogueRunner::DialogueRunner(const JointModel& model, Tape* train_tape)
    : m_(model), train_tape_(train_tape) {}

void DialogueRunner::reset() {
  has_carry_ = false;
  mentioned_.clear();
  tracks_.clear();
  turn_index_ = 0;
}

TurnResult DialogueRunner::run_turn(const Turn& turn, const RunOptions& opts) {
  if (opts.training && (!train_tape_ || !opts.gold))
    throw std::invalid_argument("run_turn: training mode needs a tape and gold labels");
  Tape local;
  Tape& t = train_tape_ ? *train_tape_ : local;
  const Vocab& vocab = m_.vocab();
  const TagSet& tagset = m_.tags();
  const int k = m_.config().candidate_capacity;
  const int d = m_.config().state_hidden();

  // --- system act encoding; S grows with system-mentioned slots
  ActFeatures feats = featurize_system_acts(turn.system_acts, vocab);
  for (const std::string& s : feats.slots_mentioned) {
    int id = vocab.slot_id(s);
    if (id >= 0) mentioned_.insert(id);
  }
  std::vector<int> scope(mentioned_.begin(), mentioned_.end());
  Var a_t = m_.act_encoder().encode(t, feats, scope, vocab);

  // --- utterance + state encoders
  std::vector<int> ids =
      vocab.token_ids(opts.input_tokens ? *opts.input_tokens : turn.tokens);
  auto lu_out = m_.utt_lu().encode(t, ids);
  UtteranceEncoder::Output dst_out = m_.separate() ? m_.utt_dst().encode(t, ids) : lu_out;

  Var prev_lu = has_carry_ ? (train_tape_ ? v_state_lu_ : t.input(t_state_lu_))
                           : t.input_zeros(d);
  Var prev_do = has_carry_ ? (train_tape_ ? v_prev_do_lu_ : t.input(t_prev_do_lu_))
                           : t.input_zeros(d);
  Var d_o_lu = m_.state_lu().advance(t, a_t, lu_out.u_e, prev_lu);
  Var d_o_dst = d_o_lu;
  if (m_.separate()) {
    Var prev_dst = has_carry_ ? (train_tape_ ? v_state_dst_ : t.input(t_state_dst_))
                              : t.input_zeros(d);
    d_o_dst = m_.state_dst().advance(t, a_t, dst_out.u_e, prev_dst);
  }

  TurnResult res;

  // --- LU heads
  Var intent_logits = m_.lu().intent_logits(t, d_o_lu);
  Var intent_dist = t.softmax(intent_logits);
  res.pred.intent_probs = t.value(intent_dist).data;
  res.pred.intent = vocab.intents.empty()
                        ? ""
                        : vocab.intents[static_cast<size_t>(argmax(res.pred.intent_probs))];

  Var act_logits = m_.lu().act_logits(t, d_o_lu);
  Var act_probs = t.sigmoid(act_logits);
  res.pred.act_probs = t.value(act_probs).data;
  for (int id : acts_above_threshold(t.value(act_probs), m_.lu().act_threshold))
    res.pred.acts.push_back(vocab.user_acts[static_cast<size_t>(id)]);

  std::vector<Var> tag_logits = m_.lu().tag_logits(t, lu_out.u_o, a_t, prev_do);
  res.pred.tags.resize(tag_logits.size());
  res.pred.tag_names.resize(tag_logits.size());
  for (size_t i = 0; i < tag_logits.size(); ++i) {
    res.pred.tags[i] = argmax(t.value(tag_logits[i]));
    res.pred.tag_names[i] = tagset.name(res.pred.tags[i]);
  }
  res.pred.mentions = decode_iob(res.pred.tags, turn.tokens, tagset);

  // --- candidate-set update from the chosen tag source + system act values
  const std::vector<int>& update_tags =
      opts.use_gold_tags && opts.gold ? opts.gold->tags : res.pred.tags;
  std::vector<DecodedMention> update_mentions =
      opts.use_gold_tags && opts.gold ? decode_iob(update_tags, turn.tokens, tagset)
                                      : res.pred.mentions;

  std::map<int, std::vector<std::string>> user_values, system_values;
  for (const DecodedMention& mn : update_mentions) user_values[mn.slot].push_back(mn.value);
  for (const auto& [slot, value] : feats.values) {
    int id = vocab.slot_id(slot);
    if (id >= 0) system_values[id].push_back(value);
  }
  for (const auto& [id, vals] : user_values) mentioned_.insert(id);

  // previous-turn score features, fixed before any set is rewritten
  std::map<int, PrevSlotScores> feature_scores;
  for (int id : mentioned_) {
    auto it = tracks_.find(id);
    const SlotTrack track = it == tracks_.end() ? SlotTrack{CandidateSet(k), {}} : it->second;
    if (opts.use_gold_prev_state) {
      static const std::map<std::string, std::string> kEmpty;
      const auto& prev_gold = opts.prev_gold_state ? *opts.prev_gold_state : kEmpty;
      feature_scores[id] = gold_prev_scores(prev_gold, vocab.slots[id], track.set);
    } else {
      feature_scores[id] = track.prev;
    }
  }

  for (int id : mentioned_) {
    auto it = tracks_.find(id);
    if (it == tracks_.end())
      it = tracks_.emplace(id, SlotTrack{CandidateSet(k), {}}).first;
    static const std::vector<std::string> kNone;
    auto uit = user_values.find(id);
    auto sit = system_values.find(id);
    it->second.set = update_candidate_set(
        it->second.set, sit == system_values.end() ? kNone : sit->second,
        uit == user_values.end() ? kNone : uit->second, feature_scores[id], turn.tokens, k);
  }

  // --- candidate scoring over every slot in S^t
  std::vector<Var> loss_terms;
  for (int id : mentioned_) {
    SlotTrack& track = tracks_[id];
    const std::string& slot = vocab.slots[id];
    auto sit = feats.slot.find(slot);
    Tensor a_slot = sit != feats.slot.end()
                        ? sit->second
                        : Tensor::zeros({static_cast<int>(vocab.system_acts.size())});
    std::vector<Tensor> a_cand(static_cast<size_t>(k),
                               Tensor::zeros({static_cast<int>(vocab.system_acts.size())}));
    for (int i = 0; i < k; ++i)
      if (track.set.valid[i]) {
        auto cit = feats.cand.find({slot, track.set.values[i]});
        if (cit != feats.cand.end()) a_cand[i] = cit->second;
      }
    auto scored = m_.scorer().score(t, d_o_dst, feats.utt, a_slot, a_cand, track.set,
                                    feature_scores[id]);
    const Tensor& dist = t.value(scored.dist);

    ScoredSlot report;
    report.slot = slot;
    report.values = {kDontcare, "null"};
    report.probs = {dist.data[kDontcareIndex], dist.data[kNullIndex]};
    for (int i = 0; i < k; ++i)
      if (track.set.valid[i]) {
        report.values.push_back(track.set.values[i]);
        report.probs.push_back(dist.data[2 + i]);
      }
    res.pred.scored.push_back(std::move(report));

    int best = argmax_value_index(dist.data);
    if (best == kDontcareIndex) res.pred.state[slot] = kDontcare;
    else if (best != kNullIndex) res.pred.state[slot] = track.set.values[best - 2];

    track.prev.p_dontcare = dist.data[kDontcareIndex];
    track.prev.p_null = dist.data[kNullIndex];
    track.prev.p_cand.clear();
    for (int i = 0; i < k; ++i)
      if (track.set.valid[i]) track.prev.p_cand[track.set.values[i]] = dist.data[2 + i];

    if (opts.training) {
      bool unreachable = false;
      int gold_idx = gold_value_index(opts.gold->turn->state, slot, track.set, &unreachable);
      if (unreachable) ++res.unreachable_gold;
      Var term = t.ce_logits(scored.logits, gold_idx);
      res.state_loss += t.scalar(term);
      loss_terms.push_back(term);
    }
  }

  // --- task losses
  if (opts.training) {
    const TurnGold& gold = *opts.gold;
    if (gold.intent >= 0) {
      Var term = t.ce_logits(intent_logits, gold.intent);
      res.intent_loss = t.scalar(term);
      loss_terms.push_back(term);
    }
    if (gold.act_targets.numel() > 0) {
      Var term = t.bce_logits(act_logits, gold.act_targets);
      res.act_loss = t.scalar(term);
      loss_terms.push_back(term);
    }
    for (size_t mpos = 1; mpos + 1 < tag_logits.size(); ++mpos) {
      Var term = t.ce_logits(tag_logits[mpos], gold.tags[mpos]);
      res.tag_loss += t.scalar(term);
      loss_terms.push_back(term);
    }
    res.loss = loss_terms.empty() ? t.input(Tensor::scalar(0.0)) : t.add_n(loss_terms);
  }

  // --- carry to the next turn
  has_carry_ = true;
  if (train_tape_) {
    v_state_lu_ = d_o_lu;
    v_prev_do_lu_ = d_o_lu;
    if (m_.separate()) v_state_dst_ = d_o_dst;
  } else {
    t_state_lu_ = t.value(d_o_lu);
    t_prev_do_lu_ = t.value(d_o_lu);
    if (m_.separate()) t_state_dst_ = t.value(d_o_dst);
  }
  ++turn_index_;
  return res;
}

std::vector<std::vector<TurnPrediction>> run_inference(const JointModel& model,
                                                       const Corpus& corpus) {
  std::vector<std::vector<TurnPrediction>> out;
  out.reserve(corpus.size());
  for (const Dialogue& d : corpus) {
    DialogueRunner runner(model);
    std::vector<TurnPrediction> preds;
    preds.reserve(d.turns.size());
    for (const Turn& turn : d.turns) preds.push_back(runner.run_turn(turn).pred);
    out.push_back(std::move(preds));
  }
  return out;
}

}  // namespace jdst
