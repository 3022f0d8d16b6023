#include "jdst/dst.hpp"

#include <algorithm>

namespace jdst {

int CandidateSet::find(const std::string& v) const {
  for (int i = 0; i < capacity(); ++i)
    if (valid[i] && values[i] == v) return i;
  return -1;
}

int CandidateSet::valid_count() const {
  int n = 0;
  for (uint8_t f : valid) n += f;
  return n;
}

bool value_in_utterance(const std::string& value, const std::vector<std::string>& tokens) {
  std::vector<std::string> vt = split_ws(value);
  if (vt.empty() || tokens.size() < 2) return false;
  const int last = static_cast<int>(tokens.size()) - 1;
  for (int start = 1; start + static_cast<int>(vt.size()) <= last; ++start) {
    bool ok = true;
    for (size_t k = 0; k < vt.size(); ++k)
      if (tokens[start + static_cast<int>(k)] != vt[k]) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

CandidateSet update_candidate_set(const CandidateSet& prev,
                                  const std::vector<std::string>& system_values,
                                  const std::vector<std::string>& user_values,
                                  const PrevSlotScores& prev_scores,
                                  const std::vector<std::string>& utterance_tokens,
                                  int capacity) {
  CandidateSet out(capacity);
  int n = 0;
  for (int i = 0; i < prev.capacity() && n < capacity; ++i)
    if (prev.valid[i]) {
      out.values[n] = prev.values[i];
      out.valid[n] = 1;
      ++n;
    }

  std::vector<std::string> mentioned;
  for (const std::string& v : system_values)
    if (!v.empty() && std::find(mentioned.begin(), mentioned.end(), v) == mentioned.end())
      mentioned.push_back(v);
  for (const std::string& v : user_values)
    if (!v.empty() && std::find(mentioned.begin(), mentioned.end(), v) == mentioned.end())
      mentioned.push_back(v);

  auto is_mentioned = [&](const std::string& v) {
    return std::find(mentioned.begin(), mentioned.end(), v) != mentioned.end();
  };

  for (const std::string& v : mentioned) {
    if (out.find(v) >= 0) continue;
    if (n < capacity) {
      out.values[n] = v;
      out.valid[n] = 1;
      ++n;
      continue;
    }
    // full: evict the lowest-scoring candidate not mentioned this turn
    int victim = -1;
    Real victim_score = 0;
    for (int i = 0; i < capacity; ++i) {
      if (!out.valid[i] || is_mentioned(out.values[i])) continue;
      Real s = prev_scores.cand_score(out.values[i]);
      if (victim < 0 || s < victim_score) {
        victim = i;
        victim_score = s;
      }
    }
    if (victim < 0) continue;  // everything is protected; drop the newcomer
    out.values[victim] = v;
  }

  for (int i = 0; i < capacity; ++i)
    out.in_utt[i] = out.valid[i] && value_in_utterance(out.values[i], utterance_tokens) ? 1 : 0;
  return out;
}

void CandidateScorer::init(ParameterStore& store, const std::string& prefix, int d,
                           int num_act_types, Rng& rng) {
  context_dim = d;
  act_vocab = num_act_types;
  const int r1 = d + num_act_types + num_act_types + 2;  // r_utt (+) r_slot
  const int r2 = r1 + num_act_types + 3;                 // (+) r_cand
  const int h1 = std::max(1, r1 / 2);
  const int h2 = std::max(1, r2 / 2);
  ff1_w1 = &store.add_matrix(prefix + ".ff1.w1", h1, r1, rng);
  ff1_b1 = &store.add_vector(prefix + ".ff1.b1", h1);
  ff1_w2 = &store.add_matrix(prefix + ".ff1.w2", 1, h1, rng);
  ff1_b2 = &store.add_vector(prefix + ".ff1.b2", 1);
  ff2_w1 = &store.add_matrix(prefix + ".ff2.w1", h2, r2, rng);
  ff2_b1 = &store.add_vector(prefix + ".ff2.b1", h2);
  ff2_w2 = &store.add_matrix(prefix + ".ff2.w2", 1, h2, rng);
  ff2_b2 = &store.add_vector(prefix + ".ff2.b2", 1);
  phi_logit = &store.add_scalar(prefix + ".phi", 0.0);
}

CandidateScorer::Scored CandidateScorer::score(Tape& t, Var d_o, const Tensor& a_utt,
                                               const Tensor& a_slot,
                                               const std::vector<Tensor>& a_cand_per_pos,
                                               const CandidateSet& set,
                                               const PrevSlotScores& prev) const {
  const int k = set.capacity();
  Var r_utt = t.concat({d_o, t.input(a_utt)});
  Tensor slot_feats = Tensor::zeros({act_vocab + 2});
  std::copy(a_slot.data.begin(), a_slot.data.end(), slot_feats.data.begin());
  slot_feats.data[act_vocab] = prev.p_dontcare;
  slot_feats.data[act_vocab + 1] = prev.p_null;
  Var r1 = t.concat({r_utt, t.input(std::move(slot_feats))});

  Var l_dontcare =
      t.affine(t.param(*ff1_w2), t.relu(t.affine(t.param(*ff1_w1), r1, t.param(*ff1_b1))),
               t.param(*ff1_b2));

  std::vector<Var> logits;
  logits.reserve(2 + k);
  logits.push_back(l_dontcare);
  logits.push_back(t.param(*phi_logit));
  for (int i = 0; i < k; ++i) {
    Tensor cand_feats = Tensor::zeros({act_vocab + 3});
    std::copy(a_cand_per_pos[i].data.begin(), a_cand_per_pos[i].data.end(),
              cand_feats.data.begin());
    cand_feats.data[act_vocab] = set.valid[i] ? prev.cand_score(set.values[i]) : 0.0;
    cand_feats.data[act_vocab + 1] = set.valid[i] ? 1.0 : 0.0;
    cand_feats.data[act_vocab + 2] = set.in_utt[i] ? 1.0 : 0.0;
    Var r2 = t.concat({r1, t.input(std::move(cand_feats))});
    logits.push_back(
        t.affine(t.param(*ff2_w2), t.relu(t.affine(t.param(*ff2_w1), r2, t.param(*ff2_b1))),
                 t.param(*ff2_b2)));
  }

  Tensor keep = Tensor::zeros({2 + k});
  keep.data[kDontcareIndex] = 1.0;
  keep.data[kNullIndex] = 1.0;
  for (int i = 0; i < k; ++i) keep.data[2 + i] = set.valid[i] ? 1.0 : 0.0;

  Scored out;
  out.logits = t.mask_fill(t.concat(logits), std::move(keep), -1e9);
  out.dist = t.softmax(out.logits);
  return out;
}

int argmax_value_index(const std::vector<Real>& probs) {
  int best = kNullIndex;
  if (probs[kDontcareIndex] > probs[best]) best = kDontcareIndex;
  for (size_t i = 2; i < probs.size(); ++i)
    if (probs[i] > probs[best]) best = static_cast<int>(i);
  return best;
}

int gold_value_index(const std::map<std::string, std::string>& gold_state,
                     const std::string& slot, const CandidateSet& set, bool* unreachable) {
  if (unreachable) *unreachable = false;
  auto it = gold_state.find(slot);
  if (it == gold_state.end()) return kNullIndex;
  if (it->second == kDontcare) return kDontcareIndex;
  int pos = set.find(it->second);
  if (pos >= 0) return 2 + pos;
  if (unreachable) *unreachable = true;
  return kNullIndex;
}

PrevSlotScores gold_prev_scores(const std::map<std::string, std::string>& prev_gold_state,
                                const std::string& slot, const CandidateSet& prev_set) {
  PrevSlotScores out;
  out.p_null = 0.0;
  bool unreachable = false;
  int idx = gold_value_index(prev_gold_state, slot, prev_set, &unreachable);
  if (idx == kDontcareIndex) {
    out.p_dontcare = 1.0;
  } else if (idx == kNullIndex) {
    out.p_null = 1.0;
  } else {
    out.p_cand[prev_set.values[idx - 2]] = 1.0;
  }
  return out;
}

}  // namespace jdst
