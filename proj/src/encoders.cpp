#include "jdst/encoders.hpp"

#include <stdexcept>

namespace jdst {

void GruCell::init(ParameterStore& store, const std::string& prefix, int in_dim, int hid,
                   Rng& rng) {
  input_dim = in_dim;
  hidden_dim = hid;
  wz = &store.add_matrix(prefix + ".wz", hid, in_dim, rng);
  uz = &store.add_matrix(prefix + ".uz", hid, hid, rng);
  bz = &store.add_vector(prefix + ".bz", hid);
  wr = &store.add_matrix(prefix + ".wr", hid, in_dim, rng);
  ur = &store.add_matrix(prefix + ".ur", hid, hid, rng);
  br = &store.add_vector(prefix + ".br", hid);
  wh = &store.add_matrix(prefix + ".wh", hid, in_dim, rng);
  uh = &store.add_matrix(prefix + ".uh", hid, hid, rng);
  bh = &store.add_vector(prefix + ".bh", hid);
}

Var GruCell::step(Tape& t, Var x, Var h_prev) const {
  Var z = t.sigmoid(t.affine2(t.param(*wz), x, t.param(*uz), h_prev, t.param(*bz)));
  Var r = t.sigmoid(t.affine2(t.param(*wr), x, t.param(*ur), h_prev, t.param(*br)));
  Var rh = t.mul(r, h_prev);
  Var cand = t.tanh_(t.affine2(t.param(*wh), x, t.param(*uh), rh, t.param(*bh)));
  return t.gru_blend(z, h_prev, cand);
}

void LstmCell::init(ParameterStore& store, const std::string& prefix, int in_dim, int hid,
                    Rng& rng) {
  input_dim = in_dim;
  hidden_dim = hid;
  auto gate = [&](const char* g, Parameter*& w, Parameter*& u, Parameter*& b) {
    w = &store.add_matrix(prefix + ".w" + g, hid, in_dim, rng);
    u = &store.add_matrix(prefix + ".u" + g, hid, hid, rng);
    b = &store.add_vector(prefix + ".b" + g, hid);
  };
  gate("i", wi, ui, bi);
  gate("f", wf, uf, bf);
  gate("o", wo, uo, bo);
  gate("g", wg, ug, bg);
}

std::pair<Var, Var> LstmCell::step(Tape& t, Var x, Var h_prev, Var c_prev) const {
  Var i = t.sigmoid(t.affine2(t.param(*wi), x, t.param(*ui), h_prev, t.param(*bi)));
  Var f = t.sigmoid(t.affine2(t.param(*wf), x, t.param(*uf), h_prev, t.param(*bf)));
  Var o = t.sigmoid(t.affine2(t.param(*wo), x, t.param(*uo), h_prev, t.param(*bo)));
  Var g = t.tanh_(t.affine2(t.param(*wg), x, t.param(*ug), h_prev, t.param(*bg)));
  Var c = t.add(t.mul(f, c_prev), t.mul(i, g));
  Var h = t.mul(o, t.tanh_(c));
  return {h, c};
}

ActFeatures featurize_system_acts(const std::vector<SystemAct>& acts, const Vocab& vocab) {
  const int a = static_cast<int>(vocab.system_acts.size());
  ActFeatures out;
  out.utt = Tensor::zeros({a});
  for (const SystemAct& act : acts) {
    int id = vocab.system_act_id(act.type);
    if (id < 0)
      throw std::invalid_argument("encode_system_acts: unknown act type '" + act.type + "'");
    if (!act.value.empty() && act.slot.empty())
      throw std::invalid_argument("encode_system_acts: act '" + act.type +
                                  "' has a value without a slot");
    if (act.slot.empty()) {
      out.utt.data[id] = 1.0;
    } else if (act.value.empty()) {
      auto it = out.slot.find(act.slot);
      if (it == out.slot.end()) it = out.slot.emplace(act.slot, Tensor::zeros({a})).first;
      it->second.data[id] = 1.0;
      out.slots_mentioned.insert(act.slot);
    } else {
      auto key = std::make_pair(act.slot, act.value);
      auto it = out.cand.find(key);
      if (it == out.cand.end()) it = out.cand.emplace(key, Tensor::zeros({a})).first;
      it->second.data[id] = 1.0;
      out.slots_mentioned.insert(act.slot);
      bool seen = false;
      for (auto& v : out.values) seen = seen || (v == key);
      if (!seen) out.values.push_back(key);
    }
  }
  return out;
}

void SystemActEncoder::init(ParameterStore& store, const std::string& prefix, int num_slots,
                            int num_act_types, int emb, int hidden, int out, Rng& rng) {
  act_vocab = num_act_types;
  emb_dim = emb;
  hidden_dim = hidden;
  out_dim = out;
  slot_emb = &store.add_matrix(prefix + ".slot_emb", num_slots, emb, rng);
  w_sc = &store.add_matrix(prefix + ".w_sc", hidden, 2 * num_act_types + emb, rng);
  b_sc = &store.add_vector(prefix + ".b_sc", hidden);
  w_usc = &store.add_matrix(prefix + ".w_usc", out, hidden + num_act_types, rng);
  b_usc = &store.add_vector(prefix + ".b_usc", out);
}

Var SystemActEncoder::encode(Tape& t, const ActFeatures& feats,
                             const std::vector<int>& scope_slots, const Vocab& vocab) const {
  std::vector<Var> per_slot;
  per_slot.reserve(scope_slots.size());
  for (int sid : scope_slots) {
    const std::string& slot = vocab.slots[sid];
    auto sit = feats.slot.find(slot);
    Var a_slot = sit != feats.slot.end() ? t.input(sit->second) : t.input_zeros(act_vocab);
    Tensor cand_sum = Tensor::zeros({act_vocab});
    for (const auto& [key, vec] : feats.cand)
      if (key.first == slot)
        for (int k = 0; k < act_vocab; ++k) cand_sum.data[k] += vec.data[k];
    Var a_sc = t.concat({a_slot, t.row(t.param(*slot_emb), sid), t.input(std::move(cand_sum))});
    per_slot.push_back(t.relu(t.affine(t.param(*w_sc), a_sc, t.param(*b_sc))));
  }
  Var pooled = per_slot.empty() ? t.input_zeros(hidden_dim) : t.mean_n(per_slot);
  Var a_usc = t.concat({pooled, t.input(feats.utt)});
  return t.relu(t.affine(t.param(*w_usc), a_usc, t.param(*b_usc)));
}

void UtteranceEncoder::init(ParameterStore& store, const std::string& prefix, int vocab_size,
                            int emb, int hid, Rng& rng) {
  emb_dim = emb;
  hidden_dim = hid;
  embeddings = &store.add_matrix(prefix + ".emb", vocab_size, emb, rng);
  fw.init(store, prefix + ".fw", emb, hid, rng);
  bw.init(store, prefix + ".bw", emb, hid, rng);
}

UtteranceEncoder::Output UtteranceEncoder::encode(Tape& t,
                                                  const std::vector<int>& token_ids) const {
  if (token_ids.size() < 2)
    throw std::invalid_argument("encode_utterance: need at least SOS and EOS tokens");
  const int m = static_cast<int>(token_ids.size());
  Var table = t.param(*embeddings);
  std::vector<Var> x(m);
  for (int i = 0; i < m; ++i) x[i] = t.row(table, token_ids[i]);

  std::vector<Var> fw_out(m), bw_out(m);
  Var h = t.input_zeros(hidden_dim);
  for (int i = 0; i < m; ++i) {
    h = fw.step(t, x[i], h);
    fw_out[i] = h;
  }
  h = t.input_zeros(hidden_dim);
  for (int i = m - 1; i >= 0; --i) {
    h = bw.step(t, x[i], h);
    bw_out[i] = h;
  }

  Output out;
  out.u_e = t.concat({fw_out[m - 1], bw_out[0]});
  out.u_o.resize(m);
  for (int i = 0; i < m; ++i) out.u_o[i] = t.concat({fw_out[i], bw_out[i]});
  return out;
}

void StateEncoder::init(ParameterStore& store, const std::string& prefix, int in_dim, int hid,
                        Rng& rng) {
  cell.init(store, prefix, in_dim, hid, rng);
}

Var StateEncoder::advance(Tape& t, Var a_t, Var u_e, Var prev_state) const {
  return cell.step(t, t.concat({a_t, u_e}), prev_state);
}

}  // namespace jdst
