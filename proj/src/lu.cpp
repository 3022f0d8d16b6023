#include "jdst/lu.hpp"

namespace jdst {

void LuHeads::init(ParameterStore& store, const std::string& prefix, int d, int num_intents,
                   int num_user_acts, int tagger_in, int tagger_hid, int num_tags, Rng& rng) {
  context_dim = d;
  tagger_hidden = tagger_hid;
  w_intent = &store.add_matrix(prefix + ".intent.w", num_intents, d, rng);
  b_intent = &store.add_vector(prefix + ".intent.b", num_intents);
  w_act = &store.add_matrix(prefix + ".acts.w", num_user_acts, d, rng);
  b_act = &store.add_vector(prefix + ".acts.b", num_user_acts);
  tagger_fw.init(store, prefix + ".tagger.fw", tagger_in, tagger_hid, rng);
  tagger_bw.init(store, prefix + ".tagger.bw", tagger_in, tagger_hid, rng);
  w_proj = &store.add_matrix(prefix + ".tagger.proj.w", tagger_hid, d, rng);
  b_proj = &store.add_vector(prefix + ".tagger.proj.b", tagger_hid);
  w_tag = &store.add_matrix(prefix + ".tagger.out.w", num_tags, 2 * tagger_hid, rng);
  b_tag = &store.add_vector(prefix + ".tagger.out.b", num_tags);
}

Var LuHeads::intent_logits(Tape& t, Var d_o) const {
  return t.affine(t.param(*w_intent), d_o, t.param(*b_intent));
}

Var LuHeads::act_logits(Tape& t, Var d_o) const {
  return t.affine(t.param(*w_act), d_o, t.param(*b_act));
}

std::vector<Var> LuHeads::tag_logits(Tape& t, const std::vector<Var>& u_o, Var a_t,
                                     Var prev_d_o) const {
  const int m = static_cast<int>(u_o.size());
  std::vector<Var> s_in(m);
  for (int i = 0; i < m; ++i) s_in[i] = t.concat({u_o[i], a_t});

  Var h0 = t.affine(t.param(*w_proj), prev_d_o, t.param(*b_proj));
  std::vector<Var> fw_out(m), bw_out(m);
  Var h = h0;
  Var c = t.input_zeros(tagger_hidden);
  for (int i = 0; i < m; ++i) {
    auto [nh, nc] = tagger_fw.step(t, s_in[i], h, c);
    h = nh;
    c = nc;
    fw_out[i] = nh;
  }
  h = h0;
  c = t.input_zeros(tagger_hidden);
  for (int i = m - 1; i >= 0; --i) {
    auto [nh, nc] = tagger_bw.step(t, s_in[i], h, c);
    h = nh;
    c = nc;
    bw_out[i] = nh;
  }

  std::vector<Var> logits(m);
  for (int i = 0; i < m; ++i) {
    Var s_o = t.concat({bw_out[i], fw_out[i]});
    logits[i] = t.affine(t.param(*w_tag), s_o, t.param(*b_tag));
  }
  return logits;
}

int argmax(const std::vector<Real>& v) {
  int best = 0;
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = static_cast<int>(i);
  return best;
}

int argmax(const Tensor& v) { return argmax(v.data); }

std::vector<int> acts_above_threshold(const Tensor& probs, Real threshold) {
  std::vector<int> out;
  for (size_t i = 0; i < probs.data.size(); ++i)
    if (probs.data[i] > threshold) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace jdst
