#pragma once

#include <string>
#include <vector>

#include "jdst/encoders.hpp"
#include "jdst/iob.hpp"
#include "jdst/tape.hpp"

namespace jdst {

// Language-understanding heads: softmax intent classifier, multilabel
// (sigmoid) dialogue act classifier, and a bi-LSTM slot tagger whose hidden
// states are initialized from the projected previous dialogue context.
struct LuHeads {
  Parameter *w_intent = nullptr, *b_intent = nullptr;
  Parameter *w_act = nullptr, *b_act = nullptr;
  LstmCell tagger_fw, tagger_bw;
  Parameter *w_proj = nullptr, *b_proj = nullptr;  // d_o^{t-1} -> tagger hidden size
  Parameter *w_tag = nullptr, *b_tag = nullptr;
  Real act_threshold = 0.5;  // t_u, tuned on dev
  int context_dim = 0, tagger_hidden = 0;

  void init(ParameterStore& store, const std::string& prefix, int d, int num_intents,
            int num_user_acts, int tagger_in, int tagger_hid, int num_tags, Rng& rng);

  Var intent_logits(Tape& t, Var d_o) const;
  Var act_logits(Tape& t, Var d_o) const;

  // Eqs: inputs u_o[m] (+) a_t; forward and backward LSTMs with hidden state
  // initialized from the projected prev_d_o and zero cell state; per-token
  // logits over the 2|S|+1 IOB labels from (bw (+) fw) outputs.
  std::vector<Var> tag_logits(Tape& t, const std::vector<Var>& u_o, Var a_t,
                              Var prev_d_o) const;
};

int argmax(const std::vector<Real>& v);
int argmax(const Tensor& v);

// Acts with probability strictly greater than the threshold.
std::vector<int> acts_above_threshold(const Tensor& probs, Real threshold);

}  // namespace jdst
