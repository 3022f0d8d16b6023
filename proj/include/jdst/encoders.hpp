#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "jdst/data.hpp"
#include "jdst/tape.hpp"
#include "jdst/vocab.hpp"

namespace jdst {

// Standard GRU (update/reset gates, tanh candidate).
struct GruCell {
  Parameter *wz = nullptr, *uz = nullptr, *bz = nullptr;
  Parameter *wr = nullptr, *ur = nullptr, *br = nullptr;
  Parameter *wh = nullptr, *uh = nullptr, *bh = nullptr;
  int input_dim = 0, hidden_dim = 0;

  void init(ParameterStore& store, const std::string& prefix, int in_dim, int hid, Rng& rng);
  Var step(Tape& t, Var x, Var h_prev) const;
};

// Standard LSTM (no peepholes).
struct LstmCell {
  Parameter *wi = nullptr, *ui = nullptr, *bi = nullptr;
  Parameter *wf = nullptr, *uf = nullptr, *bf = nullptr;
  Parameter *wo = nullptr, *uo = nullptr, *bo = nullptr;
  Parameter *wg = nullptr, *ug = nullptr, *bg = nullptr;
  int input_dim = 0, hidden_dim = 0;

  void init(ParameterStore& store, const std::string& prefix, int in_dim, int hid, Rng& rng);
  // returns (h, c)
  std::pair<Var, Var> step(Tape& t, Var x, Var h_prev, Var c_prev) const;
};

// Binary featurization of one turn's system acts. Acts without parameters
// set bits in utt; acts with only a slot set bits in slot[s]; acts with slot
// and value set bits in cand[(s, c)]. All vectors range over the full system
// act-type vocabulary.
struct ActFeatures {
  Tensor utt;
  std::map<std::string, Tensor> slot;
  std::map<std::pair<std::string, std::string>, Tensor> cand;
  std::vector<std::pair<std::string, std::string>> values;  // (slot, value) in act order
  std::set<std::string> slots_mentioned;
};

// Errors on act types outside the vocabulary or values without a slot.
ActFeatures featurize_system_acts(const std::vector<SystemAct>& acts, const Vocab& vocab);

// Combined system act representation: per-slot features are concatenated
// with a trainable slot embedding, passed through a ReLU layer, averaged
// over the slots in scope, joined with the parameterless-act vector and
// passed through a second ReLU layer. An empty scope contributes a zero
// vector in place of the average.
struct SystemActEncoder {
  Parameter* slot_emb = nullptr;  // [|S|, emb]
  Parameter *w_sc = nullptr, *b_sc = nullptr;
  Parameter *w_usc = nullptr, *b_usc = nullptr;
  int act_vocab = 0, emb_dim = 0, hidden_dim = 0, out_dim = 0;

  void init(ParameterStore& store, const std::string& prefix, int num_slots, int num_act_types,
            int emb, int hidden, int out, Rng& rng);
  // scope_slots: sorted slot ids making up S^t at encoding time
  Var encode(Tape& t, const ActFeatures& feats, const std::vector<int>& scope_slots,
             const Vocab& vocab) const;
};

// Single-layer bidirectional GRU over SOS/EOS-delimited token embeddings,
// initial states zero. u_e is the concatenation of the two final states;
// u_o[m] concatenates the forward and backward outputs at token m.
struct UtteranceEncoder {
  Parameter* embeddings = nullptr;  // [V, emb]
  GruCell fw, bw;
  int emb_dim = 0, hidden_dim = 0;

  void init(ParameterStore& store, const std::string& prefix, int vocab_size, int emb, int hid,
            Rng& rng);

  struct Output {
    Var u_e;                // [2 * hidden]
    std::vector<Var> u_o;   // per token, [2 * hidden]
  };
  Output encode(Tape& t, const std::vector<int>& token_ids) const;
};

// Unidirectional GRU over turns; one step per dialogue turn on a_t (+) u_e.
// For a GRU the context vector d_o and the hidden state d_st coincide.
struct StateEncoder {
  GruCell cell;

  void init(ParameterStore& store, const std::string& prefix, int in_dim, int hid, Rng& rng);
  Var advance(Tape& t, Var a_t, Var u_e, Var prev_state) const;
  int hidden_dim() const { return cell.hidden_dim; }
};

}  // namespace jdst
