#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jdst/encoders.hpp"
#include "jdst/tape.hpp"

namespace jdst {

// Fixed-capacity candidate list for one slot, padded with dummy entries for
// batching. valid marks real candidates (m_v); in_utt marks candidates whose
// tokens occur contiguously in the current user utterance (m_u).
struct CandidateSet {
  std::vector<std::string> values;
  std::vector<uint8_t> valid;
  std::vector<uint8_t> in_utt;

  explicit CandidateSet(int capacity = 0)
      : values(capacity), valid(capacity, 0), in_utt(capacity, 0) {}

  int capacity() const { return static_cast<int>(values.size()); }
  int find(const std::string& v) const;
  int valid_count() const;
};

// Previous-turn scores for one slot, keyed by candidate string. Entries
// absent from the map score 0. A slot first mentioned this turn starts from
// the "not specified yet" prior: p_null = 1, everything else 0.
struct PrevSlotScores {
  Real p_dontcare = 0.0;
  Real p_null = 1.0;
  std::map<std::string, Real> p_cand;

  Real cand_score(const std::string& v) const {
    auto it = p_cand.find(v);
    return it == p_cand.end() ? 0.0 : it->second;
  }
};

// True when value's tokens appear as a contiguous run of utterance tokens
// (SOS/EOS excluded); both sides are already lowercased.
bool value_in_utterance(const std::string& value, const std::vector<std::string>& tokens);

// One turn's candidate-set update: new values are appended in mention order
// (system acts first, then tagged user values); when the set is full, the
// valid candidate with the lowest previous-turn score that was not mentioned
// this turn is evicted. If every candidate was mentioned this turn the
// incoming value is dropped. m_u is recomputed against the current
// utterance.
CandidateSet update_candidate_set(const CandidateSet& prev,
                                  const std::vector<std::string>& system_values,
                                  const std::vector<std::string>& user_values,
                                  const PrevSlotScores& prev_scores,
                                  const std::vector<std::string>& utterance_tokens,
                                  int capacity);

// Value-set layout for scoring and readout: index 0 = dontcare, 1 = null,
// 2+i = candidate at position i.
inline constexpr int kDontcareIndex = 0;
inline constexpr int kNullIndex = 1;

// Candidate scorer: two one-hidden-layer feed-forward networks (hidden width
// = half the input width, output width 1) score dontcare and each candidate;
// the null logit is a trainable scalar. Padded positions are masked to a
// large negative logit before the softmax.
struct CandidateScorer {
  Parameter *ff1_w1 = nullptr, *ff1_b1 = nullptr, *ff1_w2 = nullptr, *ff1_b2 = nullptr;
  Parameter *ff2_w1 = nullptr, *ff2_b1 = nullptr, *ff2_w2 = nullptr, *ff2_b2 = nullptr;
  Parameter* phi_logit = nullptr;
  int context_dim = 0, act_vocab = 0;

  void init(ParameterStore& store, const std::string& prefix, int d, int num_act_types,
            Rng& rng);

  struct Scored {
    Var logits;  // [2 + K], padding masked
    Var dist;    // softmax over the same layout
  };
  // a_cand_per_pos holds the per-position (slot, candidate) act vector, or a
  // zero vector where the system did not mention that candidate this turn.
  Scored score(Tape& t, Var d_o, const Tensor& a_utt, const Tensor& a_slot,
               const std::vector<Tensor>& a_cand_per_pos, const CandidateSet& set,
               const PrevSlotScores& prev) const;
};

// Argmax over the value-set layout with ties broken toward null, then
// dontcare, then the lowest candidate position.
int argmax_value_index(const std::vector<Real>& probs);

// Gold training label in the value-set layout: the gold value's position if
// present, dontcare for "dontcare", null otherwise. A specified gold value
// missing from the candidate list maps to null and flags unreachable.
int gold_value_index(const std::map<std::string, std::string>& gold_state,
                     const std::string& slot, const CandidateSet& set, bool* unreachable);

// One-hot previous scores built from the gold state of turn t-1 (teacher
// forcing / scheduled sampling's ground-truth branch).
PrevSlotScores gold_prev_scores(const std::map<std::string, std::string>& prev_gold_state,
                                const std::string& slot, const CandidateSet& prev_set);

}  // namespace jdst
