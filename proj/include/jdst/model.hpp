#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jdst/dst.hpp"
#include "jdst/encoders.hpp"
#include "jdst/iob.hpp"
#include "jdst/lu.hpp"
#include "jdst/vocab.hpp"

namespace jdst {

struct ModelConfig {
  int embed_dim = 64;           // u_d; utterance/tagger layers use this size
  int act_dim = 0;              // dim of a^t; 0 means embed_dim
  int candidate_capacity = 7;   // K
  Real act_threshold = 0.5;     // t_u
  bool separate_encoders = false;

  int utterance_hidden() const { return embed_dim; }
  int tagger_hidden() const { return embed_dim; }
  int state_hidden() const { return std::max(1, embed_dim / 2); }  // half of u_d
  int act_out() const { return act_dim > 0 ? act_dim : embed_dim; }

  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
};

// All trainable components of the joint LU + DST model. In the joint setup
// the utterance and state encoders are shared between the LU heads and the
// candidate scorer; the separate baseline duplicates both.
class JointModel {
 public:
  JointModel(Vocab vocab, ModelConfig cfg, uint64_t seed);

  const Vocab& vocab() const { return vocab_; }
  const ModelConfig& config() const { return cfg_; }
  const TagSet& tags() const { return tagset_; }
  ParameterStore& params() { return store_; }
  const ParameterStore& params() const { return store_; }
  bool separate() const { return cfg_.separate_encoders; }

  const SystemActEncoder& act_encoder() const { return act_enc_; }
  const UtteranceEncoder& utt_lu() const { return utt_lu_; }
  const UtteranceEncoder& utt_dst() const { return separate() ? utt_dst_ : utt_lu_; }
  const StateEncoder& state_lu() const { return state_lu_; }
  const StateEncoder& state_dst() const { return separate() ? state_dst_ : state_lu_; }
  const LuHeads& lu() const { return lu_; }
  const CandidateScorer& scorer() const { return scorer_; }

  // Checkpoint round trip. Metadata records the config, the vocabulary and
  // its hash, and the fixed feature orderings.
  std::string meta_json() const;
  void save(const std::string& path) const;
  static std::unique_ptr<JointModel> load(const std::string& path);

 private:
  Vocab vocab_;
  ModelConfig cfg_;
  TagSet tagset_;
  ParameterStore store_;
  SystemActEncoder act_enc_;
  UtteranceEncoder utt_lu_, utt_dst_;
  StateEncoder state_lu_, state_dst_;
  LuHeads lu_;
  CandidateScorer scorer_;
};

// Gold labels of one turn in model index space.
struct TurnGold {
  int intent = -1;  // -1 = unlabeled
  Tensor act_targets;
  std::vector<int> tags;
  const Turn* turn = nullptr;
};

TurnGold make_turn_gold(const Turn& turn, const Vocab& vocab, const TagSet& tags);

struct ScoredSlot {
  std::string slot;
  // layout: dontcare, null, then valid candidates in set order
  std::vector<std::string> values;
  std::vector<Real> probs;
};

struct TurnPrediction {
  std::string intent;
  std::vector<Real> intent_probs;
  std::vector<std::string> acts;
  std::vector<Real> act_probs;
  std::vector<int> tags;
  std::vector<std::string> tag_names;
  std::vector<DecodedMention> mentions;
  std::map<std::string, std::string> state;  // argmax readout, null slots omitted
  std::vector<ScoredSlot> scored;
};

struct TurnResult {
  TurnPrediction pred;
  Var loss;  // only valid in training mode
  Real intent_loss = 0, act_loss = 0, tag_loss = 0, state_loss = 0;
  int unreachable_gold = 0;
};

struct RunOptions {
  bool training = false;
  const TurnGold* gold = nullptr;       // required when training
  bool use_gold_tags = false;           // candidate-update input source
  bool use_gold_prev_state = false;     // scorer feature source
  // Embedding-level token replacement (slot value dropout). Decode and m_u
  // always use the original surface tokens.
  const std::vector<std::string>* input_tokens = nullptr;
  // Gold state of turn t-1, needed when use_gold_prev_state is set.
  const std::map<std::string, std::string>* prev_gold_state = nullptr;
};

// Runs one dialogue turn by turn. With an external tape the recurrent
// carries stay differentiable and the whole dialogue is trained with BPTT;
// previous-turn candidate scores always enter as constants. Without a tape
// each turn runs on a private tape with value-only carries (inference), the
// exact same computation without gradients. Batch eval and the REPL both go
// through this path.
class DialogueRunner {
 public:
  explicit DialogueRunner(const JointModel& model, Tape* train_tape = nullptr);

  void reset();  // restores the t=1 condition: zero states, no candidates
  TurnResult run_turn(const Turn& turn, const RunOptions& opts = {});

  struct SlotTrack {
    CandidateSet set;
    PrevSlotScores prev;
  };
  const std::map<int, SlotTrack>& tracks() const { return tracks_; }
  int turn_index() const { return turn_index_; }

 private:
  const JointModel& m_;
  Tape* train_tape_;

  bool has_carry_ = false;
  Var v_state_lu_, v_state_dst_, v_prev_do_lu_;
  Tensor t_state_lu_, t_state_dst_, t_prev_do_lu_;
  std::set<int> mentioned_;
  std::map<int, SlotTrack> tracks_;
  int turn_index_ = 0;
};

// Inference over a whole corpus (predicted tags and predicted previous state
// throughout).
std::vector<std::vector<TurnPrediction>> run_inference(const JointModel& model,
                                                       const Corpus& corpus);

}  // namespace jdst
