#pragma once

#include <map>
#include <string>
#include <vector>

#include "jdst/util.hpp"

namespace jdst {

inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kUnkToken = "<unk>";
inline constexpr const char* kSosToken = "<sos>";
inline constexpr const char* kEosToken = "<eos>";
inline constexpr const char* kDontcare = "dontcare";

// One system dialogue act: an act type with optional slot and value
// parameters. A value is only meaningful together with a slot.
struct SystemAct {
  std::string type;
  std::string slot;   // empty = absent
  std::string value;  // empty = absent
};

// Token span [start, exclusive_end) carrying a slot value. Indices refer to
// the SOS/EOS-augmented token sequence, so valid spans live in [1, M-1).
struct SlotSpan {
  std::string slot;
  int start = 0;
  int end = 0;
};

struct Turn {
  std::vector<SystemAct> system_acts;
  std::vector<std::string> tokens;  // includes <sos> ... <eos>
  std::vector<SlotSpan> spans;
  std::string intent;  // empty = unlabeled
  std::vector<std::string> user_acts;
  std::map<std::string, std::string> state;  // slot -> value, "dontcare" allowed
};

struct Dialogue {
  std::string id;
  std::vector<Turn> turns;
};

using Corpus = std::vector<Dialogue>;

struct CorpusCounts {
  size_t dialogues = 0;
  size_t turns = 0;
  size_t slots = 0;
};

// Parses a corpus file. The canonical schema is documented in
// docs/corpus-format.md; files in the published Simulated Dialogues layout
// are detected and adapted on the fly. Every structural invariant is
// validated; violations raise errors naming dialogue id, turn index and
// field. An empty file yields an empty corpus with a warning on stderr.
Corpus load_corpus(const std::string& path);

// Same, from an already-parsed JSON string (used by tests).
Corpus parse_corpus(const std::string& json_text, const std::string& origin);

// Canonical-format serialization of a corpus.
std::string corpus_to_json(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::string& path);

CorpusCounts count_corpus(const Corpus& corpus);

// Concatenates corpora (e.g. Sim-R + Sim-M training splits).
Corpus merge_corpora(const std::vector<Corpus>& parts);

// Slot value dropout (training-time OOV robustness): every token inside a
// gold slot span is independently replaced by the <unk> token with
// probability p. Never changes sequence length, spans or labels.
std::vector<std::string> apply_slot_value_dropout(const std::vector<std::string>& tokens,
                                                  const std::vector<SlotSpan>& spans, double p,
                                                  Rng& rng);

// Validates one turn's invariants; `where` prefixes error messages.
void validate_turn(const Turn& turn, const std::string& where);

}  // namespace jdst
