#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "jdst/data.hpp"

namespace jdst {

// Token and label vocabularies collected from the training split only.
// Token indices 0..3 are reserved (<pad>, <unk>, <sos>, <eos>) and never
// pruned; tokens below min_token_freq fall back to <unk>. Label lists are
// sorted, so indices are deterministic.
struct Vocab {
  std::vector<std::string> tokens;
  std::vector<std::string> intents;
  std::vector<std::string> user_acts;
  std::vector<std::string> system_acts;
  std::vector<std::string> slots;
  int min_token_freq = 1;

  static Vocab build(const Corpus& train, int min_token_freq = 1);

  int token_id(const std::string& tok) const;  // <unk> for unknown
  int intent_id(const std::string& s) const { return index_of(intents, s); }
  int user_act_id(const std::string& s) const { return index_of(user_acts, s); }
  int system_act_id(const std::string& s) const { return index_of(system_acts, s); }
  int slot_id(const std::string& s) const { return index_of(slots, s); }

  int pad_id() const { return 0; }
  int unk_id() const { return 1; }
  int sos_id() const { return 2; }
  int eos_id() const { return 3; }

  std::vector<int> token_ids(const std::vector<std::string>& toks) const;

  std::string to_json() const;
  static Vocab from_json(const std::string& text);
  uint64_t hash() const;

 private:
  static int index_of(const std::vector<std::string>& v, const std::string& s);
  mutable std::unordered_map<std::string, int> token_cache_;
};

}  // namespace jdst
