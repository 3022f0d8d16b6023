#pragma once

#include <string>
#include <vector>

#include "jdst/data.hpp"

namespace jdst {

// The 2|S|+1 IOB label space over a fixed slot list: a single O label plus
// one B- and one I- label per slot. Label 0 is O; slot i owns labels 1+2i
// (B) and 2+2i (I).
class TagSet {
 public:
  explicit TagSet(std::vector<std::string> slots);

  int size() const { return static_cast<int>(2 * slots_.size() + 1); }
  int o_id() const { return 0; }
  int b_id(int slot) const { return 1 + 2 * slot; }
  int i_id(int slot) const { return 2 + 2 * slot; }
  bool is_b(int tag) const { return tag > 0 && tag % 2 == 1; }
  bool is_i(int tag) const { return tag > 0 && tag % 2 == 0; }
  int slot_of(int tag) const { return tag == 0 ? -1 : (tag - 1) / 2; }

  std::string name(int tag) const;
  int slot_index(const std::string& slot) const;  // -1 if unknown
  const std::vector<std::string>& slots() const { return slots_; }

 private:
  std::vector<std::string> slots_;
};

// Gold tags from span annotations: first token of a span gets B-slot, the
// rest I-slot, everything else (including SOS/EOS) O. Rejects overlapping or
// out-of-range spans and spans over unknown slots.
std::vector<int> derive_iob_tags(size_t num_tokens, const std::vector<SlotSpan>& spans,
                                 const TagSet& tags);

struct DecodedMention {
  int slot = -1;
  std::string value;  // surface tokens joined by single spaces
  int start = 0;
  int end = 0;
};

// Lenient IOB decode: maximal runs B-s (I-s)* produce one value; a dangling
// I-s (sequence start, after O, or after a different slot's tag) opens a new
// span. SOS/EOS positions are treated as O regardless of their tag.
std::vector<DecodedMention> decode_iob(const std::vector<int>& tags,
                                       const std::vector<std::string>& tokens,
                                       const TagSet& tagset);

}  // namespace jdst
