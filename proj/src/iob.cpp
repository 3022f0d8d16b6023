#include "jdst/iob.hpp"

#include <algorithm>
#include <stdexcept>

namespace jdst {

TagSet::TagSet(std::vector<std::string> slots) : slots_(std::move(slots)) {}

std::string TagSet::name(int tag) const {
  if (tag == 0) return "O";
  const std::string& slot = slots_.at(static_cast<size_t>((tag - 1) / 2));
  return (is_b(tag) ? "B-" : "I-") + slot;
}

int TagSet::slot_index(const std::string& slot) const {
  for (size_t i = 0; i < slots_.size(); ++i)
    if (slots_[i] == slot) return static_cast<int>(i);
  return -1;
}

std::vector<int> derive_iob_tags(size_t num_tokens, const std::vector<SlotSpan>& spans,
                                 const TagSet& tags) {
  std::vector<int> out(num_tokens, tags.o_id());
  std::vector<SlotSpan> sorted = spans;
  std::sort(sorted.begin(), sorted.end(),
            [](const SlotSpan& a, const SlotSpan& b) { return a.start < b.start; });
  int prev_end = 0;
  for (const SlotSpan& sp : sorted) {
    if (sp.start < 1 || sp.end > static_cast<int>(num_tokens) - 1 || sp.start >= sp.end)
      throw std::invalid_argument("derive_iob_tags: span [" + std::to_string(sp.start) + "," +
                                  std::to_string(sp.end) + ") out of range for " +
                                  std::to_string(num_tokens) + " tokens");
    if (sp.start < prev_end)
      throw std::invalid_argument("derive_iob_tags: overlapping spans at token " +
                                  std::to_string(sp.start));
    prev_end = sp.end;
    int slot = tags.slot_index(sp.slot);
    if (slot < 0) throw std::invalid_argument("derive_iob_tags: unknown slot " + sp.slot);
    out[sp.start] = tags.b_id(slot);
    for (int m = sp.start + 1; m < sp.end; ++m) out[m] = tags.i_id(slot);
  }
  return out;
}

std::vector<DecodedMention> decode_iob(const std::vector<int>& tags,
                                       const std::vector<std::string>& tokens,
                                       const TagSet& tagset) {
  if (tags.size() != tokens.size())
    throw std::invalid_argument("decode_iob: tag/token length mismatch: " +
                                std::to_string(tags.size()) + " vs " +
                                std::to_string(tokens.size()));
  std::vector<DecodedMention> out;
  int cur_slot = -1;
  int cur_start = -1;
  auto close = [&](int end) {
    if (cur_slot < 0) return;
    DecodedMention m;
    m.slot = cur_slot;
    m.start = cur_start;
    m.end = end;
    m.value = join(tokens.begin() + cur_start, tokens.begin() + end, " ");
    out.push_back(std::move(m));
    cur_slot = -1;
  };
  const int last = static_cast<int>(tags.size()) - 1;
  for (int m = 1; m < last; ++m) {  // SOS/EOS forced O
    int t = tags[m];
    if (t == tagset.o_id()) {
      close(m);
    } else if (tagset.is_b(t)) {
      close(m);
      cur_slot = tagset.slot_of(t);
      cur_start = m;
    } else {  // I-s: continue same slot, otherwise start a fresh span
      int slot = tagset.slot_of(t);
      if (slot != cur_slot) {
        close(m);
        cur_slot = slot;
        cur_start = m;
      }
    }
  }
  close(last);
  return out;
}

}  // namespace jdst
