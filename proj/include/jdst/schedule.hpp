#pragma once

#include <cstdint>

#include "jdst/tensor.hpp"

namespace jdst {

// Keep-probability schedule for scheduled sampling: flat at 1.0 for the
// first k_pre steps, then linear down to p_min at k_max. Two independent
// instances drive p_c (slot tags) and p_D (dialogue state).
struct SamplingSchedule {
  int64_t k_pre = 0;
  int64_t k_max = 1;
  Real p_min = 1.0;

  static SamplingSchedule pinned() { return {0, 1, 1.0}; }  // teacher forcing
};

// p = 1 for k <= k_pre, then 1 - (1 - p_min) * (k - k_pre) / (k_max - k_pre);
// clamped to p_min past k_max.
Real keep_probability(int64_t k, const SamplingSchedule& s);

// Slot value dropout rate: linear from 0 at step 0 to p_max at k_max.
Real dropout_probability(int64_t k, int64_t k_max, Real p_max);

}  // namespace jdst
