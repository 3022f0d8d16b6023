#include "jdst/schedule.hpp"

#include <stdexcept>

namespace jdst {

Real keep_probability(int64_t k, const SamplingSchedule& s) {
  if (!(s.p_min > 0.0 && s.p_min <= 1.0))
    throw std::invalid_argument("keep_probability: p_min must be in (0, 1]");
  if (s.k_pre < 0 || s.k_pre > s.k_max)
    throw std::invalid_argument("keep_probability: need 0 <= k_pre <= k_max");
  if (k <= s.k_pre) return 1.0;
  if (k >= s.k_max) return s.p_min;
  Real frac = static_cast<Real>(k - s.k_pre) / static_cast<Real>(s.k_max - s.k_pre);
  return 1.0 - (1.0 - s.p_min) * frac;
}

Real dropout_probability(int64_t k, int64_t k_max, Real p_max) {
  if (k_max <= 0) return p_max;
  if (k <= 0) return 0.0;
  if (k >= k_max) return p_max;
  return p_max * static_cast<Real>(k) / static_cast<Real>(k_max);
}

}  // namespace jdst
