#pragma once

#include <functional>

#include "jdst/tape.hpp"

namespace jdst {

// Compares reverse-mode gradients of f against central finite differences,
// entry by entry over every parameter in the store. f must build its loss on
// the given tape and be deterministic (no sampling). Returns
// max |g_ad - g_fd| / max(1, |g_fd|). Rejects eps <= 0.
Real gradient_check(const std::function<Var(Tape&)>& f, ParameterStore& params, Real eps);

}  // namespace jdst
