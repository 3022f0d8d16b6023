#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include "jdst/params.hpp"

namespace jdst {

struct AdamConfig {
  Real lr = 1e-3;
  Real beta1 = 0.9;
  Real beta2 = 0.999;
  Real eps = 1e-8;
};

// ADAM with bias-corrected moment estimates. step() consumes the gradients
// currently held by the store and clears them afterwards.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  void step(ParameterStore& params);
  int64_t step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  int64_t t_ = 0;
  std::map<std::string, std::pair<Tensor, Tensor>> moments_;  // id -> (m, v)
};

}  // namespace jdst
