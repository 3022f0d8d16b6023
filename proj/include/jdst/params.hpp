#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "jdst/tensor.hpp"
#include "jdst/util.hpp"

namespace jdst {

// A named trainable weight. The gradient tensor always mirrors the value
// shape and accumulates across backward passes until the optimizer clears it.
struct Parameter {
  std::string id;
  Tensor value;
  Tensor grad;
};

// Owns every Parameter of a model. Pointers stay stable for the lifetime of
// the store; iteration is sorted by id so optimizer updates and checkpoints
// are order-deterministic.
class ParameterStore {
 public:
  // uniform(-s, s), s = sqrt(6 / (fan_in + fan_out))
  Parameter& add_matrix(const std::string& id, int rows, int cols, Rng& rng);
  Parameter& add_vector(const std::string& id, int n);  // zeros
  Parameter& add_scalar(const std::string& id, Real v = 0.0);
  Parameter& add_raw(const std::string& id, Tensor value);

  Parameter* find(const std::string& id) const;
  bool has(const std::string& id) const { return params_.count(id) > 0; }

  std::vector<Parameter*> all() const;  // sorted by id
  int64_t total_size() const;
  size_t count() const { return params_.size(); }
  void zero_grads();

 private:
  Parameter& insert(const std::string& id, Tensor value);
  std::map<std::string, std::unique_ptr<Parameter>> params_;
};

}  // namespace jdst
