#include "jdst/params.hpp"

#include <cmath>
#include <stdexcept>

namespace jdst {

Parameter& ParameterStore::insert(const std::string& id, Tensor value) {
  if (params_.count(id)) throw std::invalid_argument("duplicate parameter id: " + id);
  auto p = std::make_unique<Parameter>();
  p->id = id;
  p->grad = Tensor::zeros(value.shape);
  p->value = std::move(value);
  Parameter& ref = *p;
  params_.emplace(id, std::move(p));
  return ref;
}

Parameter& ParameterStore::add_matrix(const std::string& id, int rows, int cols, Rng& rng) {
  Tensor t = Tensor::zeros({rows, cols});
  Real s = std::sqrt(6.0 / (rows + cols));
  for (Real& v : t.data) v = rng.uniform(-s, s);
  return insert(id, std::move(t));
}

Parameter& ParameterStore::add_vector(const std::string& id, int n) {
  return insert(id, Tensor::zeros({n}));
}

Parameter& ParameterStore::add_scalar(const std::string& id, Real v) {
  return insert(id, Tensor::scalar(v));
}

Parameter& ParameterStore::add_raw(const std::string& id, Tensor value) {
  return insert(id, std::move(value));
}

Parameter* ParameterStore::find(const std::string& id) const {
  auto it = params_.find(id);
  return it == params_.end() ? nullptr : it->second.get();
}

std::vector<Parameter*> ParameterStore::all() const {
  std::vector<Parameter*> out;
  out.reserve(params_.size());
  for (auto& [id, p] : params_) out.push_back(p.get());
  return out;
}

int64_t ParameterStore::total_size() const {
  int64_t n = 0;
  for (auto& [id, p] : params_) n += p->value.numel();
  return n;
}

void ParameterStore::zero_grads() {
  for (auto& [id, p] : params_)
    std::fill(p->grad.data.begin(), p->grad.data.end(), 0.0);
}

}  // namespace jdst
