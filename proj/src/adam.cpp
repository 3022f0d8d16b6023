#include "jdst/adam.hpp"

#include <cmath>

namespace jdst {

void Adam::step(ParameterStore& params) {
  ++t_;
  const Real c1 = 1.0 - std::pow(cfg_.beta1, static_cast<Real>(t_));
  const Real c2 = 1.0 - std::pow(cfg_.beta2, static_cast<Real>(t_));
  for (Parameter* p : params.all()) {
    auto it = moments_.find(p->id);
    if (it == moments_.end()) {
      it = moments_
               .emplace(p->id, std::make_pair(Tensor::zeros(p->value.shape),
                                              Tensor::zeros(p->value.shape)))
               .first;
    }
    Tensor& m = it->second.first;
    Tensor& v = it->second.second;
    for (size_t i = 0; i < p->value.data.size(); ++i) {
      Real g = p->grad.data[i];
      m.data[i] = cfg_.beta1 * m.data[i] + (1.0 - cfg_.beta1) * g;
      v.data[i] = cfg_.beta2 * v.data[i] + (1.0 - cfg_.beta2) * g * g;
      Real mhat = m.data[i] / c1;
      Real vhat = v.data[i] / c2;
      p->value.data[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      p->grad.data[i] = 0.0;
    }
  }
}

}  // namespace jdst
