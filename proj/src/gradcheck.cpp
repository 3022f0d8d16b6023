#include "jdst/gradcheck.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace jdst {

namespace {

Real eval_loss(const std::function<Var(Tape&)>& f) {
  Tape tape;
  Var loss = f(tape);
  if (!tape.value(loss).is_scalar())
    throw std::invalid_argument("gradient_check: f must produce a scalar");
  return tape.scalar(loss);
}

}  // namespace

Real gradient_check(const std::function<Var(Tape&)>& f, ParameterStore& params, Real eps) {
  if (!(eps > 0)) throw std::invalid_argument("gradient_check: eps must be > 0");

  params.zero_grads();
  {
    Tape tape;
    Var loss = f(tape);
    tape.backward(loss);
  }
  std::map<std::string, Tensor> analytic;
  for (Parameter* p : params.all()) analytic.emplace(p->id, p->grad);
  params.zero_grads();

  Real max_rel = 0.0;
  for (Parameter* p : params.all()) {
    const Tensor& g = analytic.at(p->id);
    for (size_t i = 0; i < p->value.data.size(); ++i) {
      const Real saved = p->value.data[i];
      p->value.data[i] = saved + eps;
      Real fp = eval_loss(f);
      p->value.data[i] = saved - eps;
      Real fm = eval_loss(f);
      p->value.data[i] = saved;
      Real fd = (fp - fm) / (2.0 * eps);
      Real rel = std::abs(g.data[i] - fd) / std::max(1.0, std::abs(fd));
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace jdst
