#include "jdst/tape.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace jdst {

namespace {

using EVec = Eigen::Map<Eigen::VectorXd>;
using CEVec = Eigen::Map<const Eigen::VectorXd>;
using EMat = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using CEMat =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

CEVec as_vec(const Tensor& t) { return CEVec(t.data.data(), t.numel()); }
EVec as_vec(Tensor& t) { return EVec(t.data.data(), t.numel()); }
CEMat as_mat(const Tensor& t) { return CEMat(t.data.data(), t.shape[0], t.shape[1]); }
EMat as_mat(Tensor& t) { return EMat(t.data.data(), t.shape[0], t.shape[1]); }

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void require(bool ok, const std::string& msg) {
  if (!ok) fail(msg);
}

Real stable_bce_term(Real z, Real t) {
  // max(z,0) - z*t + log(1 + exp(-|z|))
  return std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::kInput: return "input";
    case OpKind::kParam: return "param";
    case OpKind::kAffine1: return "affine";
    case OpKind::kAffine2: return "affine2";
    case OpKind::kRow: return "row";
    case OpKind::kConcat: return "concat";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kTanh: return "tanh";
    case OpKind::kRelu: return "relu";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kAddN: return "add_n";
    case OpKind::kMeanN: return "mean_n";
    case OpKind::kAddConst: return "add_const";
    case OpKind::kScale: return "scale";
    case OpKind::kGruBlend: return "gru_blend";
    case OpKind::kMaskFill: return "mask_fill";
    case OpKind::kSum: return "sum";
    case OpKind::kCeLogits: return "ce_logits";
    case OpKind::kBceLogits: return "bce_logits";
  }
  return "?";
}

Var Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return Var{static_cast<int32_t>(nodes_.size() - 1)};
}

void Tape::clear() {
  nodes_.clear();
  param_vars_.clear();
}

void Tape::check_vec(Var v, const char* op) const {
  require(v.valid(), std::string(op) + ": invalid var");
  require(val(v.id).shape.size() == 1,
          std::string(op) + ": expected vector, got " + val(v.id).shape_str());
}

Var Tape::input(Tensor t) {
  Node n;
  n.kind = OpKind::kInput;
  n.val = std::move(t);
  return push(std::move(n));
}

Var Tape::param(Parameter& p) {
  auto it = param_vars_.find(&p);
  if (it != param_vars_.end()) return Var{it->second};
  Node n;
  n.kind = OpKind::kParam;
  n.val = p.value;
  n.param = &p;
  Var v = push(std::move(n));
  param_vars_.emplace(&p, v.id);
  return v;
}

Var Tape::affine(Var w, Var x, Var b) {
  const Tensor& tw = val(w.id);
  const Tensor& tx = val(x.id);
  const Tensor& tb = val(b.id);
  require(tw.shape.size() == 2, "affine: W must be a matrix, got " + tw.shape_str());
  require(tx.shape.size() == 1 && tw.shape[1] == tx.shape[0],
          "affine: shape mismatch W" + tw.shape_str() + " vs x" + tx.shape_str());
  require(tb.shape.size() == 1 && tb.shape[0] == tw.shape[0],
          "affine: shape mismatch W" + tw.shape_str() + " vs b" + tb.shape_str());
  Node n;
  n.kind = OpKind::kAffine1;
  n.in = {w.id, x.id, b.id};
  n.val = Tensor::zeros({tw.shape[0]});
  as_vec(n.val) = as_mat(tw) * as_vec(tx) + as_vec(tb);
  return push(std::move(n));
}

Var Tape::affine2(Var w1, Var x1, Var w2, Var x2, Var b) {
  const Tensor& tw1 = val(w1.id);
  const Tensor& tx1 = val(x1.id);
  const Tensor& tw2 = val(w2.id);
  const Tensor& tx2 = val(x2.id);
  const Tensor& tb = val(b.id);
  require(tw1.shape.size() == 2 && tx1.shape.size() == 1 && tw1.shape[1] == tx1.shape[0],
          "affine2: shape mismatch W1" + tw1.shape_str() + " vs x1" + tx1.shape_str());
  require(tw2.shape.size() == 2 && tx2.shape.size() == 1 && tw2.shape[1] == tx2.shape[0],
          "affine2: shape mismatch W2" + tw2.shape_str() + " vs x2" + tx2.shape_str());
  require(tw1.shape[0] == tw2.shape[0],
          "affine2: shape mismatch W1" + tw1.shape_str() + " vs W2" + tw2.shape_str());
  require(tb.shape.size() == 1 && tb.shape[0] == tw1.shape[0],
          "affine2: shape mismatch W1" + tw1.shape_str() + " vs b" + tb.shape_str());
  Node n;
  n.kind = OpKind::kAffine2;
  n.in = {w1.id, x1.id, w2.id, x2.id, b.id};
  n.val = Tensor::zeros({tw1.shape[0]});
  as_vec(n.val) = as_mat(tw1) * as_vec(tx1) + as_mat(tw2) * as_vec(tx2) + as_vec(tb);
  return push(std::move(n));
}

Var Tape::row(Var matrix, int r) {
  const Tensor& tm = val(matrix.id);
  require(tm.shape.size() == 2, "row: expected matrix, got " + tm.shape_str());
  require(r >= 0 && r < tm.shape[0], "row: index out of range");
  Node n;
  n.kind = OpKind::kRow;
  n.in = {matrix.id};
  n.iarg = r;
  n.val = Tensor::zeros({tm.shape[1]});
  for (int c = 0; c < tm.shape[1]; ++c) n.val.data[c] = tm.at(r, c);
  return push(std::move(n));
}

Var Tape::concat(const std::vector<Var>& xs) {
  require(!xs.empty(), "concat: no inputs");
  Node n;
  n.kind = OpKind::kConcat;
  int total = 0;
  for (Var x : xs) {
    check_vec(x, "concat");
    n.in.push_back(x.id);
    total += val(x.id).shape[0];
  }
  n.val = Tensor::zeros({total});
  int off = 0;
  for (Var x : xs) {
    const Tensor& t = val(x.id);
    std::copy(t.data.begin(), t.data.end(), n.val.data.begin() + off);
    off += t.shape[0];
  }
  return push(std::move(n));
}

Var Tape::sigmoid(Var x) {
  Node n;
  n.kind = OpKind::kSigmoid;
  n.in = {x.id};
  n.val = val(x.id);
  for (Real& v : n.val.data) v = 1.0 / (1.0 + std::exp(-v));
  return push(std::move(n));
}

Var Tape::tanh_(Var x) {
  Node n;
  n.kind = OpKind::kTanh;
  n.in = {x.id};
  n.val = val(x.id);
  for (Real& v : n.val.data) v = std::tanh(v);
  return push(std::move(n));
}

Var Tape::relu(Var x) {
  Node n;
  n.kind = OpKind::kRelu;
  n.in = {x.id};
  n.val = val(x.id);
  for (Real& v : n.val.data) v = v > 0 ? v : 0.0;
  return push(std::move(n));
}

Var Tape::softmax(Var x) {
  check_vec(x, "softmax");
  Node n;
  n.kind = OpKind::kSoftmax;
  n.in = {x.id};
  n.val = val(x.id);
  Real mx = n.val.data[0];
  for (Real v : n.val.data) mx = std::max(mx, v);
  Real z = 0;
  for (Real& v : n.val.data) {
    v = std::exp(v - mx);
    z += v;
  }
  for (Real& v : n.val.data) v /= z;
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  require(val(a.id).same_shape(val(b.id)), "add: shape mismatch " + val(a.id).shape_str() +
                                               " vs " + val(b.id).shape_str());
  Node n;
  n.kind = OpKind::kAdd;
  n.in = {a.id, b.id};
  n.val = val(a.id);
  const Tensor& tb = val(b.id);
  for (size_t i = 0; i < n.val.data.size(); ++i) n.val.data[i] += tb.data[i];
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  require(val(a.id).same_shape(val(b.id)), "sub: shape mismatch " + val(a.id).shape_str() +
                                               " vs " + val(b.id).shape_str());
  Node n;
  n.kind = OpKind::kSub;
  n.in = {a.id, b.id};
  n.val = val(a.id);
  const Tensor& tb = val(b.id);
  for (size_t i = 0; i < n.val.data.size(); ++i) n.val.data[i] -= tb.data[i];
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  require(val(a.id).same_shape(val(b.id)), "mul: shape mismatch " + val(a.id).shape_str() +
                                               " vs " + val(b.id).shape_str());
  Node n;
  n.kind = OpKind::kMul;
  n.in = {a.id, b.id};
  n.val = val(a.id);
  const Tensor& tb = val(b.id);
  for (size_t i = 0; i < n.val.data.size(); ++i) n.val.data[i] *= tb.data[i];
  return push(std::move(n));
}

Var Tape::add_n(const std::vector<Var>& xs) {
  require(!xs.empty(), "add_n: no inputs");
  Node n;
  n.kind = OpKind::kAddN;
  n.val = val(xs[0].id);
  n.in.push_back(xs[0].id);
  for (size_t k = 1; k < xs.size(); ++k) {
    const Tensor& t = val(xs[k].id);
    require(t.same_shape(n.val),
            "add_n: shape mismatch " + n.val.shape_str() + " vs " + t.shape_str());
    for (size_t i = 0; i < n.val.data.size(); ++i) n.val.data[i] += t.data[i];
    n.in.push_back(xs[k].id);
  }
  return push(std::move(n));
}

Var Tape::mean_n(const std::vector<Var>& xs) {
  Var s = add_n(xs);
  Node n;
  n.kind = OpKind::kMeanN;
  n.in = {s.id};
  n.carg = 1.0 / static_cast<Real>(xs.size());
  n.val = val(s.id);
  for (Real& v : n.val.data) v *= n.carg;
  return push(std::move(n));
}

Var Tape::add_const(Var x, Real c) {
  Node n;
  n.kind = OpKind::kAddConst;
  n.in = {x.id};
  n.carg = c;
  n.val = val(x.id);
  for (Real& v : n.val.data) v += c;
  return push(std::move(n));
}

Var Tape::scale(Var x, Real c) {
  Node n;
  n.kind = OpKind::kScale;
  n.in = {x.id};
  n.carg = c;
  n.val = val(x.id);
  for (Real& v : n.val.data) v *= c;
  return push(std::move(n));
}

Var Tape::gru_blend(Var z, Var prev, Var cand) {
  require(val(z.id).same_shape(val(prev.id)) && val(z.id).same_shape(val(cand.id)),
          "gru_blend: shape mismatch " + val(z.id).shape_str() + " vs " +
              val(prev.id).shape_str());
  Node n;
  n.kind = OpKind::kGruBlend;
  n.in = {z.id, prev.id, cand.id};
  n.val = val(z.id);
  const Tensor& tp = val(prev.id);
  const Tensor& tc = val(cand.id);
  for (size_t i = 0; i < n.val.data.size(); ++i) {
    Real zi = n.val.data[i];
    n.val.data[i] = (1.0 - zi) * tp.data[i] + zi * tc.data[i];
  }
  return push(std::move(n));
}

Var Tape::mask_fill(Var x, Tensor keep, Real fill) {
  require(val(x.id).same_shape(keep), "mask_fill: shape mismatch " + val(x.id).shape_str() +
                                          " vs " + keep.shape_str());
  Node n;
  n.kind = OpKind::kMaskFill;
  n.in = {x.id};
  n.carg = fill;
  n.val = val(x.id);
  for (size_t i = 0; i < n.val.data.size(); ++i)
    if (keep.data[i] == 0.0) n.val.data[i] = fill;
  n.aux = std::move(keep);
  return push(std::move(n));
}

Var Tape::sum(Var x) {
  Node n;
  n.kind = OpKind::kSum;
  n.in = {x.id};
  Real s = 0;
  for (Real v : val(x.id).data) s += v;
  n.val = Tensor::scalar(s);
  return push(std::move(n));
}

Var Tape::ce_logits(Var logits, int target) {
  check_vec(logits, "ce_logits");
  const Tensor& t = val(logits.id);
  require(target >= 0 && target < t.shape[0], "ce_logits: target out of range");
  Node n;
  n.kind = OpKind::kCeLogits;
  n.in = {logits.id};
  n.iarg = target;
  Real mx = t.data[0];
  for (Real v : t.data) mx = std::max(mx, v);
  Real z = 0;
  for (Real v : t.data) z += std::exp(v - mx);
  n.val = Tensor::scalar(mx + std::log(z) - t.data[target]);
  return push(std::move(n));
}

Var Tape::bce_logits(Var logits, Tensor targets) {
  check_vec(logits, "bce_logits");
  require(val(logits.id).same_shape(targets), "bce_logits: shape mismatch " +
                                                  val(logits.id).shape_str() + " vs " +
                                                  targets.shape_str());
  Node n;
  n.kind = OpKind::kBceLogits;
  n.in = {logits.id};
  const Tensor& t = val(logits.id);
  Real s = 0;
  for (size_t i = 0; i < t.data.size(); ++i) s += stable_bce_term(t.data[i], targets.data[i]);
  n.val = Tensor::scalar(s);
  n.aux = std::move(targets);
  return push(std::move(n));
}

void Tape::backward(Var scalar_loss) {
  require(scalar_loss.valid() && scalar_loss.id < static_cast<int32_t>(nodes_.size()),
          "backward: loss not on this tape");
  require(nodes_[scalar_loss.id].val.is_scalar(),
          "backward: loss must be scalar, got " + nodes_[scalar_loss.id].val.shape_str());

  const int32_t last = scalar_loss.id;
  for (int32_t i = 0; i <= last; ++i) nodes_[i].grad = Tensor::zeros(nodes_[i].val.shape);
  nodes_[last].grad.data[0] = 1.0;

  for (int32_t i = last; i >= 0; --i) {
    Node& n = nodes_[i];
    const Tensor& g = n.grad;
    switch (n.kind) {
      case OpKind::kInput:
        break;
      case OpKind::kParam:
        for (size_t k = 0; k < g.data.size(); ++k) n.param->grad.data[k] += g.data[k];
        break;
      case OpKind::kAffine1: {
        Tensor& gw = nodes_[n.in[0]].grad;
        Tensor& gx = nodes_[n.in[1]].grad;
        Tensor& gb = nodes_[n.in[2]].grad;
        const Tensor& w = nodes_[n.in[0]].val;
        const Tensor& x = nodes_[n.in[1]].val;
        as_mat(gw).noalias() += as_vec(g) * as_vec(x).transpose();
        as_vec(gx).noalias() += as_mat(w).transpose() * as_vec(g);
        as_vec(gb) += as_vec(g);
        break;
      }
      case OpKind::kAffine2: {
        const Tensor& w1 = nodes_[n.in[0]].val;
        const Tensor& x1 = nodes_[n.in[1]].val;
        const Tensor& w2 = nodes_[n.in[2]].val;
        const Tensor& x2 = nodes_[n.in[3]].val;
        as_mat(nodes_[n.in[0]].grad).noalias() += as_vec(g) * as_vec(x1).transpose();
        as_vec(nodes_[n.in[1]].grad).noalias() += as_mat(w1).transpose() * as_vec(g);
        as_mat(nodes_[n.in[2]].grad).noalias() += as_vec(g) * as_vec(x2).transpose();
        as_vec(nodes_[n.in[3]].grad).noalias() += as_mat(w2).transpose() * as_vec(g);
        as_vec(nodes_[n.in[4]].grad) += as_vec(g);
        break;
      }
      case OpKind::kRow: {
        Tensor& gm = nodes_[n.in[0]].grad;
        for (int c = 0; c < gm.shape[1]; ++c) gm.at(n.iarg, c) += g.data[c];
        break;
      }
      case OpKind::kConcat: {
        int off = 0;
        for (int32_t src : n.in) {
          Tensor& gs = nodes_[src].grad;
          for (size_t k = 0; k < gs.data.size(); ++k) gs.data[k] += g.data[off + k];
          off += static_cast<int>(gs.data.size());
        }
        break;
      }
      case OpKind::kSigmoid: {
        Tensor& gx = nodes_[n.in[0]].grad;
        for (size_t k = 0; k < g.data.size(); ++k) {
          Real y = n.val.data[k];
          gx.data[k] += g.data[k] * y * (1.0 - y);
        }
        break;
      }
      case OpKind::kTanh: {
        Tensor& gx = nodes_[n.in[0]].grad;
        for (size_t k = 0; k < g.data.size(); ++k) {
          Real y = n.val.data[k];
          gx.data[k] += g.data[k] * (1.0 - y * y);
        }
        break;
      }
      case OpKind::kRelu: {
        Tensor& gx = nodes_[n.in[0]].grad;
        const Tensor& x = nodes_[n.in[0]].val;
        for (size_t k = 0; k < g.data.size(); ++k)
          if (x.data[k] > 0) gx.data[k] += g.data[k];
        break;
      }
      case OpKind::kSoftmax: {
        Tensor& gx = nodes_[n.in[0]].grad;
        Real dot = 0;
        for (size_t k = 0; k < g.data.size(); ++k) dot += g.data[k] * n.val.data[k];
        for (size_t k = 0; k < g.data.size(); ++k)
          gx.data[k] += n.val.data[k] * (g.data[k] - dot);
        break;
      }
      case OpKind::kAdd: {
        Tensor& ga = nodes_[n.in[0]].grad;
        Tensor& gb = nodes_[n.in[1]].grad;
        for (size_t k = 0; k < g.data.size(); ++k) {
          ga.data[k] += g.data[k];
          gb.data[k] += g.data[k];
        }
        break;
      }
      case OpKind::kSub: {
        Tensor& ga = nodes_[n.in[0]].grad;
        Tensor& gb = nodes_[n.in[1]].grad;
        for (size_t k = 0; k < g.data.size(); ++k) {
          ga.data[k] += g.data[k];
          gb.data[k] -= g.data[k];
        }
        break;
      }
      case OpKind::kMul: {
        Tensor& ga = nodes_[n.in[0]].grad;
        Tensor& gb = nodes_[n.in[1]].grad;
        const Tensor& a = nodes_[n.in[0]].val;
        const Tensor& b = nodes_[n.in[1]].val;
        for (size_t k = 0; k < g.data.size(); ++k) {
          ga.data[k] += g.data[k] * b.data[k];
          gb.data[k] += g.data[k] * a.data[k];
        }
        break;
      }
      case OpKind::kAddN: {
        for (int32_t src : n.in) {
          Tensor& gs = nodes_[src].grad;
          for (size_t k = 0; k < g.data.size(); ++k) gs.data[k] += g.data[k];
        }
        break;
      }
      case OpKind::kMeanN:
      case OpKind::kScale: {
        Tensor& gx = nodes_[n.in[0]].grad;
        for (size_t k = 0; k < g.data.size(); ++k) gx.data[k] += g.data[k] * n.carg;
        break;
      }
      case OpKind::kAddConst: {
        Tensor& gx = nodes_[n.in[0]].grad;
        for (size_t k = 0; k < g.data.size(); ++k) gx.data[k] += g.data[k];
        break;
      }
      case OpKind::kGruBlend: {
        Tensor& gz = nodes_[n.in[0]].grad;
        Tensor& gp = nodes_[n.in[1]].grad;
        Tensor& gc = nodes_[n.in[2]].grad;
        const Tensor& z = nodes_[n.in[0]].val;
        const Tensor& p = nodes_[n.in[1]].val;
        const Tensor& c = nodes_[n.in[2]].val;
        for (size_t k = 0; k < g.data.size(); ++k) {
          gz.data[k] += g.data[k] * (c.data[k] - p.data[k]);
          gp.data[k] += g.data[k] * (1.0 - z.data[k]);
          gc.data[k] += g.data[k] * z.data[k];
        }
        break;
      }
      case OpKind::kMaskFill: {
        Tensor& gx = nodes_[n.in[0]].grad;
        for (size_t k = 0; k < g.data.size(); ++k)
          if (n.aux.data[k] != 0.0) gx.data[k] += g.data[k];
        break;
      }
      case OpKind::kSum: {
        Tensor& gx = nodes_[n.in[0]].grad;
        for (size_t k = 0; k < gx.data.size(); ++k) gx.data[k] += g.data[0];
        break;
      }
      case OpKind::kCeLogits: {
        Tensor& gx = nodes_[n.in[0]].grad;
        const Tensor& x = nodes_[n.in[0]].val;
        Real mx = x.data[0];
        for (Real v : x.data) mx = std::max(mx, v);
        Real z = 0;
        for (Real v : x.data) z += std::exp(v - mx);
        for (size_t k = 0; k < x.data.size(); ++k) {
          Real p = std::exp(x.data[k] - mx) / z;
          gx.data[k] += g.data[0] * (p - (static_cast<int>(k) == n.iarg ? 1.0 : 0.0));
        }
        break;
      }
      case OpKind::kBceLogits: {
        Tensor& gx = nodes_[n.in[0]].grad;
        const Tensor& x = nodes_[n.in[0]].val;
        for (size_t k = 0; k < x.data.size(); ++k) {
          Real s = 1.0 / (1.0 + std::exp(-x.data[k]));
          gx.data[k] += g.data[0] * (s - n.aux.data[k]);
        }
        break;
      }
    }
  }
}

}  // namespace jdst
