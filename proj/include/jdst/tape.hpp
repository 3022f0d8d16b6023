#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "jdst/params.hpp"
#include "jdst/tensor.hpp"

namespace jdst {

// Handle to a value recorded on a Tape.
struct Var {
  int32_t id = -1;
  bool valid() const { return id >= 0; }
};

enum class OpKind : uint8_t {
  kInput,      // constant leaf
  kParam,      // trainable leaf, grad flows into Parameter::grad
  kAffine1,    // W.x + b
  kAffine2,    // W1.x1 + W2.x2 + b
  kRow,        // row of a matrix
  kConcat,
  kSigmoid,
  kTanh,
  kRelu,
  kSoftmax,
  kAdd,
  kSub,
  kMul,        // elementwise
  kAddN,
  kMeanN,
  kAddConst,
  kScale,
  kGruBlend,   // (1-z)*prev + z*cand
  kMaskFill,   // keep-mask 1 passes x through, 0 replaces with fill
  kSum,        // reduce to scalar
  kCeLogits,   // -log softmax(logits)[target]
  kBceLogits,  // sum_i sigmoid cross entropy vs aux targets
};

const char* op_name(OpKind k);

struct Node {
  OpKind kind;
  std::vector<int32_t> in;
  Tensor val;
  Tensor grad;  // allocated lazily by backward()
  Tensor aux;   // op constants: mask / bce targets
  int iarg = 0;
  Real carg = 0.0;
  Parameter* param = nullptr;
};

// Record of one forward computation. Replaying it in reverse visits every op
// exactly once, accumulating gradients; a parameter used at several sites
// gets the sum of all site gradients.
class Tape {
 public:
  Var input(Tensor t);
  Var input_zeros(int n) { return input(Tensor::zeros({n})); }
  Var param(Parameter& p);  // memoized: one node per parameter per tape

  Var affine(Var w, Var x, Var b);
  Var affine2(Var w1, Var x1, Var w2, Var x2, Var b);
  Var row(Var matrix, int r);
  Var concat(const std::vector<Var>& xs);
  Var sigmoid(Var x);
  Var tanh_(Var x);
  Var relu(Var x);
  Var softmax(Var x);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var add_n(const std::vector<Var>& xs);
  Var mean_n(const std::vector<Var>& xs);
  Var add_const(Var x, Real c);
  Var scale(Var x, Real c);
  Var gru_blend(Var z, Var prev, Var cand);
  Var mask_fill(Var x, Tensor keep, Real fill);
  Var sum(Var x);
  Var ce_logits(Var logits, int target);
  Var bce_logits(Var logits, Tensor targets);

  const Tensor& value(Var v) const { return nodes_[v.id].val; }
  Real scalar(Var v) const { return nodes_[v.id].val.data[0]; }
  const Tensor& grad(Var v) const { return nodes_[v.id].grad; }

  // Seeds d(loss)/d(loss) = 1 and accumulates into Parameter::grad for every
  // parameter recorded on this tape. Rejects non-scalar losses.
  void backward(Var scalar_loss);

  size_t size() const { return nodes_.size(); }
  void clear();

 private:
  Var push(Node n);
  const Tensor& val(int32_t id) const { return nodes_[id].val; }
  void check_vec(Var v, const char* op) const;

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, int32_t> param_vars_;
};

}  // namespace jdst
