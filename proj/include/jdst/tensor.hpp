#pragma once

#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace jdst {

using Real = double;

// Dense row-major tensor. Rank 0 or [1] = scalar, rank 1 = vector,
// rank 2 = matrix [rows, cols]. Invariant: data.size() == product(shape).
struct Tensor {
  std::vector<int> shape;
  std::vector<Real> data;

  Tensor() = default;
  Tensor(std::vector<int> s, std::vector<Real> d) : shape(std::move(s)), data(std::move(d)) {
    if (numel_of(shape) != static_cast<int64_t>(data.size()))
      throw std::invalid_argument("Tensor: shape/data size mismatch");
  }

  static int64_t numel_of(const std::vector<int>& s) {
    int64_t n = 1;
    for (int d : s) n *= d;
    return n;
  }

  static Tensor zeros(std::vector<int> s) {
    Tensor t;
    t.shape = std::move(s);
    t.data.assign(numel_of(t.shape), 0.0);
    return t;
  }
  static Tensor scalar(Real v) { return Tensor({1}, {v}); }
  static Tensor vec(std::vector<Real> d) {
    Tensor t;
    t.shape = {static_cast<int>(d.size())};
    t.data = std::move(d);
    return t;
  }

  int64_t numel() const { return static_cast<int64_t>(data.size()); }
  bool is_scalar() const { return numel() == 1; }
  int rows() const { return shape.size() == 2 ? shape[0] : (shape.empty() ? 1 : shape[0]); }
  int cols() const { return shape.size() == 2 ? shape[1] : 1; }

  Real& at(int r, int c) { return data[static_cast<size_t>(r) * shape[1] + c]; }
  Real at(int r, int c) const { return data[static_cast<size_t>(r) * shape[1] + c]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  std::string shape_str() const {
    std::ostringstream os;
    os << '[';
    for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << ']';
    return os.str();
  }
};

}  // namespace jdst
