#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "lccgan/types.hpp"

namespace lccgan {

namespace detail {
struct Graph;
}

class Tape;

// A dense 2-D value (scalars are 1x1, vectors are 1xn rows). A Tensor is
// either a plain constant or a handle into the Tape that produced it.
class Tensor {
 public:
  Tensor() = default;
  /// Untracked constant. Throws ContractError on NaN/Inf entries.
  explicit Tensor(Matrix value);

  const Matrix& value() const;
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  std::vector<Index> shape() const { return {rows(), cols()}; }
  /// Value of a 1x1 tensor.
  double item() const;

  bool tracked() const { return graph_ != nullptr; }
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  friend struct TensorAccess;
  Tensor(std::shared_ptr<detail::Graph> g, std::size_t id) : graph_(std::move(g)), id_(id) {}

  std::shared_ptr<const Matrix> constant_;
  std::shared_ptr<detail::Graph> graph_;
  std::size_t id_ = 0;
};

/// Gradients of a scalar with respect to every node of one tape.
class Gradients {
 public:
  /// Gradient for a leaf (or any node) of the tape; zeros when not on the path.
  const Matrix& operator[](const Tensor& t) const;

 private:
  friend class Tape;
  std::shared_ptr<const detail::Graph> graph_;
  std::vector<Matrix> grads_;
};

// Records operations for reverse-mode differentiation. Tapes are
// independent: mixing tensors from two tapes is a ContractError.
class Tape {
 public:
  Tape();

  /// Differentiable leaf. Throws ContractError on non-finite entries.
  Tensor leaf(Matrix value);
  Tensor leaf(double value);
  /// Non-differentiable node on this tape.
  Tensor constant(Matrix value);

  /// Reverse sweep from a 1x1 loss recorded on this tape.
  Gradients backward(const Tensor& loss) const;

  std::size_t size() const;

 private:
  std::shared_ptr<detail::Graph> graph_;
};

// Differentiable operations. Results are tracked when any operand is.
Tensor matmul(const Tensor& a, const Tensor& b);
/// Adds a 1 x cols row vector to every row of a.
Tensor add_row(const Tensor& a, const Tensor& row);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
Tensor one_minus(const Tensor& a);
Tensor square(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor log(const Tensor& a);
/// Clamps to [lo, hi]; gradient passes only where lo <= a <= hi.
Tensor clamp(const Tensor& a, double lo, double hi);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(double s, const Tensor& a) { return scale(a, s); }

}  // namespace lccgan
