#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lccgan/rng.hpp"
#include "lccgan/tensor.hpp"

namespace lccgan {

enum class Activation { identity, tanh, relu, sigmoid };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

Tensor activate(Activation a, const Tensor& x);

struct Layer {
  Matrix weight;  // in x out
  RowVector bias;  // 1 x out
  Activation activation = Activation::identity;

  Index in_dim() const { return weight.rows(); }
  Index out_dim() const { return weight.cols(); }
};

// Layered affine + activation network. Rows of the input are samples.
struct NetworkParams {
  std::vector<Layer> layers;

  Index in_dim() const;
  Index out_dim() const;
  std::size_t parameter_count() const;
  Activation output_activation() const;

  /// Throws DimensionError if layer extents do not chain or values are non-finite.
  void validate() const;

  /// Same layout, all weights and biases zero.
  NetworkParams zeros_like() const;

  friend bool operator==(const NetworkParams&, const NetworkParams&);
};

/// Network parameters registered as leaves on a tape.
struct BoundNetwork {
  std::vector<Tensor> weights;
  std::vector<Tensor> biases;
};

BoundNetwork bind(Tape& tape, const NetworkParams& net);

/// Forward pass through bound parameters; records every intermediate on the tape.
Tensor forward(const NetworkParams& net, const BoundNetwork& bound, const Tensor& x);
/// Forward pass with the parameters as constants. Tracked only if x is.
Tensor forward(const NetworkParams& net, const Tensor& x);
Matrix forward(const NetworkParams& net, const Matrix& x);

/// Collects the gradients of the bound parameters in the layout of `net`.
NetworkParams gradients_of(const Gradients& grads, const BoundNetwork& bound,
                           const NetworkParams& net);

/// Frobenius norm over every weight and bias.
double norm(const NetworkParams& net);

/// He-normal initialisation: weights ~ N(0, 2 / fan_in), biases zero.
/// `dims` lists in_dim, hidden widths..., out_dim.
NetworkParams he_init(std::span<const Index> dims, Activation hidden, Activation output,
                      std::uint64_t seed);
NetworkParams he_init(std::span<const Index> dims, Activation hidden, Activation output, Rng& rng);

/// Standard MLP layout helper: in -> hidden... -> out.
std::vector<Index> mlp_dims(Index in, std::span<const Index> hidden, Index out);

}  // namespace lccgan
