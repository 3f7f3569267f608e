#include "lccgan/network.hpp"

#include <cmath>

#include "lccgan/error.hpp"

namespace lccgan {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
  }
  return "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  throw FormatError("unknown activation '" + std::string(name) + "'");
}

Tensor activate(Activation a, const Tensor& x) {
  switch (a) {
    case Activation::identity: return x;
    case Activation::tanh: return tanh(x);
    case Activation::relu: return relu(x);
    case Activation::sigmoid: return sigmoid(x);
  }
  return x;
}

Index NetworkParams::in_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
Index NetworkParams::out_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Activation NetworkParams::output_activation() const {
  return layers.empty() ? Activation::identity : layers.back().activation;
}

void NetworkParams::validate() const {
  if (layers.empty()) throw DimensionError("network has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.weight.rows() < 1 || l.weight.cols() < 1)
      throw DimensionError("layer " + std::to_string(i) + " has an empty weight matrix");
    if (l.bias.size() != l.weight.cols())
      throw DimensionError("layer " + std::to_string(i) + " bias length does not match its output");
    if (i > 0 && layers[i - 1].out_dim() != l.in_dim())
      throw DimensionError("layer " + std::to_string(i) + " input extent " +
                           std::to_string(l.in_dim()) + " does not chain with previous output " +
                           std::to_string(layers[i - 1].out_dim()));
    if (!l.weight.allFinite() || !l.bias.allFinite())
      throw DimensionError("layer " + std::to_string(i) + " has non-finite parameters");
  }
}

NetworkParams NetworkParams::zeros_like() const {
  NetworkParams z;
  z.layers.reserve(layers.size());
  for (const auto& l : layers)
    z.layers.push_back(Layer{Matrix::Zero(l.weight.rows(), l.weight.cols()),
                             RowVector::Zero(l.bias.size()), l.activation});
  return z;
}

bool operator==(const NetworkParams& a, const NetworkParams& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    const auto& x = a.layers[i];
    const auto& y = b.layers[i];
    if (x.activation != y.activation || x.weight.rows() != y.weight.rows() ||
        x.weight.cols() != y.weight.cols() || x.bias.size() != y.bias.size())
      return false;
    if (x.weight != y.weight || x.bias != y.bias) return false;
  }
  return true;
}

BoundNetwork bind(Tape& tape, const NetworkParams& net) {
  BoundNetwork b;
  for (const auto& l : net.layers) {
    b.weights.push_back(tape.leaf(l.weight));
    b.biases.push_back(tape.leaf(Matrix(l.bias)));
  }
  return b;
}

Tensor forward(const NetworkParams& net, const BoundNetwork& bound, const Tensor& x) {
  if (x.cols() != net.in_dim())
    throw DimensionError("forward: input has " + std::to_string(x.cols()) +
                         " features, network expects " + std::to_string(net.in_dim()));
  Tensor h = x;
  for (std::size_t i = 0; i < net.layers.size(); ++i)
    h = activate(net.layers[i].activation,
                 add_row(matmul(h, bound.weights[i]), bound.biases[i]));
  return h;
}

Tensor forward(const NetworkParams& net, const Tensor& x) {
  BoundNetwork constants;
  for (const auto& l : net.layers) {
    constants.weights.emplace_back(l.weight);
    constants.biases.emplace_back(Matrix(l.bias));
  }
  return forward(net, constants, x);
}

Matrix forward(const NetworkParams& net, const Matrix& x) {
  if (x.cols() != net.in_dim())
    throw DimensionError("forward: input has " + std::to_string(x.cols()) +
                         " features, network expects " + std::to_string(net.in_dim()));
  return forward(net, Tensor(x)).value();
}

NetworkParams gradients_of(const Gradients& grads, const BoundNetwork& bound,
                           const NetworkParams& net) {
  NetworkParams g;
  g.layers.reserve(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i)
    g.layers.push_back(Layer{grads[bound.weights[i]], grads[bound.biases[i]].row(0),
                             net.layers[i].activation});
  return g;
}

double norm(const NetworkParams& net) {
  double s = 0.0;
  for (const auto& l : net.layers) s += l.weight.squaredNorm() + l.bias.squaredNorm();
  return std::sqrt(s);
}

NetworkParams he_init(std::span<const Index> dims, Activation hidden, Activation output, Rng& rng) {
  if (dims.size() < 2) throw DimensionError("he_init needs at least input and output extents");
  NetworkParams net;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const Index fan_in = dims[i];
    const Index fan_out = dims[i + 1];
    if (fan_in < 1 || fan_out < 1) throw DimensionError("he_init: extents must be positive");
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    net.layers.push_back(Layer{rng.normal_matrix(fan_in, fan_out, stddev),
                               RowVector::Zero(fan_out),
                               i + 2 == dims.size() ? output : hidden});
  }
  return net;
}

NetworkParams he_init(std::span<const Index> dims, Activation hidden, Activation output,
                      std::uint64_t seed) {
  Rng rng(seed);
  return he_init(dims, hidden, output, rng);
}

std::vector<Index> mlp_dims(Index in, std::span<const Index> hidden, Index out) {
  std::vector<Index> d{in};
  d.insert(d.end(), hidden.begin(), hidden.end());
  d.push_back(out);
  return d;
}

}  // namespace lccgan
