#include "lccgan/tensor.hpp"

#include <string>

#include "lccgan/error.hpp"

namespace lccgan {
namespace detail {

struct Node {
  Matrix value;
  std::vector<std::size_t> parents;
  // Given d(loss)/d(this), add contributions into the parents' gradients.
  std::function<void(const Graph&, const Matrix&, std::vector<Matrix>&)> backward;
};

struct Graph {
  std::vector<Node> nodes;
};

}  // namespace detail

using detail::Graph;
using detail::Node;

struct TensorAccess {
  static const std::shared_ptr<Graph>& graph(const Tensor& t) { return t.graph_; }
  static Tensor make(std::shared_ptr<Graph> g, std::size_t id) { return Tensor(std::move(g), id); }
};

namespace {

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw ContractError(std::string(what) + ": non-finite entry in leaf tensor");
}

void accumulate(std::vector<Matrix>& grads, std::size_t id, const Matrix& g) {
  if (grads[id].size() == 0)
    grads[id] = g;
  else
    grads[id] += g;
}

std::shared_ptr<Graph> common_graph(const Tensor& a, const Tensor* b) {
  const auto& ga = TensorAccess::graph(a);
  if (b == nullptr) return ga;
  const auto& gb = TensorAccess::graph(*b);
  if (ga && gb && ga != gb) throw ContractError("tensors belong to different tapes");
  return ga ? ga : gb;
}

std::size_t node_id(const std::shared_ptr<Graph>& g, const Tensor& t) {
  if (TensorAccess::graph(t)) return t.id();
  g->nodes.push_back(Node{t.value(), {}, nullptr});
  return g->nodes.size() - 1;
}

using Backward = std::function<void(const Graph&, const Matrix&, std::vector<Matrix>&)>;

Tensor record_unary(const Tensor& a, Matrix value,
                    std::function<void(const Graph&, std::size_t, std::size_t, const Matrix&,
                                       std::vector<Matrix>&)> bw) {
  auto g = common_graph(a, nullptr);
  if (!g) return Tensor(std::move(value));
  const std::size_t pa = a.id();
  const std::size_t self = g->nodes.size();
  Backward fn = [bw = std::move(bw), pa, self](const Graph& graph, const Matrix& grad,
                                               std::vector<Matrix>& grads) {
    bw(graph, self, pa, grad, grads);
  };
  g->nodes.push_back(Node{std::move(value), {pa}, std::move(fn)});
  return TensorAccess::make(g, self);
}

Tensor record_binary(const Tensor& a, const Tensor& b, Matrix value,
                     std::function<void(const Graph&, std::size_t, std::size_t, const Matrix&,
                                        std::vector<Matrix>&)> bw) {
  auto g = common_graph(a, &b);
  if (!g) return Tensor(std::move(value));
  const std::size_t pa = node_id(g, a);
  const std::size_t pb = node_id(g, b);
  const std::size_t self = g->nodes.size();
  Backward fn = [bw = std::move(bw), pa, pb](const Graph& graph, const Matrix& grad,
                                             std::vector<Matrix>& grads) {
    bw(graph, pa, pb, grad, grads);
  };
  g->nodes.push_back(Node{std::move(value), {pa, pb}, std::move(fn)});
  return TensorAccess::make(g, self);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
}

}  // namespace

Tensor::Tensor(Matrix value) {
  check_finite(value, "Tensor");
  constant_ = std::make_shared<const Matrix>(std::move(value));
}

const Matrix& Tensor::value() const {
  if (graph_) return graph_->nodes[id_].value;
  if (constant_) return *constant_;
  static const Matrix empty;
  return empty;
}

double Tensor::item() const {
  const Matrix& v = value();
  if (v.size() != 1) throw DimensionError("item() on a non-scalar tensor");
  return v(0, 0);
}

const Matrix& Gradients::operator[](const Tensor& t) const {
  if (!t.tracked() || TensorAccess::graph(t) != graph_)
    throw ContractError("gradient requested for a tensor from another tape");
  return grads_.at(t.id());
}

Tape::Tape() : graph_(std::make_shared<Graph>()) {}

Tensor Tape::leaf(Matrix value) {
  check_finite(value, "Tape::leaf");
  graph_->nodes.push_back(Node{std::move(value), {}, nullptr});
  return TensorAccess::make(graph_, graph_->nodes.size() - 1);
}

Tensor Tape::leaf(double value) {
  Matrix m(1, 1);
  m(0, 0) = value;
  return leaf(std::move(m));
}

Tensor Tape::constant(Matrix value) { return leaf(std::move(value)); }

std::size_t Tape::size() const { return graph_->nodes.size(); }

Gradients Tape::backward(const Tensor& loss) const {
  if (TensorAccess::graph(loss) != graph_) throw ContractError("loss was not recorded on this tape");
  if (loss.value().size() != 1) throw ContractError("backward() requires a scalar loss");
  const auto& nodes = graph_->nodes;
  std::vector<Matrix> grads(nodes.size());
  grads[loss.id()] = Matrix::Ones(1, 1);
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    if (grads[i].size() == 0 || !nodes[i].backward) continue;
    nodes[i].backward(*graph_, grads[i], grads);
  }
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (grads[i].size() == 0) grads[i] = Matrix::Zero(nodes[i].value.rows(), nodes[i].value.cols());
  Gradients out;
  out.graph_ = graph_;
  out.grads_ = std::move(grads);
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul: inner extents " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " differ");
  Matrix v = a.value() * b.value();
  return record_binary(a, b, std::move(v),
                       [](const Graph& g, std::size_t pa, std::size_t pb, const Matrix& grad,
                          std::vector<Matrix>& grads) {
                         accumulate(grads, pa, grad * g.nodes[pb].value.transpose());
                         accumulate(grads, pb, g.nodes[pa].value.transpose() * grad);
                       });
}

Tensor add_row(const Tensor& a, const Tensor& row) {
  if (row.rows() != 1 || row.cols() != a.cols())
    throw DimensionError("add_row: bias must be 1 x " + std::to_string(a.cols()));
  Matrix v = a.value().rowwise() + row.value().row(0);
  return record_binary(a, row, std::move(v),
                       [](const Graph&, std::size_t pa, std::size_t pb, const Matrix& grad,
                          std::vector<Matrix>& grads) {
                         accumulate(grads, pa, grad);
                         accumulate(grads, pb, grad.colwise().sum());
                       });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Matrix v = a.value() + b.value();
  return record_binary(a, b, std::move(v),
                       [](const Graph&, std::size_t pa, std::size_t pb, const Matrix& grad,
                          std::vector<Matrix>& grads) {
                         accumulate(grads, pa, grad);
                         accumulate(grads, pb, grad);
                       });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  Matrix v = a.value() - b.value();
  return record_binary(a, b, std::move(v),
                       [](const Graph&, std::size_t pa, std::size_t pb, const Matrix& grad,
                          std::vector<Matrix>& grads) {
                         accumulate(grads, pa, grad);
                         accumulate(grads, pb, -grad);
                       });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Matrix v = a.value().cwiseProduct(b.value());
  return record_binary(a, b, std::move(v),
                       [](const Graph& g, std::size_t pa, std::size_t pb, const Matrix& grad,
                          std::vector<Matrix>& grads) {
                         accumulate(grads, pa, grad.cwiseProduct(g.nodes[pb].value));
                         accumulate(grads, pb, grad.cwiseProduct(g.nodes[pa].value));
                       });
}

Tensor scale(const Tensor& a, double s) {
  Matrix v = s * a.value();
  return record_unary(a, std::move(v),
                      [s](const Graph&, std::size_t, std::size_t pa, const Matrix& grad,
                          std::vector<Matrix>& grads) { accumulate(grads, pa, s * grad); });
}

Tensor add_scalar(const Tensor& a, double s) {
  Matrix v = a.value().array() + s;
  return record_unary(a, std::move(v),
                      [](const Graph&, std::size_t, std::size_t pa, const Matrix& grad,
                         std::vector<Matrix>& grads) { accumulate(grads, pa, grad); });
}

Tensor one_minus(const Tensor& a) {
  Matrix v = 1.0 - a.value().array();
  return record_unary(a, std::move(v),
                      [](const Graph&, std::size_t, std::size_t pa, const Matrix& grad,
                         std::vector<Matrix>& grads) { accumulate(grads, pa, -grad); });
}

Tensor square(const Tensor& a) {
  Matrix v = a.value().array().square();
  return record_unary(a, std::move(v),
                      [](const Graph& g, std::size_t, std::size_t pa, const Matrix& grad,
                         std::vector<Matrix>& grads) {
                        accumulate(grads, pa, 2.0 * grad.cwiseProduct(g.nodes[pa].value));
                      });
}

Tensor tanh(const Tensor& a) {
  Matrix v = a.value().array().tanh();
  return record_unary(a, std::move(v),
                      [](const Graph& g, std::size_t self, std::size_t pa, const Matrix& grad,
                         std::vector<Matrix>& grads) {
                        const Matrix& y = g.nodes[self].value;
                        accumulate(grads, pa, (grad.array() * (1.0 - y.array().square())).matrix());
                      });
}

Tensor relu(const Tensor& a) {
  Matrix v = a.value().cwiseMax(0.0);
  return record_unary(a, std::move(v),
                      [](const Graph& g, std::size_t, std::size_t pa, const Matrix& grad,
                         std::vector<Matrix>& grads) {
                        const Matrix& x = g.nodes[pa].value;
                        accumulate(grads, pa, (x.array() > 0.0).select(grad, 0.0).matrix());
                      });
}

Tensor sigmoid(const Tensor& a) {
  Matrix v = 1.0 / (1.0 + (-a.value().array()).exp());
  return record_unary(a, std::move(v),
                      [](const Graph& g, std::size_t self, std::size_t pa, const Matrix& grad,
                         std::vector<Matrix>& grads) {
                        const Matrix& y = g.nodes[self].value;
                        accumulate(grads, pa,
                                   (grad.array() * y.array() * (1.0 - y.array())).matrix());
                      });
}

Tensor log(const Tensor& a) {
  Matrix v = a.value().array().log();
  return record_unary(a, std::move(v),
                      [](const Graph& g, std::size_t, std::size_t pa, const Matrix& grad,
                         std::vector<Matrix>& grads) {
                        accumulate(grads, pa, (grad.array() / g.nodes[pa].value.array()).matrix());
                      });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  Matrix v = a.value().cwiseMax(lo).cwiseMin(hi);
  return record_unary(a, std::move(v),
                      [lo, hi](const Graph& g, std::size_t, std::size_t pa, const Matrix& grad,
                               std::vector<Matrix>& grads) {
                        const auto x = g.nodes[pa].value.array();
                        accumulate(grads, pa, ((x >= lo) && (x <= hi)).select(grad, 0.0).matrix());
                      });
}

Tensor sum(const Tensor& a) {
  Matrix v(1, 1);
  v(0, 0) = a.value().sum();
  return record_unary(a, std::move(v),
                      [](const Graph& g, std::size_t, std::size_t pa, const Matrix& grad,
                         std::vector<Matrix>& grads) {
                        const Matrix& x = g.nodes[pa].value;
                        accumulate(grads, pa, Matrix::Constant(x.rows(), x.cols(), grad(0, 0)));
                      });
}

Tensor mean(const Tensor& a) {
  const auto n = static_cast<double>(a.value().size());
  if (n == 0) throw DimensionError("mean of an empty tensor");
  Matrix v(1, 1);
  v(0, 0) = a.value().sum() / n;
  return record_unary(a, std::move(v),
                      [n](const Graph& g, std::size_t, std::size_t pa, const Matrix& grad,
                          std::vector<Matrix>& grads) {
                        const Matrix& x = g.nodes[pa].value;
                        accumulate(grads, pa, Matrix::Constant(x.rows(), x.cols(), grad(0, 0) / n));
                      });
}

}  // namespace lccgan
