#include "lccgan/lipschitz.hpp"

#include <algorithm>
#include <cmath>

#include "lccgan/error.hpp"

namespace lccgan {

Matrix jvp(const DiffFn& f, const Matrix& x, const Matrix& dx) {
  if (x.rows() != dx.rows() || x.cols() != dx.cols())
    throw DimensionError("jvp: point and direction shapes differ");
  const Index n = x.rows();
  const Index out = f(Tensor(Matrix(x.topRows(std::min<Index>(n, 1))))).cols();

  // Stack out copies of x; block k selects output column k, so the gradient
  // of block k's rows is row k of each Jacobian.
  Matrix stacked(n * out, x.cols());
  Matrix mask = Matrix::Zero(n * out, out);
  for (Index k = 0; k < out; ++k) {
    stacked.middleRows(k * n, n) = x;
    mask.block(k * n, k, n, 1).setOnes();
  }
  Tape tape;
  const Tensor xs = tape.leaf(stacked);
  const Tensor y = f(xs);
  const Gradients g = tape.backward(sum(mul(y, tape.constant(mask))));
  const Matrix& grad = g[xs];

  Matrix result(n, out);
  for (Index k = 0; k < out; ++k)
    result.col(k) = grad.middleRows(k * n, n).cwiseProduct(dx).rowwise().sum();
  return result;
}

FunctionConstants estimate_lipschitz(const DiffFn& f, const DomainSampler& domain, Index n_pairs,
                                     double safety, std::uint64_t seed) {
  if (n_pairs < 100) throw ConfigError("lipschitz: n_pairs must be >= 100");
  if (!(safety >= 1.0)) throw ConfigError("lipschitz: safety factor must be >= 1");
  Rng rng(seed);
  Matrix x = domain(n_pairs, rng);
  Matrix xp = domain(n_pairs, rng);
  if (x.rows() != n_pairs || xp.rows() != n_pairs)
    throw DimensionError("lipschitz: domain sampler returned the wrong count");

  // Local half: move x a log-uniform fraction of the way towards a fresh
  // domain point, so pairs stay inside the domain's hull.
  const Matrix toward = domain(n_pairs, rng);
  if (toward.rows() != n_pairs) throw DimensionError("lipschitz: domain sampler returned the wrong count");
  for (Index i = n_pairs / 2; i < n_pairs; ++i) {
    const double t = std::pow(10.0, -3.0 * rng.uniform());
    xp.row(i) = x.row(i) + t * (toward.row(i) - x.row(i));
  }

  const Matrix fx = f(Tensor(x)).value();
  const Matrix fxp = f(Tensor(xp)).value();
  const Matrix diff = xp - x;
  const Matrix lin = jvp(f, x, diff);

  FunctionConstants c;
  double first = 0.0, second = 0.0;
  for (Index i = 0; i < n_pairs; ++i) {
    const double dist = diff.row(i).norm();
    if (dist <= 1e-12) {
      ++c.skipped;
      continue;
    }
    ++c.pairs;
    const RowVector df = fxp.row(i) - fx.row(i);
    first = std::max(first, df.norm() / dist);
    second = std::max(second, (df - lin.row(i)).norm() / (dist * dist));
  }
  c.first_order = safety * first;
  c.second_order = safety * second;
  return c;
}

void LipschitzEstimate::validate() const {
  if (!(L_x > 0.0 && L_h > 0.0 && L_G > 0.0))
    throw ContractError("lipschitz estimate: constants must be positive");
  if (!(safety >= 1.0)) throw ContractError("lipschitz estimate: safety must be >= 1");
}

LipschitzEstimate estimate_gan_lipschitz(const NetworkParams& generator,
                                         const NetworkParams& discriminator,
                                         const DomainSampler& latent, const DomainSampler& data,
                                         Index n_pairs, double safety, std::uint64_t seed) {
  constexpr double floor = 1e-12;
  Rng rng(seed);
  const FunctionConstants g =
      estimate_lipschitz(network_fn(generator), latent, n_pairs, safety, rng.derive(1).next_u64());
  const FunctionConstants d =
      estimate_lipschitz(network_fn(discriminator), data, n_pairs, safety, rng.derive(2).next_u64());
  LipschitzEstimate e;
  e.L_h = std::max(g.first_order, floor);
  e.L_G = std::max(g.second_order, floor);
  e.L_x = std::max(d.first_order, floor);
  e.samples = g.pairs + d.pairs;
  e.safety = safety;
  e.method = "sampled pairs (independent + local), max ratio x safety; second order via reverse-mode JVP";
  return e;
}

DomainSampler row_sampler(Matrix points) {
  if (points.rows() == 0) throw DimensionError("row_sampler: no points");
  return [points = std::move(points)](Index n, Rng& rng) {
    Matrix out(n, points.cols());
    for (Index i = 0; i < n; ++i)
      out.row(i) = points.row(static_cast<Index>(rng.index(static_cast<std::uint64_t>(points.rows()))));
    return out;
  };
}

DomainSampler mixture_sampler(std::vector<DomainSampler> parts) {
  if (parts.empty()) throw DimensionError("mixture_sampler: no components");
  return [parts = std::move(parts)](Index n, Rng& rng) {
    const Index k = static_cast<Index>(parts.size());
    std::vector<Matrix> draws;
    Index cols = 0;
    for (Index j = 0; j < k; ++j) {
      const Index m = n / k + (j < n % k ? 1 : 0);
      draws.push_back(parts[static_cast<std::size_t>(j)](m, rng));
      cols = draws.back().cols();
    }
    Matrix out(n, cols);
    Index r = 0;
    for (const auto& d : draws) {
      out.middleRows(r, d.rows()) = d;
      r += d.rows();
    }
    // Interleave so both halves of the pair list see every component.
    const std::vector<Index> perm = rng.permutation(n);
    Matrix shuffled(n, cols);
    for (Index i = 0; i < n; ++i) shuffled.row(i) = out.row(perm[static_cast<std::size_t>(i)]);
    return shuffled;
  };
}

DiffFn network_fn(const NetworkParams& net) {
  return [net](const Tensor& x) { return forward(net, x); };
}

Json lipschitz_to_json(const LipschitzEstimate& e) {
  return Json{{"L_x", e.L_x},         {"L_h", e.L_h},       {"L_G", e.L_G},
              {"samples", e.samples}, {"safety", e.safety}, {"method", e.method}};
}

}  // namespace lccgan
