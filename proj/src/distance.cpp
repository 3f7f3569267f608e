#include "lccgan/distance.hpp"

#include <cmath>
#include <limits>

#include "lccgan/adam.hpp"
#include "lccgan/error.hpp"

namespace lccgan {

std::string to_string(DiscKind k) {
  switch (k) {
    case DiscKind::mlp: return "mlp";
    case DiscKind::constant: return "constant";
    case DiscKind::lookup: return "lookup";
  }
  return "mlp";
}

DiscKind parse_disc_kind(const std::string& name) {
  if (name == "mlp") return DiscKind::mlp;
  if (name == "constant") return DiscKind::constant;
  if (name == "lookup") return DiscKind::lookup;
  throw ConfigError("unknown discriminator class '" + name + "'");
}

void DiscriminatorClass::validate() const {
  if (steps < 1) throw ConfigError("discriminator class: steps must be >= 1");
  if (restarts < 1) throw ConfigError("discriminator class: restarts must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("discriminator class: learning_rate must be > 0");
  for (Index h : hidden)
    if (h < 1) throw ConfigError("discriminator class: hidden widths must be >= 1");
}

namespace {

NetworkParams fresh_mlp(Index in_dim, const DiscriminatorClass& cls, Rng& rng) {
  return he_init(mlp_dims(in_dim, cls.hidden, 1), Activation::tanh, Activation::sigmoid, rng);
}

// Generic ascent over an MLP: `objective` builds the scalar to maximise from
// the bound network. Returns the best value seen, or NaN-flag through `diverged`.
template <class Objective>
double ascend_mlp(NetworkParams net, const DiscriminatorClass& cls, Objective&& objective,
                  bool& diverged) {
  AdamOptions opts;
  opts.learning_rate = cls.learning_rate;
  AdamState state = AdamState::for_params(net, opts);
  double best = -std::numeric_limits<double>::infinity();
  for (int s = 0; s <= cls.steps; ++s) {
    Tape tape;
    const BoundNetwork b = bind(tape, net);
    const Tensor obj = objective(tape, b, net);
    const double v = obj.item();
    if (!std::isfinite(v)) {
      diverged = true;
      break;
    }
    best = std::max(best, v);
    if (s == cls.steps) break;
    const Gradients g = tape.backward(scale(obj, -1.0));
    const NetworkParams grads = gradients_of(g, b, net);
    if (!all_finite(grads.layers.front().weight)) {
      diverged = true;
      break;
    }
    adam_step(net, grads, state);
  }
  return best;
}

}  // namespace

DistanceEstimate estimate_nn_distance(const Matrix& mu, const Matrix& nu, Phi phi,
                                      const DiscriminatorClass& cls, std::uint64_t seed) {
  if (mu.rows() == 0 || nu.rows() == 0) throw DimensionError("nn distance: empty sample set");
  if (mu.cols() != nu.cols()) throw DimensionError("nn distance: sample dimensions differ");
  cls.validate();

  DistanceEstimate e;
  e.steps = cls.steps;
  e.restarts = cls.restarts;
  const double pc = phi_constant(phi);

  if (cls.kind == DiscKind::lookup)
    throw ConfigError("nn distance: the lookup class is defined on a single sample set only");

  double best = -std::numeric_limits<double>::infinity();
  if (cls.kind == DiscKind::constant) {
    best = apply_phi(phi, 0.5) + apply_phi(phi, 0.5);
    e.restarts = 0;
    e.steps = 0;
  } else {
    Rng rng(seed);
    for (int r = 0; r < cls.restarts; ++r) {
      Rng init = rng.derive(static_cast<std::uint64_t>(r));
      const double v = ascend_mlp(
          fresh_mlp(mu.cols(), cls, init), cls,
          [&](Tape& tape, const BoundNetwork& b, const NetworkParams& net) {
            const Tensor dm = forward(net, b, tape.constant(mu));
            const Tensor dn = forward(net, b, tape.constant(nu));
            return add(mean(apply_phi(phi, dm)), mean(apply_phi(phi, one_minus(dn))));
          },
          e.diverged);
      best = std::max(best, v);
    }
  }
  e.objective = best;
  e.abs_objective = std::abs(best);
  e.distance = std::max(best - pc, 0.0);
  return e;
}

double rademacher_sup(const Matrix& samples, const Vector& sigma, Phi phi,
                      const DiscriminatorClass& cls, Rng& rng) {
  const Index n = samples.rows();
  if (sigma.size() != n) throw DimensionError("rademacher: sign vector length differs from N");
  const Matrix weights = (sigma / static_cast<double>(n)).transpose();  // 1 x N

  switch (cls.kind) {
    case DiscKind::constant:
      return apply_phi(phi, 0.5) * sigma.sum() / static_cast<double>(n);
    case DiscKind::lookup: {
      // D(x_i) = p_i free in [lo, hi]; projected Adam ascent from p = 1/2.
      const double lo = phi == Phi::log ? kPhiFloor : 0.0;
      const double hi = 1.0 - lo;
      Matrix p = Matrix::Constant(n, 1, 0.5);
      Matrix m = Matrix::Zero(n, 1), v = Matrix::Zero(n, 1);
      AdamOptions opts;
      opts.learning_rate = cls.learning_rate;
      double best = -std::numeric_limits<double>::infinity();
      for (int s = 0; s <= cls.steps; ++s) {
        Tape tape;
        const Tensor t = tape.leaf(p);
        const Tensor obj = matmul(tape.constant(weights), apply_phi(phi, t));
        best = std::max(best, obj.item());
        if (s == cls.steps) break;
        const Gradients g = tape.backward(scale(obj, -1.0));
        adam_update(p, g[t], m, v, s + 1, opts);
        p = p.cwiseMax(lo).cwiseMin(hi);
      }
      return best;
    }
    case DiscKind::mlp: {
      double best = -std::numeric_limits<double>::infinity();
      bool diverged = false;
      for (int r = 0; r < cls.restarts; ++r) {
        Rng init = rng.derive(static_cast<std::uint64_t>(r));
        best = std::max(best, ascend_mlp(fresh_mlp(samples.cols(), cls, init), cls,
                                         [&](Tape& tape, const BoundNetwork& b,
                                             const NetworkParams& net) {
                                           const Tensor d = forward(net, b, tape.constant(samples));
                                           return matmul(tape.constant(weights), apply_phi(phi, d));
                                         },
                                         diverged));
      }
      return best;
    }
  }
  return 0.0;
}

double estimate_rademacher(const Matrix& samples, Phi phi, const DiscriminatorClass& cls, int draws,
                           std::uint64_t seed) {
  if (samples.rows() < 1) throw DimensionError("rademacher: need at least one sample");
  if (draws < 1) throw ConfigError("rademacher: draws must be >= 1");
  cls.validate();
  Rng rng(seed);
  double total = 0.0;
  for (int k = 0; k < draws; ++k) {
    Rng signs = rng.derive(2 * static_cast<std::uint64_t>(k));
    Rng init = rng.derive(2 * static_cast<std::uint64_t>(k) + 1);
    Vector sigma(samples.rows());
    for (Index i = 0; i < sigma.size(); ++i) sigma(i) = signs.next_u64() >> 63 ? 1.0 : -1.0;
    total += rademacher_sup(samples, sigma, phi, cls, init);
  }
  return total / draws;
}

Json distance_to_json(const DistanceEstimate& e) {
  return Json{{"distance", e.distance},       {"objective", e.objective},
              {"abs_objective", e.abs_objective}, {"diverged", e.diverged},
              {"steps", e.steps},             {"restarts", e.restarts}};
}

}  // namespace lccgan
