#pragma once

#include <cmath>
#include <vector>

#include "lccgan/network.hpp"

namespace lccgan {

struct AdamOptions {
  double learning_rate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moment accumulators mirror the parameter layout one-to-one.
struct AdamState {
  long step = 0;
  AdamOptions options;
  std::vector<Matrix> m_weight, v_weight;
  std::vector<RowVector> m_bias, v_bias;

  static AdamState for_params(const NetworkParams& net, AdamOptions options = {});
};

/// One Adam descent step on `params` with gradient `grads`.
void adam_step(NetworkParams& params, const NetworkParams& grads, AdamState& state);

/// Adam update of a single dense parameter block with bias-corrected moments.
template <class P, class G, class M, class V>
void adam_update(Eigen::MatrixBase<P>& param, const Eigen::MatrixBase<G>& grad,
                 Eigen::MatrixBase<M>& m, Eigen::MatrixBase<V>& v, long step,
                 const AdamOptions& o) {
  m = o.beta1 * m + (1.0 - o.beta1) * grad;
  v = o.beta2 * v + (1.0 - o.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(step));
  param.array() -= o.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + o.eps);
}

}  // namespace lccgan
