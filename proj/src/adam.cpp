#include "lccgan/adam.hpp"

#include "lccgan/error.hpp"

namespace lccgan {

AdamState AdamState::for_params(const NetworkParams& net, AdamOptions options) {
  AdamState s;
  s.options = options;
  for (const auto& l : net.layers) {
    s.m_weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    s.v_weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    s.m_bias.push_back(RowVector::Zero(l.bias.size()));
    s.v_bias.push_back(RowVector::Zero(l.bias.size()));
  }
  return s;
}

void adam_step(NetworkParams& params, const NetworkParams& grads, AdamState& state) {
  if (grads.layers.size() != params.layers.size() || state.m_weight.size() != params.layers.size())
    throw DimensionError("adam_step: layer count mismatch");
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const auto& p = params.layers[i];
    const auto& g = grads.layers[i];
    if (g.weight.rows() != p.weight.rows() || g.weight.cols() != p.weight.cols() ||
        g.bias.size() != p.bias.size() || state.m_weight[i].rows() != p.weight.rows() ||
        state.m_weight[i].cols() != p.weight.cols())
      throw DimensionError("adam_step: gradient shape differs from parameter shape in layer " +
                           std::to_string(i));
  }
  ++state.step;
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    auto& p = params.layers[i];
    const auto& g = grads.layers[i];
    adam_update(p.weight, g.weight, state.m_weight[i], state.v_weight[i], state.step,
                state.options);
    adam_update(p.bias, g.bias, state.m_bias[i], state.v_bias[i], state.step, state.options);
  }
}

}  // namespace lccgan
