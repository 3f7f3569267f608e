#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "lccgan/checkpoint.hpp"
#include "lccgan/gan.hpp"

namespace lccgan {

/// Differentiable map applied row-wise: n x in -> n x out. Must work on
/// tracked and untracked tensors alike.
using DiffFn = std::function<Tensor(const Tensor&)>;
/// Draws n points (rows) from the domain of interest.
using DomainSampler = std::function<Matrix(Index n, Rng& rng)>;

struct FunctionConstants {
  double first_order = 0.0;   // safety * max |f(x') - f(x)| / |x' - x|
  double second_order = 0.0;  // safety * max |f(x') - f(x) - J(x)(x' - x)| / |x' - x|^2
  Index pairs = 0;            // pairs used
  Index skipped = 0;          // coincident pairs
};

/// Sampled Lipschitz constants of f. Half the pairs are independent domain
/// draws; the other half are local perturbations at log-uniform scales.
FunctionConstants estimate_lipschitz(const DiffFn& f, const DomainSampler& domain, Index n_pairs,
                                     double safety, std::uint64_t seed);

/// Row-wise Jacobian-vector products J_f(x_i) * dx_i via reverse mode.
Matrix jvp(const DiffFn& f, const Matrix& x, const Matrix& dx);

struct LipschitzEstimate {
  double L_x = 0.0;  // discriminator, first order
  double L_h = 0.0;  // generator, first order
  double L_G = 0.0;  // generator, second order
  Index samples = 0;
  double safety = 1.5;
  std::string method;

  void validate() const;
};

/// L_h and L_G from the generator on `latent`, L_x from the discriminator on
/// `data`. Constants are floored at a tiny positive value.
LipschitzEstimate estimate_gan_lipschitz(const NetworkParams& generator,
                                         const NetworkParams& discriminator,
                                         const DomainSampler& latent, const DomainSampler& data,
                                         Index n_pairs, double safety, std::uint64_t seed);

/// Uniform draws from the rows of `points`.
DomainSampler row_sampler(Matrix points);
/// Uniform draws from the given samplers in turn.
DomainSampler mixture_sampler(std::vector<DomainSampler> parts);

DiffFn network_fn(const NetworkParams& net);

Json lipschitz_to_json(const LipschitzEstimate& e);

}  // namespace lccgan
