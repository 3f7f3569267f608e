#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lccgan/checkpoint.hpp"
#include "lccgan/gan.hpp"

namespace lccgan {

enum class DiscKind {
  mlp,       // fresh tanh MLP with a sigmoid output
  constant,  // the single function D = 1/2
  lookup,    // one free value in [0, 1] per sample (shatters any finite set)
};

std::string to_string(DiscKind k);
DiscKind parse_disc_kind(const std::string& name);

/// Discriminator class F searched by the estimators, plus the inner optimiser.
struct DiscriminatorClass {
  DiscKind kind = DiscKind::mlp;
  std::vector<Index> hidden{32, 32};
  int steps = 500;
  int restarts = 3;
  double learning_rate = 0.01;

  void validate() const;
};

struct DistanceEstimate {
  double distance = 0.0;   // max(best - 2 phi(1/2), 0)
  double objective = 0.0;  // best signed objective found
  double abs_objective = 0.0;
  bool diverged = false;   // some restart produced a non-finite value
  int steps = 0;
  int restarts = 0;
};

/// Neural network distance between two sample sets (rows). The supremum is
/// approached from below by gradient ascent over `cls` with random restarts.
DistanceEstimate estimate_nn_distance(const Matrix& mu, const Matrix& nu, Phi phi,
                                      const DiscriminatorClass& cls, std::uint64_t seed);

/// Empirical Rademacher complexity: mean over K sign draws of
/// sup_D (1/N) sum sigma_i phi(D(x_i)).
double estimate_rademacher(const Matrix& samples, Phi phi, const DiscriminatorClass& cls, int draws,
                           std::uint64_t seed);

/// The supremum for one fixed sign vector.
double rademacher_sup(const Matrix& samples, const Vector& sigma, Phi phi,
                      const DiscriminatorClass& cls, Rng& rng);

Json distance_to_json(const DistanceEstimate& e);

}  // namespace lccgan
