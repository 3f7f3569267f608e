#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "lccgan/checkpoint.hpp"
#include "lccgan/dataset.hpp"
#include "lccgan/distance.hpp"
#include "lccgan/gan.hpp"

namespace lccgan {

struct GapConfig {
  DiscriminatorClass disc;
  int rademacher_draws = 10;
  double confidence = 0.05;  // delta
  Index generated = 0;       // generated sample count; 0 means the training set size
  SamplerConfig sampler;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GapReport {
  double train_distance = 0.0;
  double heldout_distance = 0.0;
  double gap = 0.0;
  double rademacher = 0.0;
  double phi_bound = 0.0;      // Delta
  double confidence = 0.05;    // delta
  double quality = 0.0;        // Q over the generated codings
  double phi_lipschitz = 0.0;  // L_phi
  double epsilon = 0.0;        // L_phi * Q + 2 Delta
  double bound_value = 0.0;
  Index n = 0;
  int steps = 0;
  int restarts = 0;

  /// 2 R + 2 Delta sqrt(2 log(1/delta) / N) + 2 epsilon from the stored fields.
  double recomputed_bound() const;
  /// Throws ContractError unless the arithmetic identities hold exactly.
  void validate() const;
};

/// Fills gap, epsilon and bound_value from the measured fields.
void finalize(GapReport& r);

/// Distances of the generator's distribution to the training and held-out
/// sets, their difference, and the generalization bound assembled from the
/// Rademacher estimate on the training set.
GapReport gap_harness(const GanModel& model, const Dataset& train, const Dataset& heldout,
                      const GapConfig& cfg);

Json gap_to_json(const GapReport& r);
GapReport gap_from_json(const Json& j);
std::string gap_csv_header();
std::string gap_csv_row(const GapReport& r, std::uint64_t seed);

}  // namespace lccgan
