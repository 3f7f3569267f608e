#pragma once

#include <string>
#include <vector>

#include "lccgan/lcc.hpp"
#include "lccgan/rng.hpp"

namespace lccgan {

enum class Prior { standard_gaussian, normalized_gaussian };

std::string to_string(Prior p);
Prior parse_prior(const std::string& name);

struct SamplerConfig {
  Index d = 2;  // nonzeros per sampled coding
  Prior prior = Prior::standard_gaussian;
  std::uint64_t seed = 0;

  void validate(Index anchor_count) const;
};

/// Draws a seed point uniformly from `pool` (rows), takes its d nearest
/// anchors as the support, and fills it with z ~ p(z).
Coding sample_coding(const Dictionary& dict, const SamplerConfig& cfg, const Matrix& pool, Rng& rng);

/// Same, with the seed point given and z supplied by the caller (length d,
/// in nearest-first order of the support).
Coding coding_from_seed_point(const Dictionary& dict, const Vector& seed_point, const Vector& z);

struct SampleBatch {
  std::vector<Coding> codings;
  std::vector<Index> seed_indices;  // row of the pool each draw started from
  Matrix latent;                    // row i is V * gamma_i
};

SampleBatch sample_batch(const Dictionary& dict, const SamplerConfig& cfg, const Matrix& pool,
                         Index n, Rng& rng);

/// Convenience overload seeded from cfg.seed.
SampleBatch sample_batch(const Dictionary& dict, const SamplerConfig& cfg, const Matrix& pool,
                         Index n);

}  // namespace lccgan
