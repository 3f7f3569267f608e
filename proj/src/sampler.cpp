#include "lccgan/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "lccgan/error.hpp"

namespace lccgan {

std::string to_string(Prior p) {
  return p == Prior::standard_gaussian ? "standard_gaussian" : "normalized_gaussian";
}

Prior parse_prior(const std::string& name) {
  if (name == "standard_gaussian") return Prior::standard_gaussian;
  if (name == "normalized_gaussian") return Prior::normalized_gaussian;
  throw ConfigError("unknown sampling prior '" + name + "'");
}

void SamplerConfig::validate(Index anchor_count) const {
  if (d < 1) throw ConfigError("sampling dimension d must be >= 1");
  if (d > anchor_count)
    throw ConfigError("sampling dimension d = " + std::to_string(d) + " exceeds anchor count M = " +
                      std::to_string(anchor_count));
}

namespace {

Vector draw_z(Index d, Prior prior, Rng& rng) {
  Vector z(d);
  for (;;) {
    for (Index k = 0; k < d; ++k) z(k) = rng.normal();
    if (prior == Prior::standard_gaussian) return z;
    const double s = z.sum();
    if (std::abs(s) >= 1e-6) return z / s;
  }
}

}  // namespace

Coding coding_from_seed_point(const Dictionary& dict, const Vector& seed_point, const Vector& z) {
  const auto support = nearest_anchors(dict, seed_point, z.size());
  Vector gamma = Vector::Zero(dict.size());
  for (std::size_t k = 0; k < support.size(); ++k) gamma(support[k]) = z(static_cast<Index>(k));
  Coding c;
  c.gamma = std::move(gamma);
  c.support = support;
  c.origin = CodingOrigin::sampled;
  std::sort(c.support.begin(), c.support.end());
  // A zero draw leaves its anchor out of the support.
  std::erase_if(c.support, [&](Index j) { return c.gamma(j) == 0.0; });
  return c;
}

namespace {

void check_pool(const Dictionary& dict, const SamplerConfig& cfg, const Matrix& pool) {
  cfg.validate(dict.size());
  if (pool.rows() < 1) throw ConfigError("sampling pool is empty");
  if (pool.cols() != dict.dim()) throw DimensionError("sampling pool dimension differs from anchors");
}

Coding draw(const Dictionary& dict, const SamplerConfig& cfg, const Matrix& pool, Rng& rng,
            Index& seed_index) {
  seed_index = static_cast<Index>(rng.index(static_cast<std::uint64_t>(pool.rows())));
  const Vector z = draw_z(cfg.d, cfg.prior, rng);
  Coding c = coding_from_seed_point(dict, pool.row(seed_index).transpose(), z);
  if (cfg.prior == Prior::normalized_gaussian && !c.support.empty()) {
    // Division by the sum leaves a rounding residue; absorb it so sum == 1.
    const double r = 1.0 - c.gamma.sum();
    Index k = c.support.front();
    for (Index j : c.support)
      if (std::abs(c.gamma(j)) > std::abs(c.gamma(k))) k = j;
    c.gamma(k) += r;
  }
  return c;
}

}  // namespace

Coding sample_coding(const Dictionary& dict, const SamplerConfig& cfg, const Matrix& pool, Rng& rng) {
  check_pool(dict, cfg, pool);
  Index idx = 0;
  return draw(dict, cfg, pool, rng, idx);
}

SampleBatch sample_batch(const Dictionary& dict, const SamplerConfig& cfg, const Matrix& pool,
                         Index n, Rng& rng) {
  if (n < 1) throw ConfigError("sample_batch: n must be >= 1");
  check_pool(dict, cfg, pool);
  SampleBatch b;
  b.codings.reserve(static_cast<std::size_t>(n));
  b.latent.resize(n, dict.dim());
  for (Index i = 0; i < n; ++i) {
    Index idx = 0;
    Coding c = draw(dict, cfg, pool, rng, idx);
    b.latent.row(i) = reconstruct(dict, c).transpose();
    b.seed_indices.push_back(idx);
    b.codings.push_back(std::move(c));
  }
  return b;
}

SampleBatch sample_batch(const Dictionary& dict, const SamplerConfig& cfg, const Matrix& pool,
                         Index n) {
  Rng rng(cfg.seed);
  return sample_batch(dict, cfg, pool, n, rng);
}

}  // namespace lccgan
