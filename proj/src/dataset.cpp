#include "lccgan/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

#include "lccgan/error.hpp"
#include "lccgan/rng.hpp"

namespace lccgan {

std::string to_string(ManifoldKind k) {
  switch (k) {
    case ManifoldKind::ring_of_gaussians: return "ring_of_gaussians";
    case ManifoldKind::swiss_roll: return "swiss_roll";
    case ManifoldKind::two_circles: return "two_circles";
  }
  return "ring_of_gaussians";
}

ManifoldKind parse_manifold_kind(const std::string& name) {
  if (name == "ring_of_gaussians") return ManifoldKind::ring_of_gaussians;
  if (name == "swiss_roll") return ManifoldKind::swiss_roll;
  if (name == "two_circles") return ManifoldKind::two_circles;
  throw ConfigError("unknown manifold kind '" + name + "'");
}

void ManifoldSpec::validate() const {
  if (intrinsic_dim < 1 || intrinsic_dim > ambient_dim)
    throw ConfigError("intrinsic_dim must lie in [1, ambient_dim]");
  switch (kind) {
    case ManifoldKind::ring_of_gaussians:
      if (ambient_dim < 2) throw ConfigError("ring_of_gaussians needs ambient_dim >= 2");
      if (modes < 1) throw ConfigError("ring_of_gaussians needs at least one mode");
      if (sigma < 0.0 || radius < 0.0) throw ConfigError("ring radius and sigma must be >= 0");
      break;
    case ManifoldKind::swiss_roll:
      if (ambient_dim < 3) throw ConfigError("swiss_roll needs ambient_dim >= 3");
      if (noise < 0.0) throw ConfigError("noise must be >= 0");
      break;
    case ManifoldKind::two_circles:
      if (ambient_dim < 2) throw ConfigError("two_circles needs ambient_dim >= 2");
      if (noise < 0.0) throw ConfigError("noise must be >= 0");
      break;
  }
}

ManifoldSpec ManifoldSpec::ring(int modes, double radius, double sigma, std::uint64_t seed) {
  ManifoldSpec s;
  s.kind = ManifoldKind::ring_of_gaussians;
  s.ambient_dim = 2;
  s.intrinsic_dim = 1;
  s.modes = modes;
  s.radius = radius;
  s.sigma = sigma;
  s.seed = seed;
  return s;
}

ManifoldSpec ManifoldSpec::swiss_roll(double noise, std::uint64_t seed) {
  ManifoldSpec s;
  s.kind = ManifoldKind::swiss_roll;
  s.ambient_dim = 3;
  s.intrinsic_dim = 2;
  s.noise = noise;
  s.seed = seed;
  return s;
}

ManifoldSpec ManifoldSpec::two_circles(double noise, std::uint64_t seed) {
  ManifoldSpec s;
  s.kind = ManifoldKind::two_circles;
  s.ambient_dim = 2;
  s.intrinsic_dim = 1;
  s.noise = noise;
  s.seed = seed;
  return s;
}

Matrix ManifoldSpec::mode_centers() const {
  if (kind != ManifoldKind::ring_of_gaussians) return {};
  Matrix c = Matrix::Zero(modes, ambient_dim);
  for (int k = 0; k < modes; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / modes;
    c(k, 0) = radius * std::cos(angle);
    c(k, 1) = radius * std::sin(angle);
  }
  return c;
}

void Dataset::validate() const {
  if (samples.rows() < 1) throw DimensionError("dataset '" + name + "' is empty");
  if (!samples.allFinite()) throw DimensionError("dataset '" + name + "' has non-finite entries");
  if (!labels.empty() && static_cast<Index>(labels.size()) != samples.rows())
    throw DimensionError("dataset '" + name + "' label count differs from sample count");
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
  Dataset out;
  out.name = name;
  out.normalization = normalization;
  out.samples.resize(static_cast<Index>(rows.size()), samples.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.samples.row(static_cast<Index>(i)) = samples.row(rows[i]);
    if (!labels.empty()) out.labels.push_back(labels[static_cast<std::size_t>(rows[i])]);
  }
  return out;
}

Dataset generate(const ManifoldSpec& spec, Index n) {
  spec.validate();
  if (n < 1) throw ConfigError("generate: n must be >= 1");
  Rng rng(spec.seed);
  Dataset ds;
  ds.name = to_string(spec.kind);
  ds.samples = Matrix::Zero(n, spec.ambient_dim);
  ds.labels.resize(static_cast<std::size_t>(n));
  switch (spec.kind) {
    case ManifoldKind::ring_of_gaussians: {
      const Matrix centers = spec.mode_centers();
      for (Index i = 0; i < n; ++i) {
        const auto k = static_cast<Index>(rng.index(static_cast<std::uint64_t>(spec.modes)));
        const double dx = rng.normal();
        const double dy = rng.normal();
        ds.samples(i, 0) = centers(k, 0) + spec.sigma * dx;
        ds.samples(i, 1) = centers(k, 1) + spec.sigma * dy;
        ds.labels[static_cast<std::size_t>(i)] = static_cast<int>(k);
      }
      break;
    }
    case ManifoldKind::swiss_roll: {
      // t in [1.5 pi, 4.5 pi], height in [0, 21]: (t cos t, y, t sin t).
      for (Index i = 0; i < n; ++i) {
        const double t = 1.5 * std::numbers::pi * (1.0 + 2.0 * rng.uniform());
        const double y = 21.0 * rng.uniform();
        const double e0 = rng.normal(), e1 = rng.normal(), e2 = rng.normal();
        ds.samples(i, 0) = t * std::cos(t) + spec.noise * e0;
        ds.samples(i, 1) = y + spec.noise * e1;
        ds.samples(i, 2) = t * std::sin(t) + spec.noise * e2;
        ds.labels[static_cast<std::size_t>(i)] = 0;
      }
      ds.labels.clear();
      break;
    }
    case ManifoldKind::two_circles: {
      // Outer circle radius 1, inner circle radius 0.5.
      for (Index i = 0; i < n; ++i) {
        const int which = static_cast<int>(rng.index(2));
        const double r = which == 0 ? 1.0 : 0.5;
        const double angle = 2.0 * std::numbers::pi * rng.uniform();
        const double e0 = rng.normal(), e1 = rng.normal();
        ds.samples(i, 0) = r * std::cos(angle) + spec.noise * e0;
        ds.samples(i, 1) = r * std::sin(angle) + spec.noise * e1;
        ds.labels[static_cast<std::size_t>(i)] = which;
      }
      break;
    }
  }
  return ds;
}

Matrix apply_normalization(const Normalization& norm, const Matrix& x) {
  if (x.cols() != norm.shift.size()) throw DimensionError("normalization feature count mismatch");
  Matrix y = (x.rowwise() - norm.shift).array().rowwise() / norm.scale.array();
  return y;
}

Matrix invert_normalization(const Normalization& norm, const Matrix& x) {
  if (x.cols() != norm.shift.size()) throw DimensionError("normalization feature count mismatch");
  Matrix y = (x.array().rowwise() * norm.scale.array()).matrix().rowwise() + norm.shift;
  return y;
}

Dataset normalize(const Dataset& ds) {
  ds.validate();
  if (ds.normalization) return ds;
  const RowVector lo = ds.samples.colwise().minCoeff();
  const RowVector hi = ds.samples.colwise().maxCoeff();
  Normalization norm;
  norm.shift = 0.5 * (lo + hi);
  norm.scale = 0.5 * (hi - lo);
  for (Index j = 0; j < norm.scale.size(); ++j)
    if (norm.scale(j) <= 0.0) norm.scale(j) = 1.0;
  Dataset out = ds;
  out.samples = apply_normalization(norm, ds.samples).cwiseMax(-1.0).cwiseMin(1.0);
  out.normalization = norm;
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("split: train_fraction must lie strictly between 0 and 1");
  const Index n = ds.size();
  const auto n_train = static_cast<Index>(std::llround(static_cast<double>(n) * train_fraction));
  if (n_train < 1 || n_train >= n)
    throw ConfigError("split: fraction leaves one side empty for N = " + std::to_string(n));
  Rng rng(seed);
  const auto perm = rng.permutation(n);
  std::vector<Index> a(perm.begin(), perm.begin() + n_train);
  std::vector<Index> b(perm.begin() + n_train, perm.end());
  return {ds.subset(a), ds.subset(b)};
}

void write_csv(const std::filesystem::path& path, const Matrix& rows,
               const std::vector<std::string>& header) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  if (!header.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
    f << '\n';
  }
  char buf[40];
  for (Index i = 0; i < rows.rows(); ++i) {
    for (Index j = 0; j < rows.cols(); ++j) {
      auto res = std::to_chars(buf, buf + sizeof buf, rows(i, j), std::chars_format::general, 17);
      if (j) f << ',';
      f.write(buf, res.ptr - buf);
    }
    f << '\n';
  }
  if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace lccgan
