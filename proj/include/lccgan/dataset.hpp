#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lccgan/types.hpp"

namespace lccgan {

enum class ManifoldKind { ring_of_gaussians, swiss_roll, two_circles };

std::string to_string(ManifoldKind k);
ManifoldKind parse_manifold_kind(const std::string& name);

// Synthetic data manifold. Ring points live in the first two coordinates,
// the swiss roll in the first three; further ambient coordinates are zero.
struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::ring_of_gaussians;
  Index ambient_dim = 2;
  Index intrinsic_dim = 1;
  std::uint64_t seed = 0;

  int modes = 8;         // ring
  double radius = 2.0;   // ring
  double sigma = 0.05;   // ring, per-coordinate std of each mode
  double noise = 0.0;    // swiss roll / circles

  // c_M of the manifold, if known. Descriptive only.
  std::optional<double> curvature_constant;

  void validate() const;

  static ManifoldSpec ring(int modes, double radius, double sigma, std::uint64_t seed);
  static ManifoldSpec swiss_roll(double noise, std::uint64_t seed);
  static ManifoldSpec two_circles(double noise, std::uint64_t seed);

  /// Ring mode centres (modes x ambient_dim). Empty for other kinds.
  Matrix mode_centers() const;
};

/// Affine map x' = (x - shift) / scale, per feature.
struct Normalization {
  RowVector shift;
  RowVector scale;
};

struct Dataset {
  Matrix samples;            // N x d
  std::vector<int> labels;   // empty or N entries
  std::string name;
  std::optional<Normalization> normalization;

  Index size() const { return samples.rows(); }
  Index dim() const { return samples.cols(); }

  /// Throws DimensionError on N == 0, non-finite entries or label count mismatch.
  void validate() const;
  Dataset subset(const std::vector<Index>& rows) const;
};

/// n points of the manifold; a pure function of (spec, n).
Dataset generate(const ManifoldSpec& spec, Index n);

/// Min-max scaling of every feature into [-1, 1]. Already-normalised
/// datasets are returned unchanged.
Dataset normalize(const Dataset& ds);
Matrix apply_normalization(const Normalization& norm, const Matrix& x);
Matrix invert_normalization(const Normalization& norm, const Matrix& x);

/// Disjoint shuffled partition. 0 < train_fraction < 1, both parts non-empty.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed);

void write_csv(const std::filesystem::path& path, const Matrix& rows,
               const std::vector<std::string>& header = {});

// IDX (big-endian) ingestion.
inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Reads an IDX image file (and optionally its label file), mean-pools each
/// image to side x side by area weighting, maps [0,255] to [-1,1] and
/// flattens row-major. Wrong magic -> FormatError; short payload -> IoError.
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path, Index side);

/// Area-weighted mean pooling of a src_rows x src_cols image.
Matrix mean_pool(const Matrix& image, Index side);

void write_idx_images(const std::filesystem::path& path, const std::vector<std::uint8_t>& pixels,
                      std::uint32_t count, std::uint32_t rows, std::uint32_t cols);
void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels);

/// Handwriting-like 28x28 digit images rendered from a bitmap font with random
/// affine jitter and stroke width. Returns pixels (count*784) and labels.
std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> render_digits(std::uint32_t count,
                                                                              std::uint64_t seed);

}  // namespace lccgan
