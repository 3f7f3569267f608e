#pragma once

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lccgan/checkpoint.hpp"
#include "lccgan/rng.hpp"
#include "lccgan/types.hpp"

namespace lccgan {

// Anchor set C stored as the basis matrix V (d_B x M); column j is anchor v_j.
// L_h and L_G weight the two terms of the coding objective.
struct Dictionary {
  Matrix basis;
  double lipschitz_h = 1.0;
  double lipschitz_g = 1.0;

  Dictionary() = default;
  Dictionary(Matrix basis, double lipschitz_h, double lipschitz_g);

  Index size() const { return basis.cols(); }
  Index dim() const { return basis.rows(); }
  auto anchor(Index j) const { return basis.col(j); }
  /// Anchors as rows (M x d_B).
  Matrix anchors() const { return basis.transpose(); }

  /// M >= 2, finite, pairwise distinct columns, positive weights.
  void validate() const;
};

enum class CodingOrigin { optimized, sampled };

// One coding gamma(h). Entries outside `support` are exactly zero.
struct Coding {
  Vector gamma;
  std::vector<Index> support;
  CodingOrigin origin = CodingOrigin::optimized;
  bool converged = true;
  int iterations = 0;

  static Coding from_dense(Vector gamma, CodingOrigin origin);
  void validate() const;
};

/// r = V * gamma for any pair of Eigen expressions.
template <class DerivedV, class DerivedG>
auto reconstruct(const Eigen::MatrixBase<DerivedV>& basis, const Eigen::MatrixBase<DerivedG>& gamma) {
  return (basis * gamma).eval();
}

Vector reconstruct(const Dictionary& dict, const Coding& coding);
/// Row i is V * gamma_i.
Matrix reconstruct_all(const Dictionary& dict, const std::vector<Coding>& codings);
/// Stack the codings as rows (N x M).
Matrix coding_matrix(const std::vector<Coding>& codings, Index m);

/// Per-point coding objective with squared residual:
///   2 L_h ||h - V g||^2 + L_G sum_j |g_j| ||v_j - h||^2
template <class DerivedV, class DerivedH, class DerivedG>
double point_objective(const Eigen::MatrixBase<DerivedV>& basis, const Eigen::MatrixBase<DerivedH>& h,
                       const Eigen::MatrixBase<DerivedG>& gamma, double lipschitz_h,
                       double lipschitz_g) {
  const double residual = (h - basis * gamma).squaredNorm();
  double locality = 0.0;
  for (Index j = 0; j < basis.cols(); ++j)
    if (gamma(j) != 0.0) locality += std::abs(gamma(j)) * (basis.col(j) - h).squaredNorm();
  return 2.0 * lipschitz_h * residual + lipschitz_g * locality;
}

/// Sum of point_objective over the rows of H (N x d_B).
double objective(const Dictionary& dict, const Matrix& points, const std::vector<Coding>& codings);
/// Same with the unsquared residual 2 L_h ||h - r(h)||.
double objective_unsquared(const Dictionary& dict, const Matrix& points,
                           const std::vector<Coding>& codings);

struct CodingOptions {
  int max_iterations = 2000;
  double tolerance = 1e-10;  // max-abs change between iterates
};

// Reusable per-dictionary quantities for coding many points.
class CodingSolver {
 public:
  CodingSolver(const Dictionary& dict, CodingOptions options = {});

  /// Minimises the coding objective subject to sum(gamma) = 1. `warm` must
  /// have length M; it is projected onto the constraint before use.
  Coding solve(const Vector& h, const std::optional<Vector>& warm = std::nullopt) const;

 private:
  const Dictionary* dict_;
  CodingOptions options_;
  Matrix gram_;  // V^T V
  double step_;  // 1 / Lipschitz constant of the smooth gradient
};

Coding code_point(const Dictionary& dict, const Vector& h, const CodingOptions& options = {});

/// argmin_g 0.5 ||g - y||^2 + sum_j thresholds_j |g_j|  s.t.  sum(g) = 1, solved exactly.
Vector prox_weighted_l1_affine(const Vector& y, const Vector& thresholds);

/// Indices of the k nearest anchors to `point` by Euclidean distance, nearest
/// first; equal distances go to the lower index.
std::vector<Index> nearest_anchors(const Dictionary& dict, const Vector& point, Index k);

struct LearnOptions {
  Index anchors = 16;
  double lipschitz_h = 1.0;
  double lipschitz_g = 1.0;
  int outer_iterations = 20;
  int kmeans_iterations = 20;
  double ridge = 1e-8;
  std::uint64_t seed = 0;
  CodingOptions coding;
};

struct LccResult {
  Dictionary dict;
  std::vector<Coding> codings;               // one per row of H, for the final dictionary
  std::vector<double> objective_trace;       // after each outer iteration
  std::vector<double> unsquared_trace;       // unsquared-residual objective, same points
  std::vector<std::string> log;
  std::size_t unconverged = 0;               // codings that hit max_iterations in the last pass
};

/// k-means initialised alternating minimisation: anchor update by ridge-damped
/// normal equations, then a warm-started coding pass, outer_iterations times.
LccResult learn_dictionary(const Matrix& points, const LearnOptions& options);

/// Solves for the anchors with codings fixed (exposed for testing).
Matrix update_anchors(const Matrix& points, const Matrix& gammas, const Matrix& previous_basis,
                      double lipschitz_h, double lipschitz_g, double ridge);

/// Fraction of codings whose top-d |gamma| anchors all lie among the 2d
/// nearest anchors of the point.
double locality_fraction(const Dictionary& dict, const Matrix& points,
                         const std::vector<Coding>& codings, Index d);

/// Mean of ||h_i - r(h_i)|| over the rows.
double mean_reconstruction_error(const Dictionary& dict, const Matrix& points,
                                 const std::vector<Coding>& codings);

Json dictionary_to_json(const Dictionary& dict);
Dictionary dictionary_from_json(const Json& j);

/// Sparse triplets "point,anchor,weight" for every nonzero entry.
void write_codings_csv(const std::filesystem::path& path, const std::vector<Coding>& codings);

}  // namespace lccgan
