#pragma once

#include <string>
#include <vector>

#include "lccgan/rng.hpp"
#include "lccgan/types.hpp"

namespace lccgan {

struct KMeansResult {
  Matrix centroids;               // k x d
  std::vector<Index> assignment;  // per point
  std::vector<std::string> log;   // re-seeded clusters
};

/// Index of the nearest row of `centers` to `point`; ties go to the lower index.
template <class DerivedC, class DerivedP>
Index nearest_row(const Eigen::MatrixBase<DerivedC>& centers, const Eigen::MatrixBase<DerivedP>& point) {
  Index best = 0;
  double best_d = (centers.row(0) - point).squaredNorm();
  for (Index k = 1; k < centers.rows(); ++k) {
    const double d = (centers.row(k) - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

/// Lloyd iterations from k-means++ seeding. An empty cluster is re-seeded
/// from a uniformly drawn data point and noted in the log.
KMeansResult kmeans(const Matrix& points, Index k, int iterations, Rng& rng);

}  // namespace lccgan
