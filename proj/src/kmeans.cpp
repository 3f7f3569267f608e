#include "lccgan/kmeans.hpp"

#include "lccgan/error.hpp"

namespace lccgan {
namespace {

Matrix plus_plus_seeds(const Matrix& x, Index k, Rng& rng) {
  const Index n = x.rows();
  Matrix c(k, x.cols());
  c.row(0) = x.row(static_cast<Index>(rng.index(static_cast<std::uint64_t>(n))));
  Vector d2 = (x.rowwise() - c.row(0)).rowwise().squaredNorm();
  for (Index j = 1; j < k; ++j) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc > target && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.index(static_cast<std::uint64_t>(n)));
    }
    c.row(j) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - c.row(j)).rowwise().squaredNorm());
  }
  return c;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, Index k, int iterations, Rng& rng) {
  if (k < 1 || k > points.rows()) throw ConfigError("kmeans: need 1 <= k <= number of points");
  KMeansResult r;
  r.centroids = plus_plus_seeds(points, k, rng);
  r.assignment.assign(static_cast<std::size_t>(points.rows()), 0);
  for (int it = 0; it < iterations; ++it) {
    for (Index i = 0; i < points.rows(); ++i)
      r.assignment[static_cast<std::size_t>(i)] = nearest_row(r.centroids, points.row(i));
    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < points.rows(); ++i) {
      const Index a = r.assignment[static_cast<std::size_t>(i)];
      sums.row(a) += points.row(i);
      ++counts[static_cast<std::size_t>(a)];
    }
    for (Index j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] == 0) {
        const auto pick = static_cast<Index>(rng.index(static_cast<std::uint64_t>(points.rows())));
        r.centroids.row(j) = points.row(pick);
        r.log.push_back("iteration " + std::to_string(it) + ": cluster " + std::to_string(j) +
                        " empty, re-seeded from point " + std::to_string(pick));
      } else {
        r.centroids.row(j) = sums.row(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
      }
    }
  }
  for (Index i = 0; i < points.rows(); ++i)
    r.assignment[static_cast<std::size_t>(i)] = nearest_row(r.centroids, points.row(i));
  return r;
}

}  // namespace lccgan
