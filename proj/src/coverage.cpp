#include "lccgan/coverage.hpp"

#include "lccgan/error.hpp"
#include "lccgan/kmeans.hpp"

namespace lccgan {

CoverageReport mode_coverage(const Matrix& samples, const Matrix& centers, double radius,
                             double threshold) {
  if (centers.rows() == 0) throw DimensionError("mode_coverage: no centers");
  if (!(radius > 0.0)) throw ConfigError("mode_coverage: radius must be > 0");
  if (samples.cols() != centers.cols()) throw DimensionError("mode_coverage: dimension mismatch");
  CoverageReport r;
  r.modes = centers.rows();
  r.radius = radius;
  r.threshold = threshold;
  r.histogram.assign(static_cast<std::size_t>(r.modes), 0);
  for (Index i = 0; i < samples.rows(); ++i) {
    const Index j = nearest_row(centers, samples.row(i));
    if ((centers.row(j) - samples.row(i)).squaredNorm() <= radius * radius)
      ++r.histogram[static_cast<std::size_t>(j)];
    else
      ++r.unassigned;
  }
  const double need = threshold * static_cast<double>(samples.rows());
  for (Index c : r.histogram)
    if (c > 0 && static_cast<double>(c) >= need) ++r.covered;
  return r;
}

Json coverage_to_json(const CoverageReport& r) {
  return Json{{"covered", r.covered},     {"modes", r.modes},
              {"histogram", r.histogram}, {"unassigned", r.unassigned},
              {"threshold", r.threshold}, {"radius", r.radius}};
}

}  // namespace lccgan
