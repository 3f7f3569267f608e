#pragma once

#include <vector>

#include "lccgan/checkpoint.hpp"
#include "lccgan/types.hpp"

namespace lccgan {

struct CoverageReport {
  Index covered = 0;
  Index modes = 0;
  std::vector<Index> histogram;  // samples within radius of each (nearest) center
  Index unassigned = 0;          // samples farther than radius from every center
  double threshold = 0.01;       // fraction of samples a mode needs to count as covered
  double radius = 0.0;
};

/// Assigns each sample to its nearest center; a mode is covered when at least
/// `threshold` of all samples land within `radius` of it.
CoverageReport mode_coverage(const Matrix& samples, const Matrix& centers, double radius,
                             double threshold = 0.01);

Json coverage_to_json(const CoverageReport& r);

}  // namespace lccgan
