#pragma once

#include <cstdint>

#include "lccgan/types.hpp"

namespace lccgan {

struct MsSsimOptions {
  int scales = 5;
  double dynamic_range = 2.0;  // images in [-1, 1]
  int window = 11;
  double sigma = 1.5;
};

struct MsSsimResult {
  double value = 0.0;
  int scales_used = 0;
  bool fallback = false;  // image smaller than the window: single scale, reduced window
  int window = 0;
};

/// Multi-scale structural similarity of two equal square images.
MsSsimResult ms_ssim_detail(const Matrix& a, const Matrix& b, const MsSsimOptions& opts = {});
double ms_ssim(const Matrix& a, const Matrix& b, const MsSsimOptions& opts = {});

/// Mean MS-SSIM over random distinct pairs; each row of `samples` is a
/// flattened side x side image (row-major).
double diversity_msssim(const Matrix& samples, Index side, Index n_pairs, std::uint64_t seed,
                        const MsSsimOptions& opts = {});

/// Row `i` of `samples` reshaped to a side x side image.
Matrix as_image(const Matrix& samples, Index i, Index side);

}  // namespace lccgan
