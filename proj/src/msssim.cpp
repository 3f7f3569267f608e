#include "lccgan/msssim.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "lccgan/error.hpp"
#include "lccgan/rng.hpp"

namespace lccgan {

namespace {

constexpr std::array<double, 5> kScaleWeights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

Vector gaussian_kernel(int size, double sigma) {
  Vector k(size);
  const double c = (size - 1) / 2.0;
  for (int i = 0; i < size; ++i) k(i) = std::exp(-((i - c) * (i - c)) / (2.0 * sigma * sigma));
  return k / k.sum();
}

// Separable valid-mode filtering.
Matrix filter(const Matrix& img, const Vector& k) {
  const Index w = k.size();
  const Index out = img.rows() - w + 1;
  Matrix tmp = Matrix::Zero(out, img.cols());
  for (Index i = 0; i < out; ++i)
    for (Index t = 0; t < w; ++t) tmp.row(i) += k(t) * img.row(i + t);
  Matrix res = Matrix::Zero(out, out);
  for (Index j = 0; j < out; ++j)
    for (Index t = 0; t < w; ++t) res.col(j) += k(t) * tmp.col(j + t);
  return res;
}

Matrix downsample(const Matrix& img) {
  const Index n = img.rows() / 2;
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      out(i, j) = 0.25 * (img(2 * i, 2 * j) + img(2 * i + 1, 2 * j) + img(2 * i, 2 * j + 1) +
                          img(2 * i + 1, 2 * j + 1));
  return out;
}

struct ScaleStats {
  double cs;    // mean contrast-structure term
  double ssim;  // mean luminance * contrast-structure
};

// Every expression is symmetric in a and b term by term, so swapping the
// arguments and a == b both give bitwise-reproducible results.
ScaleStats scale_stats(const Matrix& a, const Matrix& b, const Vector& k, double c1, double c2) {
  const Matrix mu_a = filter(a, k);
  const Matrix mu_b = filter(b, k);
  const Matrix e_aa = filter(a.cwiseProduct(a), k);
  const Matrix e_bb = filter(b.cwiseProduct(b), k);
  const Matrix e_ab = filter(a.cwiseProduct(b), k);
  double cs = 0.0, ssim = 0.0;
  const Index n = mu_a.size();
  for (Index i = 0; i < mu_a.rows(); ++i)
    for (Index j = 0; j < mu_a.cols(); ++j) {
      const double ma = mu_a(i, j), mb = mu_b(i, j);
      const double ma2 = ma * ma, mb2 = mb * mb, mab = ma * mb;
      const double va = e_aa(i, j) - ma2;
      const double vb = e_bb(i, j) - mb2;
      const double cov = e_ab(i, j) - mab;
      const double l = (2.0 * mab + c1) / (ma2 + mb2 + c1);
      const double s = (2.0 * cov + c2) / (va + vb + c2);
      cs += s;
      ssim += l * s;
    }
  return {cs / static_cast<double>(n), ssim / static_cast<double>(n)};
}

}  // namespace

MsSsimResult ms_ssim_detail(const Matrix& a, const Matrix& b, const MsSsimOptions& opts) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw DimensionError("ms_ssim: images must be equal squares");
  if (a.rows() < 2) throw DimensionError("ms_ssim: image too small");
  if (opts.scales < 1 || opts.scales > 5) throw ConfigError("ms_ssim: scales must be in 1..5");
  if (opts.window < 3 || opts.window % 2 == 0) throw ConfigError("ms_ssim: window must be odd >= 3");

  const double c1 = std::pow(0.01 * opts.dynamic_range, 2);
  const double c2 = std::pow(0.03 * opts.dynamic_range, 2);
  MsSsimResult res;

  const Index side = a.rows();
  if (side < opts.window) {
    const int w = static_cast<int>(side % 2 == 1 ? side : side - 1);
    const Vector k = gaussian_kernel(w, opts.sigma * w / opts.window);
    res.value = std::clamp(scale_stats(a, b, k, c1, c2).ssim, 0.0, 1.0);
    res.scales_used = 1;
    res.fallback = true;
    res.window = w;
    return res;
  }

  int usable = 0;
  for (Index s = side; usable < opts.scales && s >= opts.window; s /= 2) ++usable;
  double wsum = 0.0;
  for (int i = 0; i < usable; ++i) wsum += kScaleWeights[static_cast<std::size_t>(i)];

  const Vector k = gaussian_kernel(opts.window, opts.sigma);
  Matrix x = a, y = b;
  double value = 1.0;
  for (int i = 0; i < usable; ++i) {
    const ScaleStats st = scale_stats(x, y, k, c1, c2);
    const double term = std::clamp(i + 1 == usable ? st.ssim : st.cs, 0.0, 1.0);
    value *= std::pow(term, kScaleWeights[static_cast<std::size_t>(i)] / wsum);
    if (i + 1 < usable) {
      x = downsample(x);
      y = downsample(y);
    }
  }
  res.value = std::clamp(value, 0.0, 1.0);
  res.scales_used = usable;
  res.window = opts.window;
  return res;
}

double ms_ssim(const Matrix& a, const Matrix& b, const MsSsimOptions& opts) {
  return ms_ssim_detail(a, b, opts).value;
}

Matrix as_image(const Matrix& samples, Index i, Index side) {
  if (samples.cols() != side * side) throw DimensionError("as_image: row length is not side^2");
  Matrix img(side, side);
  for (Index r = 0; r < side; ++r) img.row(r) = samples.block(i, r * side, 1, side);
  return img;
}

double diversity_msssim(const Matrix& samples, Index side, Index n_pairs, std::uint64_t seed,
                        const MsSsimOptions& opts) {
  if (samples.rows() < 2) throw DimensionError("diversity_msssim: need at least two samples");
  if (n_pairs < 1) throw ConfigError("diversity_msssim: n_pairs must be >= 1");
  Rng rng(seed);
  const auto n = static_cast<std::uint64_t>(samples.rows());
  double total = 0.0;
  for (Index p = 0; p < n_pairs; ++p) {
    const auto i = rng.index(n);
    auto j = rng.index(n - 1);
    if (j >= i) ++j;
    total += ms_ssim(as_image(samples, static_cast<Index>(i), side),
                     as_image(samples, static_cast<Index>(j), side), opts);
  }
  return total / static_cast<double>(n_pairs);
}

}  // namespace lccgan
