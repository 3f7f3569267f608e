#include "lccgan/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lccgan/error.hpp"

namespace lccgan {

namespace {

void check_inputs(const Dictionary& dict, const Matrix& points, const std::vector<Coding>& codings) {
  if (codings.empty()) throw DimensionError("approximation: no codings");
  if (points.rows() != static_cast<Index>(codings.size()))
    throw DimensionError("approximation: one point per coding required");
  if (points.cols() != dict.dim()) throw DimensionError("approximation: point dimension differs from d_B");
  for (const auto& c : codings)
    if (c.gamma.size() != dict.size()) throw DimensionError("approximation: coding length differs from M");
}

struct Terms {
  double residual;  // |h - r(h)|
  double locality;  // sum |gamma| |v - r(h)|^2
};

Terms terms(const Dictionary& dict, const Vector& h, const Coding& c, const Vector& r) {
  double loc = 0.0;
  for (Index j = 0; j < c.gamma.size(); ++j)
    if (c.gamma(j) != 0.0) loc += std::abs(c.gamma(j)) * (dict.anchor(j) - r).squaredNorm();
  return {(h - r).norm(), loc};
}

LemmaReport finish(std::vector<double> lhs, std::vector<double> rhs) {
  LemmaReport rep;
  rep.count = static_cast<Index>(lhs.size());
  rep.tolerance = kLemmaTolerance;
  rep.min_margin = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double margin = rhs[i] - lhs[i];
    if (lhs[i] <= rhs[i] + kLemmaTolerance) ++rep.holds;
    rep.min_margin = std::min(rep.min_margin, margin);
    rep.max_lhs = std::max(rep.max_lhs, lhs[i]);
    total += margin;
  }
  rep.holds_fraction = static_cast<double>(rep.holds) / static_cast<double>(rep.count);
  rep.mean_margin = total / static_cast<double>(rep.count);
  rep.lhs = std::move(lhs);
  rep.rhs = std::move(rhs);
  return rep;
}

// Row i: sum_j gamma_ij G(v_j).
Matrix combined_images(const Matrix& anchor_images, const std::vector<Coding>& codings) {
  Matrix out = Matrix::Zero(static_cast<Index>(codings.size()), anchor_images.cols());
  for (std::size_t i = 0; i < codings.size(); ++i) {
    const Vector& g = codings[i].gamma;
    for (Index j = 0; j < g.size(); ++j)
      if (g(j) != 0.0) out.row(static_cast<Index>(i)) += g(j) * anchor_images.row(j);
  }
  return out;
}

}  // namespace

double generative_quality(const Dictionary& dict, const Matrix& points,
                          const std::vector<Coding>& codings, double lipschitz_h,
                          double lipschitz_g) {
  check_inputs(dict, points, codings);
  double total = 0.0;
  for (std::size_t i = 0; i < codings.size(); ++i) {
    const Vector r = reconstruct(dict, codings[i]);
    const Terms t = terms(dict, points.row(static_cast<Index>(i)).transpose(), codings[i], r);
    total += lipschitz_h * t.residual + lipschitz_g * t.locality;
  }
  return total / static_cast<double>(codings.size());
}

double generative_quality(const Dictionary& dict, const std::vector<Coding>& codings,
                          double lipschitz_h, double lipschitz_g) {
  if (codings.empty()) throw DimensionError("approximation: no codings");
  return generative_quality(dict, reconstruct_all(dict, codings), codings, lipschitz_h, lipschitz_g);
}

LemmaReport check_lemma1(const NetworkParams& generator, const Dictionary& dict,
                         const Matrix& points, const std::vector<Coding>& codings,
                         const LipschitzEstimate& lip) {
  check_inputs(dict, points, codings);
  const Matrix r = reconstruct_all(dict, codings);
  const Matrix g_r = forward(generator, r);
  const Matrix mixed = combined_images(forward(generator, dict.anchors()), codings);

  std::vector<double> lhs, rhs;
  for (std::size_t i = 0; i < codings.size(); ++i) {
    const Index row = static_cast<Index>(i);
    const Terms t = terms(dict, points.row(row).transpose(), codings[i], r.row(row).transpose());
    lhs.push_back((g_r.row(row) - mixed.row(row)).norm());
    rhs.push_back(2.0 * lip.L_h * t.residual + lip.L_G * t.locality);
  }
  return finish(std::move(lhs), std::move(rhs));
}

LemmaReport check_lemma2(const NetworkParams& discriminator, const NetworkParams& generator,
                         const Dictionary& dict, const Matrix& points,
                         const std::vector<Coding>& codings, const LipschitzEstimate& lip) {
  check_inputs(dict, points, codings);
  const Matrix r = reconstruct_all(dict, codings);
  const Matrix d_gh = forward(discriminator, forward(generator, points));
  const Matrix mixed = combined_images(forward(generator, dict.anchors()), codings);
  const Matrix d_mixed = forward(discriminator, mixed);

  std::vector<double> lhs, rhs;
  for (std::size_t i = 0; i < codings.size(); ++i) {
    const Index row = static_cast<Index>(i);
    const Terms t = terms(dict, points.row(row).transpose(), codings[i], r.row(row).transpose());
    lhs.push_back(std::abs(d_gh(row, 0) - d_mixed(row, 0)));
    rhs.push_back(lip.L_x * lip.L_h * t.residual + lip.L_x * lip.L_G * t.locality);
  }
  return finish(std::move(lhs), std::move(rhs));
}

Json lemma_to_json(const LemmaReport& r) {
  return Json{{"count", r.count},           {"holds", r.holds},
              {"holds_fraction", r.holds_fraction}, {"min_margin", r.min_margin},
              {"mean_margin", r.mean_margin}, {"max_lhs", r.max_lhs},
              {"tolerance", r.tolerance}};
}

}  // namespace lccgan
