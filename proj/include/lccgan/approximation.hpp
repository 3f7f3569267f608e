#pragma once

#include <vector>

#include "lccgan/checkpoint.hpp"
#include "lccgan/lcc.hpp"
#include "lccgan/lipschitz.hpp"

namespace lccgan {

/// Mean of L_h |h - r(h)| + L_G sum_j |gamma_j| |v_j - r(h)|^2 over the codings.
/// Row i of `points` is h for coding i.
double generative_quality(const Dictionary& dict, const Matrix& points,
                          const std::vector<Coding>& codings, double lipschitz_h,
                          double lipschitz_g);
/// Same with h := V gamma (sampled codings), so only the locality term remains.
double generative_quality(const Dictionary& dict, const std::vector<Coding>& codings,
                          double lipschitz_h, double lipschitz_g);

struct LemmaReport {
  Index count = 0;
  Index holds = 0;
  double holds_fraction = 0.0;
  double min_margin = 0.0;   // min over codings of rhs - lhs
  double mean_margin = 0.0;
  double max_lhs = 0.0;
  double tolerance = 0.0;    // absolute slack allowed for rounding
  std::vector<double> lhs;
  std::vector<double> rhs;
};

inline constexpr double kLemmaTolerance = 1e-12;

/// |G(sum gamma v) - sum gamma G(v)| <= 2 L_h |h - r(h)| + L_G sum |gamma| |v - r(h)|^2.
LemmaReport check_lemma1(const NetworkParams& generator, const Dictionary& dict,
                         const Matrix& points, const std::vector<Coding>& codings,
                         const LipschitzEstimate& lip);

/// |D(G(h)) - D(sum gamma G(v))| <= L_x L_h |h - r(h)| + L_x L_G sum |gamma| |v - r(h)|^2.
LemmaReport check_lemma2(const NetworkParams& discriminator, const NetworkParams& generator,
                         const Dictionary& dict, const Matrix& points,
                         const std::vector<Coding>& codings, const LipschitzEstimate& lip);

Json lemma_to_json(const LemmaReport& r);

}  // namespace lccgan
