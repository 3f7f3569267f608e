#include "lccgan/lcc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "lccgan/error.hpp"
#include "lccgan/kmeans.hpp"

namespace lccgan {

Dictionary::Dictionary(Matrix b, double lh, double lg)
    : basis(std::move(b)), lipschitz_h(lh), lipschitz_g(lg) {
  validate();
}

void Dictionary::validate() const {
  if (basis.cols() < 2) throw DimensionError("dictionary needs at least two anchors");
  if (basis.rows() < 1) throw DimensionError("dictionary anchors must have positive dimension");
  if (!basis.allFinite()) throw DimensionError("dictionary has non-finite anchors");
  if (!(lipschitz_h > 0.0) || !(lipschitz_g > 0.0))
    throw ConfigError("dictionary weights L_h and L_G must be positive");
  for (Index a = 0; a < basis.cols(); ++a)
    for (Index b = a + 1; b < basis.cols(); ++b)
      if ((basis.col(a) - basis.col(b)).norm() <= 1e-12)
        throw DimensionError("anchors " + std::to_string(a) + " and " + std::to_string(b) +
                             " coincide");
}

Coding Coding::from_dense(Vector gamma, CodingOrigin origin) {
  Coding c;
  c.gamma = std::move(gamma);
  c.origin = origin;
  for (Index j = 0; j < c.gamma.size(); ++j)
    if (c.gamma(j) != 0.0) c.support.push_back(j);
  return c;
}

void Coding::validate() const {
  if (static_cast<Index>(support.size()) > gamma.size())
    throw ContractError("coding support larger than M");
  std::vector<bool> in(static_cast<std::size_t>(gamma.size()), false);
  for (Index j : support) in[static_cast<std::size_t>(j)] = true;
  for (Index j = 0; j < gamma.size(); ++j)
    if (!in[static_cast<std::size_t>(j)] && gamma(j) != 0.0)
      throw ContractError("coding has a nonzero entry outside its support");
  if (origin == CodingOrigin::optimized && std::abs(gamma.sum() - 1.0) > 1e-9)
    throw ContractError("optimized coding does not sum to one");
}

Vector reconstruct(const Dictionary& dict, const Coding& coding) {
  if (coding.gamma.size() != dict.size())
    throw DimensionError("coding length " + std::to_string(coding.gamma.size()) +
                         " differs from anchor count " + std::to_string(dict.size()));
  return reconstruct(dict.basis, coding.gamma);
}

Matrix coding_matrix(const std::vector<Coding>& codings, Index m) {
  Matrix g(static_cast<Index>(codings.size()), m);
  for (std::size_t i = 0; i < codings.size(); ++i) {
    if (codings[i].gamma.size() != m) throw DimensionError("coding length differs from M");
    g.row(static_cast<Index>(i)) = codings[i].gamma.transpose();
  }
  return g;
}

Matrix reconstruct_all(const Dictionary& dict, const std::vector<Coding>& codings) {
  Matrix r(static_cast<Index>(codings.size()), dict.dim());
  for (std::size_t i = 0; i < codings.size(); ++i)
    r.row(static_cast<Index>(i)) = reconstruct(dict, codings[i]).transpose();
  return r;
}

namespace {

void check_points(const Dictionary& dict, const Matrix& points, const std::vector<Coding>& codings) {
  if (points.cols() != dict.dim()) throw DimensionError("points and anchors differ in dimension");
  if (static_cast<Index>(codings.size()) != points.rows())
    throw DimensionError("one coding per point required");
  for (const auto& c : codings)
    if (c.gamma.size() != dict.size()) throw DimensionError("coding length differs from M");
}

}  // namespace

double objective(const Dictionary& dict, const Matrix& points, const std::vector<Coding>& codings) {
  check_points(dict, points, codings);
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i)
    total += point_objective(dict.basis, points.row(i).transpose(),
                             codings[static_cast<std::size_t>(i)].gamma, dict.lipschitz_h,
                             dict.lipschitz_g);
  return total;
}

double objective_unsquared(const Dictionary& dict, const Matrix& points,
                           const std::vector<Coding>& codings) {
  check_points(dict, points, codings);
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    const Vector h = points.row(i).transpose();
    const Vector& g = codings[static_cast<std::size_t>(i)].gamma;
    double locality = 0.0;
    for (Index j = 0; j < g.size(); ++j)
      if (g(j) != 0.0) locality += std::abs(g(j)) * (dict.anchor(j) - h).squaredNorm();
    total += 2.0 * dict.lipschitz_h * (h - dict.basis * g).norm() + dict.lipschitz_g * locality;
  }
  return total;
}

Vector prox_weighted_l1_affine(const Vector& y, const Vector& thresholds) {
  const Index m = y.size();
  // g(mu) = sum_j soft(y_j - mu, t_j) is continuous, non-increasing and
  // piecewise linear with kinks at y_j -+ t_j; find g(mu) = 1.
  const auto g = [&](double mu) {
    double s = 0.0;
    for (Index j = 0; j < m; ++j) {
      const double a = y(j) - mu;
      if (a > thresholds(j))
        s += a - thresholds(j);
      else if (a < -thresholds(j))
        s += a + thresholds(j);
    }
    return s;
  };
  std::vector<double> kinks;
  kinks.reserve(static_cast<std::size_t>(2 * m));
  for (Index j = 0; j < m; ++j) {
    kinks.push_back(y(j) - thresholds(j));
    kinks.push_back(y(j) + thresholds(j));
  }
  std::sort(kinks.begin(), kinks.end());

  double mu;
  if (g(kinks.front()) <= 1.0) {
    // Every coordinate above its upper kink.
    mu = ((y - thresholds).sum() - 1.0) / static_cast<double>(m);
    mu = std::min(mu, kinks.front());
  } else if (g(kinks.back()) >= 1.0) {
    mu = ((y + thresholds).sum() - 1.0) / static_cast<double>(m);
    mu = std::max(mu, kinks.back());
  } else {
    // Invariant: g(kinks[lo]) > 1 >= g(kinks[hi]).
    std::size_t lo = 0, hi = kinks.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (g(kinks[mid]) > 1.0)
        lo = mid;
      else
        hi = mid;
    }
    const double glo = g(kinks[lo]);
    const double ghi = g(kinks[hi]);
    mu = kinks[lo] + (glo - 1.0) * (kinks[hi] - kinks[lo]) / (glo - ghi);
  }
  Vector out(m);
  for (Index j = 0; j < m; ++j) {
    const double a = y(j) - mu;
    out(j) = a > thresholds(j) ? a - thresholds(j) : (a < -thresholds(j) ? a + thresholds(j) : 0.0);
  }
  return out;
}

CodingSolver::CodingSolver(const Dictionary& dict, CodingOptions options)
    : dict_(&dict), options_(options) {
  dict.validate();
  gram_ = dict.basis.transpose() * dict.basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(gram_),
                                                     Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  step_ = 1.0 / (4.0 * dict.lipschitz_h * std::max(lmax, 1e-300));
}

namespace {

// Puts the rounding residue of sum(g) - 1 on the largest-magnitude entry.
void enforce_affine(Vector& g) {
  const double r = 1.0 - g.sum();
  if (r == 0.0) return;
  Index k;
  g.cwiseAbs().maxCoeff(&k);
  g(k) += r;
}

}  // namespace

Coding CodingSolver::solve(const Vector& h, const std::optional<Vector>& warm) const {
  const Dictionary& dict = *dict_;
  const Index m = dict.size();
  if (h.size() != dict.dim())
    throw DimensionError("code_point: point has dimension " + std::to_string(h.size()) +
                         ", anchors have " + std::to_string(dict.dim()));
  if (!h.allFinite()) throw ContractError("code_point: non-finite latent point");

  const double lh = dict.lipschitz_h;
  const double lg = dict.lipschitz_g;
  const Vector weights = lg * (dict.basis.colwise() - h).colwise().squaredNorm().transpose();
  const Vector vth = dict.basis.transpose() * h;
  const Vector thresholds = step_ * weights;
  const auto f = [&](const Vector& g) {
    return 2.0 * lh * (h - dict.basis * g).squaredNorm() + weights.dot(g.cwiseAbs());
  };
  const auto grad = [&](const Vector& g) -> Vector { return 4.0 * lh * (gram_ * g - vth); };

  Vector x(m);
  if (warm) {
    if (warm->size() != m) throw DimensionError("warm start has the wrong length");
    x = *warm;
    x.array() += (1.0 - x.sum()) / static_cast<double>(m);
  } else {
    x.setZero();
    x(nearest_anchors(dict, h, 1).front()) = 1.0;
  }
  double fx = f(x);

  // FISTA with function-value restart; every accepted iterate decreases f.
  Vector y = x;
  double t = 1.0;
  int it = 0;
  bool converged = false;
  for (; it < options_.max_iterations; ++it) {
    Vector next = prox_weighted_l1_affine(y - step_ * grad(y), thresholds);
    double fn = f(next);
    if (fn > fx) {
      t = 1.0;
      next = prox_weighted_l1_affine(x - step_ * grad(x), thresholds);
      fn = f(next);
      if (fn > fx) {  // rounding-level stall
        converged = true;
        break;
      }
    }
    const double change = (next - x).cwiseAbs().maxCoeff();
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - x);
    x = std::move(next);
    fx = fn;
    t = t_next;
    if (change < options_.tolerance) {
      converged = true;
      ++it;
      break;
    }
  }

  const Vector uniform = Vector::Constant(m, 1.0 / static_cast<double>(m));
  if (f(uniform) < fx) x = uniform;
  enforce_affine(x);

  Coding c = Coding::from_dense(std::move(x), CodingOrigin::optimized);
  c.converged = converged;
  c.iterations = it;
  return c;
}

Coding code_point(const Dictionary& dict, const Vector& h, const CodingOptions& options) {
  return CodingSolver(dict, options).solve(h);
}

std::vector<Index> nearest_anchors(const Dictionary& dict, const Vector& point, Index k) {
  if (point.size() != dict.dim()) throw DimensionError("nearest_anchors: dimension mismatch");
  if (k < 1 || k > dict.size()) throw ConfigError("nearest_anchors: need 1 <= k <= M");
  const Vector d2 = (dict.basis.colwise() - point).colwise().squaredNorm().transpose();
  std::vector<Index> idx(static_cast<std::size_t>(dict.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return d2(a) < d2(b); });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

Matrix update_anchors(const Matrix& points, const Matrix& gammas, const Matrix& previous_basis,
                      double lipschitz_h, double lipschitz_g, double ridge) {
  const Index m = gammas.cols();
  // Stationarity of sum_i 2 L_h ||h_i - V g_i||^2 + L_G sum_ij |g_ij| ||v_j - h_i||^2
  // plus ridge/2 ||V - V_prev||^2 gives V A = B with A symmetric positive definite.
  const Matrix abs_g = gammas.cwiseAbs();
  const Vector usage = abs_g.colwise().sum().transpose();
  Matrix a = 4.0 * lipschitz_h * (gammas.transpose() * gammas);
  a.diagonal() += 2.0 * lipschitz_g * usage + Vector::Constant(m, ridge);
  const Matrix b = 4.0 * lipschitz_h * points.transpose() * gammas +
                   2.0 * lipschitz_g * points.transpose() * abs_g + ridge * previous_basis;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  const Eigen::MatrixXd vt = ldlt.solve(Eigen::MatrixXd(b.transpose()));
  return vt.transpose();
}

LccResult learn_dictionary(const Matrix& points, const LearnOptions& opt) {
  if (opt.anchors < 2) throw ConfigError("learn_dictionary: M must be >= 2");
  if (points.rows() < opt.anchors) throw ConfigError("learn_dictionary: need N >= M");
  if (opt.outer_iterations < 1) throw ConfigError("learn_dictionary: outer_iterations must be >= 1");
  if (!points.allFinite()) throw ContractError("learn_dictionary: non-finite embeddings");

  LccResult res;
  Rng rng(opt.seed);
  KMeansResult km = kmeans(points, opt.anchors, opt.kmeans_iterations, rng);
  res.log = std::move(km.log);
  res.dict = Dictionary(km.centroids.transpose(), opt.lipschitz_h, opt.lipschitz_g);

  const Index n = points.rows();
  const auto code_all = [&](bool warm) {
    const CodingSolver solver(res.dict, opt.coding);
    std::size_t unconverged = 0;
    std::vector<Coding> out(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      const Vector h = points.row(i).transpose();
      out[static_cast<std::size_t>(i)] =
          warm ? solver.solve(h, res.codings[static_cast<std::size_t>(i)].gamma) : solver.solve(h);
      if (!out[static_cast<std::size_t>(i)].converged) ++unconverged;
    }
    res.codings = std::move(out);
    res.unconverged = unconverged;
  };

  code_all(false);
  for (int outer = 0; outer < opt.outer_iterations; ++outer) {
    const Matrix gammas = coding_matrix(res.codings, res.dict.size());
    Matrix basis = update_anchors(points, gammas, res.dict.basis, opt.lipschitz_h,
                                  opt.lipschitz_g, opt.ridge);
    res.dict = Dictionary(std::move(basis), opt.lipschitz_h, opt.lipschitz_g);
    code_all(true);
    res.objective_trace.push_back(objective(res.dict, points, res.codings));
    res.unsquared_trace.push_back(objective_unsquared(res.dict, points, res.codings));
  }
  if (res.unconverged > 0)
    res.log.push_back(std::to_string(res.unconverged) +
                      " codings reached the iteration cap in the final pass");
  return res;
}

double locality_fraction(const Dictionary& dict, const Matrix& points,
                         const std::vector<Coding>& codings, Index d) {
  check_points(dict, points, codings);
  if (points.rows() == 0) return 1.0;
  const Index near = std::min<Index>(2 * d, dict.size());
  std::size_t ok = 0;
  for (Index i = 0; i < points.rows(); ++i) {
    const Vector& g = codings[static_cast<std::size_t>(i)].gamma;
    const auto nn = nearest_anchors(dict, points.row(i).transpose(), near);
    std::vector<Index> order(static_cast<std::size_t>(g.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return std::abs(g(a)) > std::abs(g(b)); });
    bool all = true;
    for (Index k = 0; k < std::min(d, g.size()); ++k) {
      const Index j = order[static_cast<std::size_t>(k)];
      if (g(j) == 0.0) break;
      if (std::find(nn.begin(), nn.end(), j) == nn.end()) {
        all = false;
        break;
      }
    }
    if (all) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(points.rows());
}

double mean_reconstruction_error(const Dictionary& dict, const Matrix& points,
                                 const std::vector<Coding>& codings) {
  check_points(dict, points, codings);
  double total = 0.0;
  for (Index i = 0; i < points.rows(); ++i)
    total += (points.row(i).transpose() - reconstruct(dict, codings[static_cast<std::size_t>(i)])).norm();
  return total / static_cast<double>(points.rows());
}

Json dictionary_to_json(const Dictionary& dict) {
  return {{"kind", "dictionary"},
          {"M", dict.size()},
          {"dim", dict.dim()},
          {"lipschitz_h", dict.lipschitz_h},
          {"lipschitz_g", dict.lipschitz_g},
          {"anchors", matrix_to_json(dict.anchors())}};
}

Dictionary dictionary_from_json(const Json& j) {
  try {
    Matrix rows = matrix_from_json(j.at("anchors"));
    if (rows.rows() != j.at("M").get<Index>() || rows.cols() != j.at("dim").get<Index>())
      throw FormatError("dictionary M/dim disagree with its anchors");
    return Dictionary(rows.transpose(), j.at("lipschitz_h").get<double>(),
                      j.at("lipschitz_g").get<double>());
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed dictionary: ") + e.what());
  } catch (const DimensionError& e) {
    throw FormatError(std::string("invalid dictionary: ") + e.what());
  }
}

void write_codings_csv(const std::filesystem::path& path, const std::vector<Coding>& codings) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << "point,anchor,weight\n";
  char buf[40];
  for (std::size_t i = 0; i < codings.size(); ++i)
    for (Index j : codings[i].support) {
      auto r = std::to_chars(buf, buf + sizeof buf, codings[i].gamma(j), std::chars_format::general, 17);
      f << i << ',' << j << ',';
      f.write(buf, r.ptr - buf);
      f << '\n';
    }
  if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace lccgan
