#include <doctest.h>

#include <cmath>

#include "lccgan/approximation.hpp"
#include "lccgan/coverage.hpp"
#include "lccgan/dataset.hpp"
#include "lccgan/distance.hpp"
#include "lccgan/error.hpp"
#include "lccgan/gap.hpp"
#include "lccgan/lipschitz.hpp"
#include "lccgan/msssim.hpp"

using namespace lccgan;

namespace {

DomainSampler box(Index dim, double lo, double hi) {
  return [=](Index n, Rng& rng) { return Matrix(rng.uniform_matrix(n, dim, lo, hi)); };
}

DiscriminatorClass fast_class(DiscKind kind = DiscKind::mlp) {
  DiscriminatorClass c;
  c.kind = kind;
  c.steps = 200;
  c.restarts = 2;
  return c;
}

NetworkParams affine_net(const Matrix& a, const RowVector& b) {
  NetworkParams n;
  n.layers.push_back(Layer{a, b, Activation::identity});
  return n;
}

NetworkParams constant_disc(Index in) {
  NetworkParams n;
  n.layers.push_back(Layer{Matrix::Zero(in, 1), RowVector::Constant(1, 0.3), Activation::sigmoid});
  return n;
}

std::vector<Coding> random_affine_codings(Index count, Index m, Rng& rng) {
  std::vector<Coding> cs;
  for (Index i = 0; i < count; ++i) {
    Vector g = rng.normal_matrix(m, 1);
    g(m - 1) += 1.0 - g.sum();
    cs.push_back(Coding::from_dense(g, CodingOrigin::optimized));
  }
  return cs;
}

// Plain loop version of Q.
double quality_oracle(const Dictionary& dict, const Matrix& points, const std::vector<Coding>& cs,
                      double lh, double lg) {
  double total = 0.0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    Vector r = Vector::Zero(dict.dim());
    for (Index j = 0; j < dict.size(); ++j) r += cs[i].gamma(j) * dict.anchor(j);
    double term = lh * (points.row(static_cast<Index>(i)).transpose() - r).norm();
    for (Index j = 0; j < dict.size(); ++j)
      term += lg * std::abs(cs[i].gamma(j)) * (dict.anchor(j) - r).squaredNorm();
    total += term;
  }
  return total / static_cast<double>(cs.size());
}

Matrix checkerboard(Index side, Index offset) {
  Matrix m(side, side);
  for (Index r = 0; r < side; ++r)
    for (Index c = 0; c < side; ++c) m(r, c) = ((r + c + offset) % 2 == 0) ? 1.0 : -1.0;
  return m;
}

}  // namespace

TEST_CASE("nn distance of a set to itself is zero") {
  const Matrix mu = Rng(1).normal_matrix(200, 2);
  const DistanceEstimate e = estimate_nn_distance(mu, mu, Phi::identity, fast_class(), 3);
  CHECK(e.distance <= 1e-3);
  CHECK(e.distance >= 0.0);
  CHECK(e.steps == 200);
  CHECK(e.restarts == 2);
  CHECK(estimate_nn_distance(mu, mu, Phi::log, fast_class(), 3).distance <= 1e-3);
}

TEST_CASE("constant discriminator class measures nothing") {
  const Matrix mu = Rng(1).normal_matrix(50, 2), nu = Rng(2).normal_matrix(50, 2) + Matrix::Constant(50, 2, 5.0);
  for (Phi phi : {Phi::identity, Phi::log})
    CHECK(estimate_nn_distance(mu, nu, phi, fast_class(DiscKind::constant), 1).distance == 0.0);
  CHECK_THROWS_AS(estimate_nn_distance(mu, nu, Phi::identity, fast_class(DiscKind::lookup), 1),
                  ConfigError);
  CHECK_THROWS(estimate_nn_distance(Matrix(0, 2), nu, Phi::identity, fast_class(), 1));
}

TEST_CASE("nn distance grows with the mean gap of two gaussians") {
  double last = -1.0;
  for (double gap : {0.0, 1.0, 2.0}) {
    const Matrix mu = Rng(10).normal_matrix(2000, 1);
    const Matrix nu = (Rng(11).normal_matrix(2000, 1).array() + gap).matrix();
    const double d = estimate_nn_distance(mu, nu, Phi::identity, DiscriminatorClass{}, 5).distance;
    CHECK(d > last);
    last = d;
  }
}

TEST_CASE("rademacher of a singleton class is near zero") {
  const Index n = 500;
  const int k = 20;
  const Matrix x = Rng(2).normal_matrix(n, 2);
  const double r = estimate_rademacher(x, Phi::identity, fast_class(DiscKind::constant), k, 9);
  CHECK(std::abs(r) <= 2.0 / std::sqrt(static_cast<double>(n * k)));
}

TEST_CASE("rademacher of a shattering class matches the per-sign optimum") {
  const Index n = 200;
  const int k = 10;
  const Matrix x = Rng(3).normal_matrix(n, 2);
  const std::uint64_t seed = 4;
  const double r = estimate_rademacher(x, Phi::identity, fast_class(DiscKind::lookup), k, seed);
  // Per-sign optimum with range {0,1}: D = 1 exactly where sigma = +1.
  const double expected = 0.5;
  CHECK(std::abs(r - expected) <= 0.05);

  Vector sigma(n);
  for (Index i = 0; i < n; ++i) sigma(i) = (i % 3 == 0) ? 1.0 : -1.0;
  const double oracle = (sigma.array() > 0).count() / static_cast<double>(n);
  Rng rng(6);
  const double sup = rademacher_sup(x, sigma, Phi::identity, fast_class(DiscKind::lookup), rng);
  CHECK(sup <= oracle + 1e-12);
  CHECK(sup >= oracle - 0.01);
}

TEST_CASE("rademacher estimate grows with width") {
  const Matrix x = Rng(7).normal_matrix(40, 2);
  double last = -1.0;
  for (Index width : {4, 32, 256}) {
    DiscriminatorClass c;
    c.hidden = {width};
    c.steps = 500;
    c.restarts = 1;
    c.learning_rate = 1e-3;
    double total = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) total += estimate_rademacher(x, Phi::identity, c, 2, 100 + s);
    CHECK(total / 5 >= last);
    last = total / 5;
  }
}

TEST_CASE("lipschitz of a diagonal linear map") {
  const Matrix at = (Matrix(2, 2) << 3, 0, 0, 1).finished();
  const DiffFn f = [at](const Tensor& x) { return matmul(x, Tensor(at)); };
  const FunctionConstants c = estimate_lipschitz(f, box(2, -1, 1), 400, 1.5, 1);
  CHECK(c.first_order >= 2.7);
  CHECK(c.first_order <= 3.0 * 1.5 + 1e-9);
  CHECK(c.second_order < 1e-6);
  CHECK(c.pairs == 400);
}

TEST_CASE("lipschitz of constant and square functions") {
  const DiffFn zero = [](const Tensor& x) { return scale(x, 0.0); };
  const FunctionConstants z = estimate_lipschitz(zero, box(3, -1, 1), 200, 1.5, 2);
  CHECK(z.first_order == 0.0);
  CHECK(z.second_order == 0.0);

  const DiffFn sq = [](const Tensor& x) { return square(x); };
  const FunctionConstants s = estimate_lipschitz(sq, box(1, -1, 1), 2000, 1.0, 3);
  CHECK(s.first_order == doctest::Approx(2.0).epsilon(0.02));
  CHECK(s.first_order <= 2.0 + 1e-12);
  CHECK(s.second_order == doctest::Approx(1.0).epsilon(1e-4));
  CHECK_THROWS(estimate_lipschitz(sq, box(1, -1, 1), 99, 1.0, 3));
}

TEST_CASE("jvp matches finite differences") {
  Rng rng(4);
  const NetworkParams net = he_init(std::vector<Index>{3, 6, 2}, Activation::tanh, Activation::tanh, rng);
  const Matrix x = rng.normal_matrix(5, 3), dx = rng.normal_matrix(5, 3);
  const Matrix j = jvp(network_fn(net), x, dx);
  const double h = 1e-6;
  const Matrix fd = (forward(net, Matrix(x + h * dx)) - forward(net, Matrix(x - h * dx))) / (2 * h);
  CHECK((j - fd).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("generative quality") {
  const Dictionary dict(Rng(1).normal_matrix(2, 5), 1, 1);
  std::vector<Coding> onehot;
  Matrix pts(5, 2);
  for (Index j = 0; j < 5; ++j) {
    onehot.push_back(Coding::from_dense(Vector::Unit(5, j), CodingOrigin::optimized));
    pts.row(j) = dict.anchor(j).transpose();
  }
  CHECK(generative_quality(dict, pts, onehot, 2.0, 3.0) == 0.0);

  // One point at distance 1 from its only anchor.
  Matrix h = pts.row(0);
  h(0, 0) += 1.0;
  CHECK(generative_quality(dict, h, {onehot[0]}, 2.5, 7.0) == doctest::Approx(2.5).epsilon(1e-15));

  Rng rng(2);
  const std::vector<Coding> cs = random_affine_codings(30, 5, rng);
  const Matrix p = rng.normal_matrix(30, 2);
  CHECK(std::abs(generative_quality(dict, p, cs, 1.3, 0.7) - quality_oracle(dict, p, cs, 1.3, 0.7)) <
        1e-12);
  const Matrix r = reconstruct_all(dict, cs);
  CHECK(std::abs(generative_quality(dict, cs, 1.3, 0.7) - quality_oracle(dict, r, cs, 1.3, 0.7)) <
        1e-12);
}

TEST_CASE("lemma checks on degenerate cases") {
  Rng rng(3);
  const Dictionary dict(rng.normal_matrix(2, 6), 1, 1);
  const NetworkParams gen = he_init(std::vector<Index>{2, 8, 3}, Activation::tanh, Activation::tanh, rng);
  const NetworkParams disc = he_init(std::vector<Index>{3, 8, 1}, Activation::tanh, Activation::sigmoid, rng);
  LipschitzEstimate lip{1.0, 1.0, 1.0, 100, 1.5, "fixed"};

  std::vector<Coding> onehot;
  Matrix pts(6, 2);
  for (Index j = 0; j < 6; ++j) {
    onehot.push_back(Coding::from_dense(Vector::Unit(6, j), CodingOrigin::optimized));
    pts.row(j) = dict.anchor(j).transpose();
  }
  const LemmaReport l1 = check_lemma1(gen, dict, pts, onehot, lip);
  CHECK(l1.holds_fraction == 1.0);
  CHECK(l1.max_lhs == 0.0);
  const LemmaReport l2 = check_lemma2(disc, gen, dict, pts, onehot, lip);
  CHECK(l2.holds_fraction == 1.0);
  CHECK(l2.max_lhs <= kLemmaTolerance);

  // Affine generator and affine codings: LHS vanishes up to rounding.
  const NetworkParams lin = affine_net(rng.normal_matrix(2, 3), rng.normal_matrix(1, 3));
  const std::vector<Coding> cs = random_affine_codings(200, 6, rng);
  const Matrix anywhere = rng.normal_matrix(200, 2);
  const LemmaReport la = check_lemma1(lin, dict, anywhere, cs, lip);
  CHECK(la.count == 200);
  CHECK(la.holds_fraction == 1.0);
  CHECK(la.max_lhs <= kLemmaTolerance);

  // Constant discriminator: LHS is exactly zero.
  const LemmaReport lc = check_lemma2(constant_disc(3), gen, dict, anywhere, cs, lip);
  CHECK(lc.holds_fraction == 1.0);
  CHECK(lc.max_lhs == 0.0);
}

TEST_CASE("ms-ssim basic properties") {
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const Matrix a = rng.uniform_matrix(16, 16, -1, 1), b = rng.uniform_matrix(16, 16, -1, 1);
    CHECK(ms_ssim(a, a) == 1.0);
    const double ab = ms_ssim(a, b);
    CHECK(ab == ms_ssim(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
  const Matrix c = Matrix::Constant(16, 16, 0.2);
  CHECK(ms_ssim(c, (c.array() + 0.5).matrix()) < 1.0);
  CHECK(ms_ssim(checkerboard(16, 0), checkerboard(16, 1)) < 0.9);

  const MsSsimResult big = ms_ssim_detail(rng.uniform_matrix(64, 64, -1, 1), rng.uniform_matrix(64, 64, -1, 1));
  CHECK(big.scales_used == 3);
  CHECK_FALSE(big.fallback);
  const MsSsimResult small = ms_ssim_detail(c, c);
  CHECK(small.scales_used == 1);
  const MsSsimResult tiny = ms_ssim_detail(Matrix::Zero(8, 8), Matrix::Zero(8, 8));
  CHECK(tiny.fallback);
  CHECK(tiny.value == 1.0);
  CHECK(tiny.window < 11);
  CHECK_THROWS(ms_ssim(Matrix::Zero(8, 8), Matrix::Zero(9, 9)));
}

TEST_CASE("pairwise diversity") {
  const Index side = 16;
  Matrix same(10, side * side);
  const RowVector img = Rng(1).uniform_matrix(1, side * side, -1, 1);
  for (Index i = 0; i < 10; ++i) same.row(i) = img;
  CHECK(diversity_msssim(same, side, 30, 1) == 1.0);

  Matrix two(2, side * side);
  two.row(0).setConstant(-0.5);
  two.row(1).setConstant(0.4);
  CHECK(diversity_msssim(two, side, 7, 2) == ms_ssim(as_image(two, 0, side), as_image(two, 1, side)));

  const Matrix noise = Rng(3).uniform_matrix(1000, side * side, -1, 1);
  const double div = diversity_msssim(noise, side, 500, 4);
  CHECK(div < 0.2);
  CHECK(div == diversity_msssim(noise, side, 500, 4));
  CHECK_THROWS(diversity_msssim(two.topRows(1), side, 5, 1));
}

TEST_CASE("mode coverage") {
  const ManifoldSpec spec = ManifoldSpec::ring(8, 2.0, 0.05, 1);
  const Matrix centers = spec.mode_centers();
  const Matrix one = centers.row(3).replicate(100, 1);
  const CoverageReport a = mode_coverage(one, centers, 0.15);
  CHECK(a.covered == 1);
  CHECK(a.histogram[3] == 100);
  CHECK(a.modes == 8);
  CHECK(mode_coverage(centers, centers, 0.15).covered == 8);
  const CoverageReport ring = mode_coverage(generate(spec, 4000).samples, centers, 3 * 0.05);
  CHECK(ring.covered == 8);

  Matrix far = Matrix::Constant(10, 2, 50.0);
  const CoverageReport f = mode_coverage(far, centers, 0.15);
  CHECK(f.covered == 0);
  CHECK(f.unassigned == 10);
  CHECK_THROWS(mode_coverage(far, centers, 0.0));
}

TEST_CASE("gap report identities") {
  GapReport r;
  r.train_distance = 0.3;
  r.heldout_distance = 0.1;
  r.rademacher = 0.04;
  r.phi_bound = 2.0;
  r.confidence = 0.05;
  r.quality = 0.7;
  r.phi_lipschitz = 3.0;
  r.n = 123;
  finalize(r);
  CHECK(r.gap == std::abs(0.3 - 0.1));
  CHECK(r.epsilon == 3.0 * 0.7 + 2 * 2.0);
  CHECK(r.bound_value ==
        2 * 0.04 + 2 * 2.0 * std::sqrt(2 * std::log(1 / 0.05) / 123.0) + 2 * r.epsilon);
  CHECK(r.recomputed_bound() == r.bound_value);
  CHECK_NOTHROW(r.validate());
  const GapReport back = gap_from_json(gap_to_json(r));
  CHECK_NOTHROW(back.validate());
  CHECK(back.bound_value == r.bound_value);
  GapReport bad = r;
  bad.gap += 1e-9;
  CHECK_THROWS_AS(bad.validate(), ContractError);
  CHECK(gap_csv_row(r, 7).rfind("7,123,", 0) == 0);
}

TEST_CASE("gap harness on a toy model") {
  GanConfig g;
  g.hidden_width = 8;
  g.hidden_layers = 1;
  g.sampler.d = 2;
  Rng rng(8);
  const Dictionary dict(rng.normal_matrix(2, 6), 1, 1);
  const GanModel model = init_gan_model(2, 2, dict, g);
  Dataset train, held;
  train.samples = rng.normal_matrix(200, 2, 0.5);
  held.samples = rng.normal_matrix(200, 2, 0.5);
  GapConfig cfg;
  cfg.disc = fast_class();
  cfg.rademacher_draws = 2;
  cfg.seed = 3;

  const GapReport same = gap_harness(model, train, train, cfg);
  CHECK(same.gap <= 1e-3);
  CHECK_NOTHROW(same.validate());

  const GapReport r = gap_harness(model, train, held, cfg);
  CHECK_NOTHROW(r.validate());
  CHECK(r.gap <= r.bound_value);
  CHECK(r.n == 200);
  CHECK(r.phi_bound == phi_bound(Phi::log));
  CHECK(r.steps == cfg.disc.steps);
  const GapReport again = gap_harness(model, train, held, cfg);
  CHECK(gap_to_json(again) == gap_to_json(r));
}
