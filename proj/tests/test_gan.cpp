#include <doctest.h>

#include <cmath>

#include "lccgan/error.hpp"
#include "lccgan/gan.hpp"

using namespace lccgan;

namespace {

Dictionary small_dict(Index m = 6, Index dim = 2, std::uint64_t seed = 1) {
  Rng rng(seed);
  return Dictionary(rng.normal_matrix(dim, m, 0.5), 1, 1);
}

GanConfig tiny_cfg() {
  GanConfig c;
  c.hidden_width = 5;
  c.hidden_layers = 1;
  c.batch_size = 8;
  c.sampler.d = 2;
  c.seed = 3;
  return c;
}

GanModel tiny_model(Phi phi = Phi::log) {
  GanConfig c = tiny_cfg();
  c.phi = phi;
  return init_gan_model(3, 2, small_dict(), c);
}

Dataset blob(Index n, Index dim, std::uint64_t seed) {
  Dataset ds;
  ds.samples = Rng(seed).normal_matrix(n, dim, 0.3);
  ds.name = "blob";
  return ds;
}

AutoEncoder identity_ae(Index dim) {
  NetworkParams n;
  n.layers.push_back(Layer{Matrix::Identity(dim, dim), RowVector::Zero(dim), Activation::identity});
  return AutoEncoder{n, n};
}

// Central differences of `f` w.r.t. every parameter of `net`.
template <class F>
double fd_mismatch(NetworkParams& net, const NetworkParams& analytic, F f) {
  double worst = 0.0;
  const double h = 1e-5;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto visit = [&](double& p, double a) {
      const double keep = p;
      p = keep + h;
      const double up = f();
      p = keep - h;
      const double down = f();
      p = keep;
      const double fd = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(fd - a) / std::max(1e-4, std::abs(fd)));
    };
    for (Index i = 0; i < net.layers[l].weight.size(); ++i)
      visit(net.layers[l].weight.data()[i], analytic.layers[l].weight.data()[i]);
    for (Index i = 0; i < net.layers[l].bias.size(); ++i)
      visit(net.layers[l].bias.data()[i], analytic.layers[l].bias.data()[i]);
  }
  return worst;
}

void zero_last_layer(NetworkParams& n) {
  n.layers.back().weight.setZero();
  n.layers.back().bias.setZero();
}

}  // namespace

TEST_CASE("phi constants") {
  CHECK(phi_constant(Phi::identity) == 1.0);
  CHECK(phi_constant(Phi::log) == 2.0 * std::log(0.5));
  CHECK(phi_bound(Phi::log) == -std::log(1e-7));
  CHECK(phi_lipschitz(Phi::log) == doctest::Approx(1e7));
  CHECK(apply_phi(Phi::log, 0.0) == std::log(1e-7));
  CHECK_THROWS_AS(parse_phi("sqrt"), ConfigError);
}

TEST_CASE("architecture and validation") {
  const GanModel m = tiny_model();
  CHECK(m.generator.in_dim() == 2);
  CHECK(m.generator.out_dim() == 3);
  CHECK(m.generator.output_activation() == Activation::tanh);
  CHECK(m.discriminator.output_activation() == Activation::sigmoid);
  CHECK(m.discriminator.out_dim() == 1);
  GanConfig g = tiny_cfg();
  g.input = GeneratorInput::gaussian;
  const GanModel b = init_gan_model(3, 2, std::nullopt, g);
  CHECK(b.input_dim() == 2);
  CHECK(b.generator.layers.front().activation == Activation::identity);
  CHECK(b.generator.layers.size() == m.generator.layers.size() + 1);
  CHECK_THROWS_AS(init_gan_model(3, 2, std::nullopt, tiny_cfg()), ConfigError);
}

TEST_CASE("generate factors through the anchor matrix") {
  const GanModel m = tiny_model();
  const Dictionary& d = *m.dict;
  std::vector<Coding> cs;
  Rng rng(4);
  for (int i = 0; i < 5; ++i)
    cs.push_back(Coding::from_dense(rng.normal_matrix(6, 1), CodingOrigin::sampled));
  CHECK(generate(m, cs) == forward(m.generator, reconstruct_all(d, cs)));

  Vector e = Vector::Zero(6);
  e(2) = 1.0;
  const Matrix one = generate(m, {Coding::from_dense(e, CodingOrigin::optimized)});
  CHECK(one == forward(m.generator, Matrix(d.anchor(2).transpose())));
}

TEST_CASE("re-mixing the anchors with compensating codings leaves outputs unchanged") {
  GanModel m = tiny_model();
  const Dictionary d = *m.dict;
  Rng rng(5);
  std::vector<Coding> cs;
  for (int i = 0; i < 7; ++i)
    cs.push_back(Coding::from_dense(rng.normal_matrix(6, 1), CodingOrigin::sampled));
  const Matrix before = generate(m, cs);

  // Permutation re-mix: only the summation order changes.
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(6);
  perm.indices() << 3, 0, 5, 1, 4, 2;
  const Matrix p = perm.toDenseMatrix().cast<double>();
  GanModel mp = m;
  mp.dict = Dictionary(d.basis * p, 1, 1);
  std::vector<Coding> cp;
  for (const auto& c : cs) cp.push_back(Coding::from_dense(p.transpose() * c.gamma, CodingOrigin::sampled));
  CHECK((generate(mp, cp) - before).cwiseAbs().maxCoeff() < 1e-12);

  // General invertible re-mix: equal to rounding.
  const Matrix q = Matrix::Identity(6, 6) + 0.3 * rng.normal_matrix(6, 6);
  GanModel mq = m;
  mq.dict = Dictionary(d.basis * q, 1, 1);
  std::vector<Coding> cq;
  for (const auto& c : cs)
    cq.push_back(Coding::from_dense(q.partialPivLu().solve(c.gamma), CodingOrigin::sampled));
  CHECK((generate(mq, cq) - before).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("zero generator with identity head emits zeros") {
  GanModel m = tiny_model();
  for (auto& l : m.generator.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
  m.generator.layers.back().activation = Activation::identity;
  CHECK(generate(m, Rng(1).normal_matrix(4, 2)).isZero(0.0));
}

TEST_CASE("half-probability discriminator gives phi_c") {
  for (Phi phi : {Phi::log, Phi::identity}) {
    GanModel m = tiny_model(phi);
    zero_last_layer(m.discriminator);
    Rng rng(2);
    const Matrix real = rng.normal_matrix(8, 3), input = rng.normal_matrix(8, 2);
    CHECK(disc_objective(m, real, input) == doctest::Approx(phi_constant(phi)).epsilon(1e-15));
    // Flat discriminator: no signal for the generator.
    const GradientResult g = gen_gradients(m, input);
    CHECK(norm(g.grads) == 0.0);
  }
}

TEST_CASE("discriminator and generator gradients match finite differences") {
  for (Phi phi : {Phi::log, Phi::identity}) {
    GanModel m = tiny_model(phi);
    Rng rng(7);
    const Matrix real = rng.normal_matrix(4, 3, 0.5), input = rng.normal_matrix(4, 2, 0.5);
    const GradientResult dg = disc_gradients(m, real, input);
    CHECK(fd_mismatch(m.discriminator, dg.grads, [&] { return disc_objective(m, real, input); }) < 1e-4);
    const GradientResult gg = gen_gradients(m, input);
    CHECK(fd_mismatch(m.generator, gg.grads, [&] { return gen_objective(m, input); }) < 1e-4);
  }
}

TEST_CASE("steps touch only their own network and move in the right direction") {
  GanModel m = tiny_model();
  Rng rng(8);
  const Matrix real = rng.normal_matrix(8, 3, 0.5), input = rng.normal_matrix(8, 2, 0.5);
  const NetworkParams gen_before = m.generator, disc_before = m.discriminator;

  AdamOptions small;
  small.learning_rate = 1e-5;
  AdamState ds = AdamState::for_params(m.discriminator, small);
  const double before = disc_objective(m, real, input);
  const StepResult r = disc_step(m, real, input, ds);
  CHECK(r.objective == before);
  CHECK(m.generator == gen_before);
  CHECK_FALSE(m.discriminator == disc_before);
  CHECK(disc_objective(m, real, input) >= before - small.learning_rate * r.gradient_norm * r.gradient_norm);

  const NetworkParams disc_mid = m.discriminator;
  AdamState gs = AdamState::for_params(m.generator, small);
  const double g_before = gen_objective(m, input);
  gen_step(m, input, gs);
  CHECK(m.discriminator == disc_mid);
  CHECK_FALSE(m.generator == gen_before);
  CHECK(gen_objective(m, input) <= g_before + 1e-12);
}

TEST_CASE("training: zero iterations, determinism, fresh codings") {
  const Dataset ds = blob(64, 3, 1);
  const AutoEncoder ae = identity_ae(3);
  Rng rng(9);
  const Dictionary d(rng.normal_matrix(3, 6, 0.5), 1, 1);
  GanConfig cfg = tiny_cfg();
  cfg.iterations = 0;
  const GanTrainResult zero = gan_train(ds, ae, d, cfg);
  const GanModel init = init_gan_model(3, 3, d, cfg);
  CHECK(zero.model.generator == init.generator);
  CHECK(zero.model.discriminator == init.discriminator);
  CHECK(zero.log.records.empty());

  cfg.iterations = 25;
  int fresh = 0, calls = 0;
  const GanTrainResult a = gan_train(ds, ae, d, cfg, [&](const IterationTrace& t) {
    ++calls;
    bool same = t.disc_codings.size() == t.gen_codings.size();
    for (std::size_t i = 0; same && i < t.disc_codings.size(); ++i)
      same = t.disc_codings[i].gamma == t.gen_codings[i].gamma;
    if (!same) ++fresh;
  });
  CHECK(calls == 25);
  CHECK(fresh == 25);
  const GanTrainResult b = gan_train(ds, ae, d, cfg);
  REQUIRE(a.log.records.size() == 25);
  for (std::size_t i = 0; i < 25; ++i) {
    CHECK(a.log.records[i].iteration == static_cast<long>(i));
    CHECK(train_record_to_json(a.log.records[i], false) == train_record_to_json(b.log.records[i], false));
  }
  CHECK(a.model.generator == b.model.generator);
  CHECK(a.model.discriminator == b.model.discriminator);
  CHECK(a.model.dict->basis == d.basis);
}

TEST_CASE("gaussian baseline trains through the same loop") {
  const Dataset ds = blob(64, 3, 2);
  const AutoEncoder ae = identity_ae(3);
  const Dictionary d(Rng(3).normal_matrix(3, 6, 0.5), 1, 1);
  GanConfig cfg = tiny_cfg();
  cfg.input = GeneratorInput::gaussian;
  cfg.iterations = 5;
  const GanTrainResult r = gan_train(ds, ae, d, cfg);
  CHECK(r.log.records.size() == 5);
  CHECK_FALSE(r.model.dict.has_value());
  CHECK(generate(r.model, Rng(1).normal_matrix(4, 2)).rows() == 4);
}

TEST_CASE("divergence aborts with a batch snapshot") {
  const Dataset ds = blob(32, 3, 4);
  const AutoEncoder ae = identity_ae(3);
  const Dictionary d(Rng(5).normal_matrix(3, 6, 0.5), 1, 1);
  GanConfig cfg = tiny_cfg();
  cfg.iterations = 50;
  cfg.adam.learning_rate = 1e308;
  try {
    gan_train(ds, ae, d, cfg);
    FAIL("expected a TrainingError");
  } catch (const TrainingError& e) {
    const Json snap = Json::parse(e.snapshot());
    CHECK(snap.contains("real_batch"));
    CHECK(snap["real_batch"].size() == 8);
  }
}

TEST_CASE("gan checkpoint round trip") {
  const GanModel m = tiny_model(Phi::identity);
  const GanModel back = gan_from_json(gan_to_json(m));
  CHECK(back.generator == m.generator);
  CHECK(back.discriminator == m.discriminator);
  CHECK(back.phi == Phi::identity);
  CHECK(back.dict->basis == m.dict->basis);
  Json bad = gan_to_json(m);
  bad["phi"] = "tan";
  CHECK_THROWS_AS(gan_from_json(bad), FormatError);
}
