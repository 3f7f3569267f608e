#include "lccgan/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "lccgan/approximation.hpp"
#include "lccgan/autoencoder.hpp"
#include "lccgan/coverage.hpp"
#include "lccgan/error.hpp"
#include "lccgan/gan.hpp"
#include "lccgan/lcc.hpp"
#include "lccgan/msssim.hpp"

namespace lccgan {

namespace fs = std::filesystem;

namespace stream {
constexpr std::uint64_t data = 10;
constexpr std::uint64_t split = 11;
constexpr std::uint64_t ae = 12;
constexpr std::uint64_t lcc = 13;
constexpr std::uint64_t gan = 14;
constexpr std::uint64_t sample = 15;
constexpr std::uint64_t eval = 16;
constexpr std::uint64_t gap = 17;
}  // namespace stream

std::uint64_t stage_seed(const ExperimentConfig& cfg, std::uint64_t s) {
  return Rng(cfg.seed).derive(s).next_u64();
}

PreparedData prepare_data(const ExperimentConfig& cfg) {
  PreparedData p;
  Dataset ds;
  if (cfg.dataset == "digits") {
    fs::path images = cfg.images, labels = cfg.labels;
    if (images.empty()) {
      const fs::path dir = fs::path(cfg.out) / "data";
      fs::create_directories(dir);
      images = dir / "digits-images.idx";
      labels = dir / "digits-labels.idx";
      const auto [pixels, lab] =
          render_digits(static_cast<std::uint32_t>(cfg.samples), stage_seed(cfg, stream::data));
      write_idx_images(images, pixels, static_cast<std::uint32_t>(cfg.samples), 28, 28);
      write_idx_labels(labels, lab);
    }
    ds = load_idx(images, labels, cfg.side);
    if (ds.size() > cfg.samples) {
      std::vector<Index> rows(static_cast<std::size_t>(cfg.samples));
      for (Index i = 0; i < cfg.samples; ++i) rows[static_cast<std::size_t>(i)] = i;
      ds = ds.subset(rows);
    }
    p.images = true;
  } else {
    ManifoldSpec spec;
    spec.kind = cfg.dataset == "ring"         ? ManifoldKind::ring_of_gaussians
                : cfg.dataset == "swiss_roll" ? ManifoldKind::swiss_roll
                                              : ManifoldKind::two_circles;
    spec.ambient_dim = cfg.ambient_dim;
    spec.intrinsic_dim = spec.kind == ManifoldKind::swiss_roll ? 2 : 1;
    spec.modes = cfg.modes;
    spec.radius = cfg.radius;
    spec.sigma = cfg.sigma;
    spec.noise = cfg.noise;
    spec.seed = stage_seed(cfg, stream::data);
    ds = generate(spec, cfg.samples);
    p.mode_centers = spec.mode_centers();
  }
  ds = normalize(ds);
  p.normalization = *ds.normalization;
  auto [train, heldout] = split(ds, cfg.train_fraction, stage_seed(cfg, stream::split));
  p.train = std::move(train);
  p.heldout = std::move(heldout);
  return p;
}

void write_pgm_grid(const fs::path& path, const Matrix& images, Index side) {
  if (images.cols() != side * side) throw DimensionError("pgm: rows are not side x side images");
  const Index n = images.rows();
  const Index cols = std::max<Index>(1, static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(n)))));
  const Index rows = (n + cols - 1) / cols;
  const Index w = cols * (side + 1) + 1, h = std::max<Index>(1, rows * (side + 1) + 1);
  std::vector<unsigned char> px(static_cast<std::size_t>(w * h), 0);
  for (Index k = 0; k < n; ++k) {
    const Index r0 = (k / cols) * (side + 1) + 1, c0 = (k % cols) * (side + 1) + 1;
    for (Index i = 0; i < side; ++i)
      for (Index j = 0; j < side; ++j) {
        const double v = std::clamp((images(k, i * side + j) + 1.0) * 127.5, 0.0, 255.0);
        px[static_cast<std::size_t>((r0 + i) * w + c0 + j)] = static_cast<unsigned char>(std::lround(v));
      }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << "P5\n" << w << ' ' << h << "\n255\n";
  f.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

namespace {

std::vector<std::string> column_names(const char* prefix, Index n) {
  std::vector<std::string> out;
  for (Index i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

GanConfig gan_config(const ExperimentConfig& cfg) {
  GanConfig g;
  g.iterations = cfg.gan_iterations;
  g.batch_size = cfg.gan_batch;
  g.adam.learning_rate = cfg.gan_learning_rate;
  g.hidden_width = cfg.gan_hidden_width;
  g.hidden_layers = cfg.gan_hidden_layers;
  g.phi = parse_phi(cfg.phi);
  g.input = parse_generator_input(cfg.input);
  g.sampler.d = cfg.d;
  g.sampler.prior = parse_prior(cfg.prior);
  g.sampler.seed = stage_seed(cfg, stream::gan);
  g.pool_embeddings = cfg.pool == "embeddings";
  g.seed = stage_seed(cfg, stream::gan);
  return g;
}

LearnOptions learn_options(const ExperimentConfig& cfg, Index anchors) {
  LearnOptions o;
  o.anchors = anchors;
  o.lipschitz_h = cfg.lipschitz_h;
  o.lipschitz_g = cfg.lipschitz_g;
  o.outer_iterations = cfg.lcc_outer;
  o.kmeans_iterations = cfg.lcc_kmeans;
  o.seed = stage_seed(cfg, stream::lcc);
  return o;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

// Generated samples for a trained model; codings filled for lcc models.
Matrix draw_samples(const GanModel& model, const ExperimentConfig& cfg, const Matrix& embeddings,
                    Index n, std::uint64_t seed, std::vector<Coding>* codings) {
  const GanConfig g = gan_config(cfg);
  Matrix pool;
  if (model.input == GeneratorInput::lcc)
    pool = sampling_pool(*model.dict, embeddings, g.pool_embeddings);
  const InputSampler sampler(model, g.sampler, pool);
  Rng rng(seed);
  return generate(model, sampler.draw(n, rng, codings));
}

}  // namespace

Pipeline::Pipeline(ExperimentConfig cfg, std::ostream* log)
    : cfg_(std::move(cfg)), out_(cfg_.out), log_(log) {
  cfg_.validate();
  fs::create_directories(out_);
  std::ofstream f(out_ / artifact::config, std::ios::binary);
  f << serialize_config(cfg_);
  if (!f) throw IoError("cannot write " + (out_ / artifact::config).string());
}

void Pipeline::note(const std::string& msg) const {
  if (log_) *log_ << msg << '\n';
}

fs::path Pipeline::require(const char* name, const char* producer) const {
  const fs::path p = out_ / name;
  if (!fs::exists(p))
    throw StageOrderError("stage order: missing " + p.string() + " (run " + producer + " first)");
  return p;
}

template <class Fn>
void Pipeline::stage(const std::string& name, Fn&& fn) {
  auto stages = read_manifest_stages(out_);
  std::erase_if(stages, [&](const StageStatus& s) { return s.stage == name; });
  note("[" + name + "]");
  try {
    fn();
  } catch (const std::exception& e) {
    stages.push_back({name, false, one_line(e.what())});
    write_manifest(out_, stages);
    throw;
  }
  stages.push_back({name, true, {}});
  write_manifest(out_, stages);
}

void Pipeline::train_ae() {
  stage("train-ae", [&] {
    const PreparedData data = prepare_data(cfg_);
    AeOptions o;
    o.latent_dim = cfg_.latent_dim;
    o.epochs = cfg_.ae_epochs;
    o.batch_size = cfg_.ae_batch;
    o.hidden = cfg_.ae_hidden;
    o.adam.learning_rate = cfg_.ae_learning_rate;
    o.seed = stage_seed(cfg_, stream::ae);
    const AeTrainResult r = lccgan::train_ae(data.train, o);
    for (const auto& w : r.warnings) note("warning: " + w);
    write_json(out_ / artifact::ae, autoencoder_to_json(r.ae));
    Matrix loss(static_cast<Index>(r.epoch_losses.size()), 2);
    for (Index i = 0; i < loss.rows(); ++i) {
      loss(i, 0) = static_cast<double>(i + 1);
      loss(i, 1) = r.epoch_losses[static_cast<std::size_t>(i)];
    }
    write_csv(out_ / artifact::ae_loss, loss, {"epoch", "mse"});
    write_csv(out_ / artifact::embeddings, embed(r.ae, data.train), column_names("h", o.latent_dim));
    if (!r.epoch_losses.empty()) note("autoencoder mse " + format_double(r.epoch_losses.back()));
  });
}

void Pipeline::learn_lcc() {
  stage("learn-lcc", [&] {
    const AutoEncoder ae = autoencoder_from_json(read_json(require(artifact::ae, "train-ae")));
    const PreparedData data = prepare_data(cfg_);
    const Matrix h = embed(ae, data.train);
    const LccResult r = learn_dictionary(h, learn_options(cfg_, cfg_.anchors));
    for (const auto& line : r.log) note(line);
    write_json(out_ / artifact::dictionary, dictionary_to_json(r.dict));
    write_codings_csv(out_ / artifact::codings, r.codings);
    Matrix trace(static_cast<Index>(r.objective_trace.size()), 3);
    for (Index i = 0; i < trace.rows(); ++i) {
      trace(i, 0) = static_cast<double>(i + 1);
      trace(i, 1) = r.objective_trace[static_cast<std::size_t>(i)];
      trace(i, 2) = r.unsquared_trace[static_cast<std::size_t>(i)];
    }
    write_csv(out_ / artifact::lcc_trace, trace, {"iteration", "objective", "objective_unsquared"});
    note("lcc objective " + format_double(r.objective_trace.back()));
  });
}

void Pipeline::train_gan() {
  stage("train-gan", [&] {
    const AutoEncoder ae = autoencoder_from_json(read_json(require(artifact::ae, "train-ae")));
    const Dictionary dict =
        dictionary_from_json(read_json(require(artifact::dictionary, "learn-lcc")));
    const PreparedData data = prepare_data(cfg_);
    const GanTrainResult r = gan_train(data.train, ae, dict, gan_config(cfg_));
    write_json(out_ / artifact::gan, gan_to_json(r.model));
    write_train_log(out_ / artifact::train_log, r.log);
    Matrix curve(static_cast<Index>(r.log.records.size()), 3);
    for (Index i = 0; i < curve.rows(); ++i) {
      const TrainRecord& rec = r.log.records[static_cast<std::size_t>(i)];
      curve(i, 0) = static_cast<double>(rec.iteration);
      curve(i, 1) = rec.disc_objective;
      curve(i, 2) = rec.gen_objective;
    }
    write_csv(out_ / artifact::loss_curve, curve, {"iteration", "disc_objective", "gen_objective"});
  });
}

void Pipeline::sample(Index n) {
  stage("sample", [&] {
    if (n < 1) throw ConfigError("sample: n must be >= 1");
    const GanModel model = gan_from_json(read_json(require(artifact::gan, "train-gan")));
    const PreparedData data = prepare_data(cfg_);
    Matrix emb;
    if (cfg_.pool == "embeddings")
      emb = embed(autoencoder_from_json(read_json(require(artifact::ae, "train-ae"))), data.train);
    const Matrix x = draw_samples(model, cfg_, emb, n, stage_seed(cfg_, stream::sample), nullptr);
    if (data.images) {
      write_csv(out_ / artifact::samples, x, column_names("p", x.cols()));
      write_pgm_grid(out_ / artifact::sample_grid, x, cfg_.side);
    } else {
      write_csv(out_ / artifact::samples, invert_normalization(data.normalization, x),
                column_names("x", x.cols()));
    }
  });
}

void Pipeline::eval() {
  stage("eval", [&] {
    const GanModel model = gan_from_json(read_json(require(artifact::gan, "train-gan")));
    const AutoEncoder ae = autoencoder_from_json(read_json(require(artifact::ae, "train-ae")));
    const Dictionary dict =
        dictionary_from_json(read_json(require(artifact::dictionary, "learn-lcc")));
    const PreparedData data = prepare_data(cfg_);
    const Matrix h = embed(ae, data.train);

    std::vector<Coding> codings;
    const Matrix x = draw_samples(model, cfg_, h, cfg_.eval_samples, stage_seed(cfg_, stream::eval),
                                  &codings);
    Json m{{"dataset", cfg_.dataset},
           {"input", to_string(model.input)},
           {"phi", to_string(model.phi)},
           {"seed", cfg_.seed},
           {"samples", cfg_.eval_samples},
           {"d", cfg_.d},
           {"anchors", dict.size()},
           {"latent_dim", dict.dim()},
           {"autoencoder_mse", reconstruction_mse(ae, data.train.samples)}};

    const CodingSolver solver(dict);
    std::vector<Coding> fitted;
    fitted.reserve(static_cast<std::size_t>(h.rows()));
    for (Index i = 0; i < h.rows(); ++i) fitted.push_back(solver.solve(h.row(i).transpose()));
    m["lcc_objective"] = objective(dict, h, fitted);
    m["lcc_reconstruction_error"] = mean_reconstruction_error(dict, h, fitted);
    m["lcc_quality_embeddings"] =
        generative_quality(dict, h, fitted, dict.lipschitz_h, dict.lipschitz_g);
    if (!codings.empty())
      m["generative_quality"] =
          generative_quality(dict, codings, dict.lipschitz_h, dict.lipschitz_g);

    if (data.mode_centers.rows() > 0) {
      const double radius = cfg_.coverage_radius > 0.0 ? cfg_.coverage_radius : 3.0 * cfg_.sigma;
      const Matrix orig = invert_normalization(data.normalization, x);
      m["coverage"] = coverage_to_json(
          mode_coverage(orig, data.mode_centers, radius, cfg_.coverage_threshold));
      const Matrix real = invert_normalization(data.normalization, data.heldout.samples);
      m["coverage_heldout"] = coverage_to_json(
          mode_coverage(real, data.mode_centers, radius, cfg_.coverage_threshold));
    }
    if (data.images) {
      const std::uint64_t s = stage_seed(cfg_, stream::eval) + 1;
      m["diversity_msssim"] = diversity_msssim(x, cfg_.side, cfg_.msssim_pairs, s);
      m["diversity_msssim_heldout"] =
          diversity_msssim(data.heldout.samples, cfg_.side, cfg_.msssim_pairs, s);
    }

    if (!cfg_.capacity_anchors.empty()) {
      Matrix rows(static_cast<Index>(cfg_.capacity_anchors.size()), 3);
      Json cap = Json::array();
      for (std::size_t k = 0; k < cfg_.capacity_anchors.size(); ++k) {
        const Index mk = cfg_.capacity_anchors[k];
        const LccResult r = learn_dictionary(h, learn_options(cfg_, mk));
        const double err = mean_reconstruction_error(r.dict, h, r.codings);
        rows(static_cast<Index>(k), 0) = static_cast<double>(mk);
        rows(static_cast<Index>(k), 1) = err;
        rows(static_cast<Index>(k), 2) = r.objective_trace.back();
        cap.push_back(Json{{"anchors", mk}, {"reconstruction_error", err}});
      }
      write_csv(out_ / artifact::capacity, rows, {"anchors", "reconstruction_error", "objective"});
      m["reconstruction_vs_m"] = cap;
    }
    write_json(out_ / artifact::metrics, m);
    note(dump_json(m, -1));
  });
}

void Pipeline::gap() {
  stage("gap", [&] {
    const GanModel model = gan_from_json(read_json(require(artifact::gan, "train-gan")));
    const PreparedData data = prepare_data(cfg_);
    GapConfig g;
    g.disc.hidden = cfg_.gap_hidden;
    g.disc.steps = cfg_.gap_steps;
    g.disc.restarts = cfg_.gap_restarts;
    g.disc.learning_rate = cfg_.gap_learning_rate;
    g.rademacher_draws = cfg_.gap_draws;
    g.confidence = cfg_.gap_confidence;
    g.generated = cfg_.gap_generated;
    g.sampler = gan_config(cfg_).sampler;
    g.seed = stage_seed(cfg_, stream::gap);
    const GapReport r = gap_harness(model, data.train, data.heldout, g);
    write_json(out_ / artifact::gap, gap_to_json(r));
    {
      std::ofstream f(out_ / artifact::gap_row, std::ios::binary);
      f << gap_csv_header() << '\n' << gap_csv_row(r, cfg_.seed) << '\n';
      if (!f) throw IoError("cannot write gap csv");
    }
    {
      std::ofstream f(out_ / artifact::gap_vs_bound, std::ios::binary);
      f << "seed,n,gap,bound_value\n"
        << cfg_.seed << ',' << r.n << ',' << format_double(r.gap) << ','
        << format_double(r.bound_value) << '\n';
      if (!f) throw IoError("cannot write gap-vs-bound csv");
    }
    note("gap " + format_double(r.gap) + " bound " + format_double(r.bound_value));
  });
}

void Pipeline::run() {
  train_ae();
  learn_lcc();
  train_gan();
  sample(cfg_.eval_samples);
  eval();
  if (cfg_.gap_in_run && cfg_.input == "lcc") gap();
}

}  // namespace lccgan
