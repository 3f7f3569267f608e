#include "lccgan/gan.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "lccgan/error.hpp"

namespace lccgan {

std::string to_string(Phi phi) { return phi == Phi::log ? "log" : "identity"; }

Phi parse_phi(const std::string& name) {
  if (name == "log") return Phi::log;
  if (name == "identity") return Phi::identity;
  throw ConfigError("unknown measuring function '" + name + "'");
}

double apply_phi(Phi phi, double p) {
  if (phi == Phi::identity) return p;
  return std::log(std::clamp(p, kPhiFloor, 1.0 - kPhiFloor));
}

Tensor apply_phi(Phi phi, const Tensor& p) {
  if (phi == Phi::identity) return p;
  return log(clamp(p, kPhiFloor, 1.0 - kPhiFloor));
}

double phi_constant(Phi phi) { return 2.0 * apply_phi(phi, 0.5); }

double phi_bound(Phi phi) { return phi == Phi::log ? -std::log(kPhiFloor) : 1.0; }

double phi_lipschitz(Phi phi) { return phi == Phi::log ? 1.0 / kPhiFloor : 1.0; }

std::string to_string(GeneratorInput in) { return in == GeneratorInput::lcc ? "lcc" : "gaussian"; }

GeneratorInput parse_generator_input(const std::string& name) {
  if (name == "lcc") return GeneratorInput::lcc;
  if (name == "gaussian" || name == "gaussian_d") return GeneratorInput::gaussian;
  throw ConfigError("unknown generator input '" + name + "'");
}

void GanModel::validate() const {
  generator.validate();
  discriminator.validate();
  if (discriminator.out_dim() != 1 || discriminator.output_activation() != Activation::sigmoid)
    throw DimensionError("discriminator must end in a single sigmoid unit");
  if (generator.out_dim() != discriminator.in_dim())
    throw DimensionError("generator output does not match discriminator input");
  if (input == GeneratorInput::lcc) {
    if (!dict) throw DimensionError("lcc generator requires a dictionary");
    if (dict->dim() != generator.in_dim())
      throw DimensionError("generator input differs from anchor dimension");
  }
}

GanModel init_gan_model(Index data_dim, Index latent_dim, const std::optional<Dictionary>& dict,
                        const GanConfig& cfg) {
  Rng rng(cfg.seed);
  Rng g_rng = rng.derive(1);
  Rng d_rng = rng.derive(2);
  const std::vector<Index> hidden(static_cast<std::size_t>(cfg.hidden_layers), cfg.hidden_width);

  GanModel m;
  m.phi = cfg.phi;
  m.input = cfg.input;
  m.dict = dict;
  if (cfg.input == GeneratorInput::lcc) {
    if (!dict) throw ConfigError("lcc generator input requires a dictionary");
    m.generator = he_init(mlp_dims(dict->dim(), hidden, data_dim), Activation::tanh,
                          Activation::tanh, g_rng);
  } else {
    // Trainable linear map z -> R^{d_B} in front of the same network.
    const std::array<Index, 2> lin{cfg.sampler.d, latent_dim};
    NetworkParams front = he_init(lin, Activation::identity, Activation::identity, g_rng);
    NetworkParams body = he_init(mlp_dims(latent_dim, hidden, data_dim), Activation::tanh,
                                 Activation::tanh, g_rng);
    m.generator.layers = std::move(front.layers);
    for (auto& l : body.layers) m.generator.layers.push_back(std::move(l));
    m.dict.reset();
  }
  m.discriminator = he_init(mlp_dims(data_dim, hidden, 1), Activation::tanh, Activation::sigmoid,
                            d_rng);
  m.validate();
  return m;
}

Matrix generate(const GanModel& model, const Matrix& input) {
  return forward(model.generator, input);
}

Matrix generate(const GanModel& model, const std::vector<Coding>& codings) {
  if (model.input != GeneratorInput::lcc || !model.dict)
    throw ConfigError("generate from codings needs an lcc model");
  return generate(model, reconstruct_all(*model.dict, codings));
}

double disc_objective(const GanModel& model, const Matrix& real_batch, const Matrix& gen_input) {
  const Matrix fake = generate(model, gen_input);
  const Matrix d_real = forward(model.discriminator, real_batch);
  const Matrix d_fake = forward(model.discriminator, fake);
  double s = 0.0;
  for (Index i = 0; i < d_real.rows(); ++i) s += apply_phi(model.phi, d_real(i, 0));
  double t = 0.0;
  for (Index i = 0; i < d_fake.rows(); ++i) t += apply_phi(model.phi, 1.0 - d_fake(i, 0));
  return s / static_cast<double>(d_real.rows()) + t / static_cast<double>(d_fake.rows());
}

double gen_objective(const GanModel& model, const Matrix& gen_input) {
  const Matrix d_fake = forward(model.discriminator, generate(model, gen_input));
  double t = 0.0;
  for (Index i = 0; i < d_fake.rows(); ++i) t += apply_phi(model.phi, 1.0 - d_fake(i, 0));
  return t / static_cast<double>(d_fake.rows());
}

GradientResult disc_gradients(const GanModel& model, const Matrix& real_batch,
                              const Matrix& gen_input) {
  if (real_batch.rows() != gen_input.rows())
    throw DimensionError("disc_step: real and generated batches differ in size");
  const Matrix fake = generate(model, gen_input);
  Tape tape;
  const BoundNetwork d = bind(tape, model.discriminator);
  const Tensor real_out = forward(model.discriminator, d, tape.constant(real_batch));
  const Tensor fake_out = forward(model.discriminator, d, tape.constant(fake));
  const Tensor objective =
      add(mean(apply_phi(model.phi, real_out)), mean(apply_phi(model.phi, one_minus(fake_out))));
  const Gradients g = tape.backward(objective);
  return {objective.item(), gradients_of(g, d, model.discriminator)};
}

GradientResult gen_gradients(const GanModel& model, const Matrix& gen_input) {
  Tape tape;
  const BoundNetwork gb = bind(tape, model.generator);
  const Tensor fake = forward(model.generator, gb, tape.constant(gen_input));
  const Tensor out = forward(model.discriminator, fake);
  const Tensor objective = mean(apply_phi(model.phi, one_minus(out)));
  const Gradients g = tape.backward(objective);
  return {objective.item(), gradients_of(g, gb, model.generator)};
}

namespace {

NetworkParams negated(NetworkParams p) {
  for (auto& l : p.layers) {
    l.weight = -l.weight;
    l.bias = -l.bias;
  }
  return p;
}

}  // namespace

StepResult disc_step(GanModel& model, const Matrix& real_batch, const Matrix& gen_input,
                     AdamState& disc_state) {
  const GradientResult g = disc_gradients(model, real_batch, gen_input);
  adam_step(model.discriminator, negated(g.grads), disc_state);
  return {g.objective, norm(g.grads)};
}

StepResult gen_step(GanModel& model, const Matrix& gen_input, AdamState& gen_state) {
  const GradientResult g = gen_gradients(model, gen_input);
  adam_step(model.generator, g.grads, gen_state);
  return {g.objective, norm(g.grads)};
}

InputSampler::InputSampler(const GanModel& model, const SamplerConfig& sampler, Matrix pool)
    : dict_(model.dict),
      input_(model.input),
      noise_dim_(model.input == GeneratorInput::gaussian ? model.generator.in_dim() : 0),
      sampler_(sampler),
      pool_(std::move(pool)) {
  if (input_ == GeneratorInput::lcc) {
    if (!dict_) throw ConfigError("lcc sampling needs a dictionary");
    sampler_.validate(dict_->size());
  }
}

Matrix InputSampler::draw(Index n, Rng& rng, std::vector<Coding>* codings) const {
  if (input_ == GeneratorInput::gaussian) {
    if (codings) codings->clear();
    return rng.normal_matrix(n, noise_dim_);
  }
  SampleBatch b = sample_batch(*dict_, sampler_, pool_, n, rng);
  if (codings) *codings = std::move(b.codings);
  return b.latent;
}

Matrix sampling_pool(const Dictionary& dict, const Matrix& embeddings, bool use_embeddings) {
  return use_embeddings ? embeddings : dict.anchors();
}

namespace {

std::string batch_snapshot(long iteration, const Matrix& real, const Matrix& disc_input,
                           const Matrix& gen_input) {
  Json j{{"iteration", iteration},
         {"real_batch", matrix_to_json(real)},
         {"disc_generator_input", matrix_to_json(disc_input)},
         {"gen_generator_input", matrix_to_json(gen_input)}};
  return dump_json(j, -1);
}

}  // namespace

GanTrainResult gan_train(const Dataset& ds, const AutoEncoder& ae, const Dictionary& dict,
                         const GanConfig& cfg, const GanObserver& observer) {
  ds.validate();
  if (cfg.iterations < 0) throw ConfigError("iterations must be >= 0");
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (ae.latent_dim() != dict.dim()) throw DimensionError("autoencoder and dictionary disagree on d_B");
  if (ae.data_dim() != ds.dim()) throw DimensionError("autoencoder and dataset disagree on d");

  GanTrainResult res;
  const std::optional<Dictionary> d =
      cfg.input == GeneratorInput::lcc ? std::optional<Dictionary>(dict) : std::nullopt;
  res.model = init_gan_model(ds.dim(), dict.dim(), d, cfg);
  GanModel& model = res.model;

  const Matrix pool = cfg.input == GeneratorInput::lcc && cfg.pool_embeddings
                          ? embed(ae, ds)
                          : sampling_pool(dict, Matrix(), false);
  const InputSampler inputs(model, cfg.sampler, pool);

  AdamState d_state = AdamState::for_params(model.discriminator, cfg.adam);
  AdamState g_state = AdamState::for_params(model.generator, cfg.adam);
  Rng rng = Rng(cfg.seed).derive(3);

  res.log.seed = cfg.seed;
  res.log.config = {{"iterations", cfg.iterations},
                    {"batch_size", cfg.batch_size},
                    {"learning_rate", cfg.adam.learning_rate},
                    {"beta1", cfg.adam.beta1},
                    {"beta2", cfg.adam.beta2},
                    {"hidden_width", cfg.hidden_width},
                    {"hidden_layers", cfg.hidden_layers},
                    {"phi", to_string(cfg.phi)},
                    {"input", to_string(cfg.input)},
                    {"d", cfg.sampler.d},
                    {"prior", to_string(cfg.sampler.prior)},
                    {"pool", cfg.pool_embeddings ? "embeddings" : "anchors"}};

  std::vector<Coding> disc_codings, gen_codings;
  Matrix real(cfg.batch_size, ds.dim());
  for (long it = 0; it < cfg.iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();

    const Matrix disc_input = inputs.draw(cfg.batch_size, rng, &disc_codings);
    for (Index i = 0; i < cfg.batch_size; ++i)
      real.row(i) = ds.samples.row(static_cast<Index>(rng.index(static_cast<std::uint64_t>(ds.size()))));
    const Matrix gen_input = inputs.draw(cfg.batch_size, rng, &gen_codings);

    StepResult ds_res, gs_res;
    try {
      ds_res = disc_step(model, real, disc_input, d_state);
      if (!std::isfinite(ds_res.objective) || !std::isfinite(ds_res.gradient_norm))
        throw ContractError("non-finite discriminator objective");
      gs_res = gen_step(model, gen_input, g_state);
      if (!std::isfinite(gs_res.objective) || !std::isfinite(gs_res.gradient_norm))
        throw ContractError("non-finite generator objective");
    } catch (const ContractError& e) {
      throw TrainingError(std::string(e.what()) + " at iteration " + std::to_string(it),
                          batch_snapshot(it, real, disc_input, gen_input));
    }

    if (observer) observer(IterationTrace{it, disc_codings, gen_codings});

    const auto t1 = std::chrono::steady_clock::now();
    res.log.records.push_back(TrainRecord{
        it, ds_res.objective, gs_res.objective, ds_res.gradient_norm, gs_res.gradient_norm,
        std::chrono::duration<double, std::milli>(t1 - t0).count()});
  }
  return res;
}

Json gan_to_json(const GanModel& model) {
  Json j{{"kind", "gan"},
         {"phi", to_string(model.phi)},
         {"input", to_string(model.input)},
         {"generator", network_to_json(model.generator)},
         {"discriminator", network_to_json(model.discriminator)}};
  if (model.dict) j["dictionary"] = dictionary_to_json(*model.dict);
  return j;
}

GanModel gan_from_json(const Json& j) {
  GanModel m;
  try {
    m.phi = parse_phi(j.at("phi").get<std::string>());
    m.input = parse_generator_input(j.at("input").get<std::string>());
    m.generator = network_from_json(j.at("generator"));
    m.discriminator = network_from_json(j.at("discriminator"));
    if (j.contains("dictionary")) m.dict = dictionary_from_json(j.at("dictionary"));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed gan checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("malformed gan checkpoint: ") + e.what());
  }
  try {
    m.validate();
  } catch (const DimensionError& e) {
    throw FormatError(e.what());
  }
  return m;
}

Json train_record_to_json(const TrainRecord& r, bool with_time) {
  Json j{{"iteration", r.iteration},
         {"disc_objective", r.disc_objective},
         {"gen_objective", r.gen_objective},
         {"disc_grad_norm", r.disc_grad_norm},
         {"gen_grad_norm", r.gen_grad_norm}};
  if (with_time) j["wall_ms"] = r.wall_ms;
  return j;
}

void write_train_log(const std::filesystem::path& path, const TrainLog& log) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  for (const auto& r : log.records) {
    Json j = train_record_to_json(r);
    j["seed"] = log.seed;
    f << dump_json(j, -1) << '\n';
  }
  if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace lccgan
