#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lccgan/adam.hpp"
#include "lccgan/autoencoder.hpp"
#include "lccgan/checkpoint.hpp"
#include "lccgan/lcc.hpp"
#include "lccgan/sampler.hpp"

namespace lccgan {

// Measuring function applied to discriminator outputs. Inputs to log are
// clamped to [kPhiFloor, 1 - kPhiFloor].
enum class Phi { log, identity };

inline constexpr double kPhiFloor = 1e-7;

std::string to_string(Phi phi);
Phi parse_phi(const std::string& name);

double apply_phi(Phi phi, double p);
Tensor apply_phi(Phi phi, const Tensor& p);
/// 2 * phi(1/2).
double phi_constant(Phi phi);
/// Bound Delta with |phi| <= Delta on the clamped range.
double phi_bound(Phi phi);
/// Lipschitz constant L_phi of phi on the clamped range.
double phi_lipschitz(Phi phi);

enum class GeneratorInput {
  lcc,       // gamma -> V gamma -> G_u
  gaussian,  // z ~ N(0, I_d) -> trainable linear layer to d_B -> G_u
};

std::string to_string(GeneratorInput in);
GeneratorInput parse_generator_input(const std::string& name);

struct GanModel {
  NetworkParams generator;
  NetworkParams discriminator;
  std::optional<Dictionary> dict;  // fixed during training; lcc input only
  Phi phi = Phi::log;
  GeneratorInput input = GeneratorInput::lcc;

  /// Width of the generator's input rows (d_B for lcc, d for gaussian).
  Index input_dim() const { return generator.in_dim(); }
  void validate() const;
};

struct GanConfig {
  long iterations = 5000;
  Index batch_size = 64;
  AdamOptions adam{2e-4, 0.9, 0.999, 1e-8};
  Index hidden_width = 128;
  int hidden_layers = 2;
  Phi phi = Phi::log;
  GeneratorInput input = GeneratorInput::lcc;
  SamplerConfig sampler;        // d doubles as the gaussian prior dimension
  bool pool_embeddings = false;  // seed points from embeddings instead of anchors
  std::uint64_t seed = 0;
};

/// Generator (d_B or d -> data) and discriminator (data -> (0,1)) at He init.
GanModel init_gan_model(Index data_dim, Index latent_dim, const std::optional<Dictionary>& dict,
                        const GanConfig& cfg);

/// G_u(V gamma) for each coding (lcc models).
Matrix generate(const GanModel& model, const std::vector<Coding>& codings);
/// G applied to prepared input rows (V gamma rows, or z rows for gaussian models).
Matrix generate(const GanModel& model, const Matrix& input);

struct StepResult {
  double objective = 0.0;      // at the parameters before the update
  double gradient_norm = 0.0;
};

struct GradientResult {
  double objective = 0.0;
  NetworkParams grads;  // of the objective (not of its negation)
};

/// Gradient of the discriminator objective w.r.t. the discriminator.
GradientResult disc_gradients(const GanModel& model, const Matrix& real_batch,
                              const Matrix& gen_input);
/// Gradient of the generator objective w.r.t. the generator.
GradientResult gen_gradients(const GanModel& model, const Matrix& gen_input);

/// One Adam ascent step on mean phi(D(x)) + mean phi(1 - D(G(input))).
StepResult disc_step(GanModel& model, const Matrix& real_batch, const Matrix& gen_input,
                     AdamState& disc_state);
/// One Adam descent step on mean phi(1 - D(G(input))).
StepResult gen_step(GanModel& model, const Matrix& gen_input, AdamState& gen_state);

/// Objective values without updating (for tests and diagnostics).
double disc_objective(const GanModel& model, const Matrix& real_batch, const Matrix& gen_input);
double gen_objective(const GanModel& model, const Matrix& gen_input);

struct TrainRecord {
  long iteration = 0;
  double disc_objective = 0.0;
  double gen_objective = 0.0;
  double disc_grad_norm = 0.0;
  double gen_grad_norm = 0.0;
  double wall_ms = 0.0;  // excluded from determinism comparisons
};

struct TrainLog {
  std::vector<TrainRecord> records;
  std::uint64_t seed = 0;
  Json config;
};

/// Draws generator inputs for one minibatch.
class InputSampler {
 public:
  InputSampler(const GanModel& model, const SamplerConfig& sampler, Matrix pool);
  /// Rows ready for generate(model, rows); codings filled for lcc models.
  Matrix draw(Index n, Rng& rng, std::vector<Coding>* codings = nullptr) const;

 private:
  std::optional<Dictionary> dict_;
  GeneratorInput input_;
  Index noise_dim_;
  SamplerConfig sampler_;
  Matrix pool_;
};

struct IterationTrace {
  long iteration;
  const std::vector<Coding>& disc_codings;
  const std::vector<Coding>& gen_codings;
};
using GanObserver = std::function<void(const IterationTrace&)>;

struct GanTrainResult {
  GanModel model;
  TrainLog log;
};

/// Alternating loop: fresh codings + data batch -> discriminator ascent,
/// fresh codings -> generator descent. `ds` must already be normalised.
/// Throws TrainingError (with a JSON snapshot of the batch) on a non-finite loss.
GanTrainResult gan_train(const Dataset& ds, const AutoEncoder& ae, const Dictionary& dict,
                         const GanConfig& cfg, const GanObserver& observer = {});

/// Generator input pool implied by the configuration (anchors or embeddings).
Matrix sampling_pool(const Dictionary& dict, const Matrix& embeddings, bool use_embeddings);

Json gan_to_json(const GanModel& model);
GanModel gan_from_json(const Json& j);

Json train_record_to_json(const TrainRecord& r, bool with_time = true);
void write_train_log(const std::filesystem::path& path, const TrainLog& log);

}  // namespace lccgan
