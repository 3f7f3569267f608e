#include <CLI11.hpp>

#include <Eigen/Core>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "lccgan/config.hpp"
#include "lccgan/error.hpp"
#include "lccgan/pipeline.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kStageFailure = 3;

int threads_from_env() {
  const char* v = std::getenv("LCCGEN_THREADS");
  if (!v || !*v) return 1;
  try {
    const int n = std::stoi(v);
    if (n < 1) throw std::invalid_argument("");
    return n;
  } catch (const std::exception&) {
    throw lccgan::ConfigError(std::string("LCCGEN_THREADS must be a positive integer, got '") + v + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lccgen: LCC-GAN experiments on desk-scale data"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  app.add_option("--config", config_path, "experiment config (key = value)");
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--out", out, "output directory (overrides the config)");

  lccgan::Index n_samples = 64;
  auto* train_ae = app.add_subcommand("train-ae", "train the autoencoder");
  auto* learn_lcc = app.add_subcommand("learn-lcc", "learn LCC anchors on the embeddings");
  auto* train_gan = app.add_subcommand("train-gan", "train the generator and discriminator");
  auto* sample = app.add_subcommand("sample", "write generated samples");
  sample->add_option("--n", n_samples, "number of samples")->check(CLI::PositiveNumber);
  auto* eval = app.add_subcommand("eval", "diversity, coverage and LCC metrics");
  auto* gap = app.add_subcommand("gap", "generalization gap and bound");
  auto* run = app.add_subcommand("run", "all stages in order");
  auto* show = app.add_subcommand("show-config", "print the resolved config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  std::optional<lccgan::Pipeline> pipeline;
  try {
    Eigen::setNbThreads(threads_from_env());
    lccgan::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = lccgan::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out) cfg.out = *out;
    if (*show) {
      cfg.validate();
      std::cout << lccgan::serialize_config(cfg);
      return 0;
    }
    pipeline.emplace(std::move(cfg), &std::cerr);
  } catch (const lccgan::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kStageFailure;
  }

  try {
    if (*train_ae) pipeline->train_ae();
    if (*learn_lcc) pipeline->learn_lcc();
    if (*train_gan) pipeline->train_gan();
    if (*sample) pipeline->sample(n_samples);
    if (*eval) pipeline->eval();
    if (*gap) pipeline->gap();
    if (*run) pipeline->run();
  } catch (const lccgan::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "stage failed: " << e.what() << '\n';
    return kStageFailure;
  }
  return 0;
}
