#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lccgan/types.hpp"

namespace lccgan {

// Every field has a default; a config file only lists overrides. Keys are
// dotted ("gan.phi"); a "[gan]" line prefixes the keys that follow.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string out = "runs/default";

  // dataset.*
  std::string dataset = "ring";  // ring | swiss_roll | two_circles | digits
  Index samples = 2000;
  double train_fraction = 0.8;
  Index ambient_dim = 2;
  int modes = 8;
  double radius = 2.0;
  double sigma = 0.05;
  double noise = 0.0;
  std::string images;  // IDX image file for digits; synthesized when empty
  std::string labels;
  Index side = 8;

  // ae.*
  Index latent_dim = 2;  // d_B
  int ae_epochs = 60;
  Index ae_batch = 64;
  std::vector<Index> ae_hidden{64, 64};
  double ae_learning_rate = 1e-3;

  // lcc.*
  Index anchors = 16;  // M
  double lipschitz_h = 1.0;
  double lipschitz_g = 1.0;
  int lcc_outer = 20;
  int lcc_kmeans = 20;

  // gan.*
  long gan_iterations = 3000;
  Index gan_batch = 64;
  double gan_learning_rate = 2e-4;
  Index gan_hidden_width = 128;
  int gan_hidden_layers = 2;
  std::string phi = "log";
  std::string input = "lcc";  // lcc | gaussian
  Index d = 2;                // nonzeros per sampled coding / gaussian prior dimension
  std::string prior = "standard_gaussian";
  std::string pool = "anchors";  // anchors | embeddings

  // eval.*
  Index eval_samples = 2000;
  Index msssim_pairs = 500;
  double coverage_radius = 0.0;  // 0: three times the ring sigma
  double coverage_threshold = 0.01;
  std::vector<Index> capacity_anchors{4, 8, 16};

  // gap.*
  bool gap_in_run = true;
  std::vector<Index> gap_hidden{32, 32};
  int gap_steps = 500;
  int gap_restarts = 3;
  double gap_learning_rate = 0.01;
  int gap_draws = 5;
  double gap_confidence = 0.05;
  Index gap_generated = 0;

  bool operator==(const ExperimentConfig&) const = default;

  /// Range and consistency checks (d <= M, known names, files exist).
  /// Throws ConfigError.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace lccgan
