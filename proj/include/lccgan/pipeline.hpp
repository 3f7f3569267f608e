#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "lccgan/config.hpp"
#include "lccgan/dataset.hpp"
#include "lccgan/gap.hpp"
#include "lccgan/manifest.hpp"

namespace lccgan {

/// A stage was run before the stage that produces its input.
class StageOrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PreparedData {
  Dataset train;    // normalised
  Dataset heldout;  // normalised
  Normalization normalization;
  Matrix mode_centers;  // original coordinates; empty unless ring
  bool images = false;
};

/// Deterministic dataset construction, normalisation and train/held-out split.
PreparedData prepare_data(const ExperimentConfig& cfg);

// Artifact file names inside the output directory.
namespace artifact {
inline constexpr const char* config = "config.txt";
inline constexpr const char* ae = "ae.json";
inline constexpr const char* ae_loss = "ae_loss.csv";
inline constexpr const char* embeddings = "embeddings.csv";
inline constexpr const char* dictionary = "dictionary.json";
inline constexpr const char* codings = "codings.csv";
inline constexpr const char* lcc_trace = "lcc_trace.csv";
inline constexpr const char* gan = "gan.json";
inline constexpr const char* train_log = "trainlog.jsonl";
inline constexpr const char* loss_curve = "loss_curve.csv";
inline constexpr const char* samples = "samples.csv";
inline constexpr const char* sample_grid = "samples.pgm";
inline constexpr const char* metrics = "metrics.json";
inline constexpr const char* capacity = "reconstruction_vs_m.csv";
inline constexpr const char* gap = "gap.json";
inline constexpr const char* gap_row = "gap.csv";
inline constexpr const char* gap_vs_bound = "gap_vs_bound.csv";
}  // namespace artifact

// Stages read and write checkpoints under cfg.out. Each call records its
// outcome in the MANIFEST, including failures, and rethrows on failure.
class Pipeline {
 public:
  /// Validates the config (ConfigError) and creates the output directory.
  explicit Pipeline(ExperimentConfig cfg, std::ostream* log = nullptr);

  void train_ae();
  void learn_lcc();
  void train_gan();
  void sample(Index n);
  void eval();
  void gap();
  /// train-ae, learn-lcc, train-gan, sample, eval and (if enabled) gap.
  void run();

  const std::filesystem::path& out() const { return out_; }
  const ExperimentConfig& config() const { return cfg_; }

 private:
  template <class Fn>
  void stage(const std::string& name, Fn&& fn);
  std::filesystem::path require(const char* name, const char* producer) const;
  void note(const std::string& msg) const;

  ExperimentConfig cfg_;
  std::filesystem::path out_;
  std::ostream* log_;
};

/// Binary PGM of the images (rows of side*side values in [-1, 1]) tiled in a grid.
void write_pgm_grid(const std::filesystem::path& path, const Matrix& images, Index side);

/// Stream seed for a named purpose, derived from the experiment seed.
std::uint64_t stage_seed(const ExperimentConfig& cfg, std::uint64_t stream);

}  // namespace lccgan
