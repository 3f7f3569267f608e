#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lccgan/checkpoint.hpp"
#include "lccgan/gap.hpp"
#include "lccgan/manifest.hpp"

using namespace lccgan;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "lccgen_cli_test";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes a small config and returns its path.
fs::path write_config(const std::string& name, const std::string& extra) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / (name + ".txt");
  std::ofstream(p) << "dataset.samples = 400\n"
                      "ae.epochs = 5\n"
                      "lcc.anchors = 8\n"
                      "lcc.outer_iterations = 3\n"
                      "gan.iterations = 40\n"
                      "gan.hidden_width = 32\n"
                      "eval.samples = 200\n"
                      "eval.capacity_anchors = 4,8\n"
                      "gap.steps = 30\n"
                      "gap.restarts = 1\n"
                      "gap.rademacher_draws = 2\n"
                   << extra;
  return p;
}

struct Outcome {
  int code;
  std::string err;
};

Outcome lccgen(const std::string& args) {
  const fs::path err = kRoot / "stderr.txt";
  const std::string cmd = std::string(LCCGEN_BINARY) + " " + args + " 2> " + err.string() + " > " +
                          (kRoot / "stdout.txt").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

Index data_rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  Index rows = 0;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (!line.empty()) ++rows;
  }
  return rows;
}

}  // namespace

TEST_CASE("cli rejects bad configs before running any stage") {
  const fs::path out = kRoot / "bad";
  fs::remove_all(out);
  const fs::path cfg = write_config("bad", "gan.d = 9\n");
  const Outcome o = lccgen("--config " + cfg.string() + " --out " + out.string() + " run");
  CHECK(o.code == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(lccgen("--config " + (kRoot / "missing.txt").string() + " run").code == 2);
  CHECK(lccgen("no-such-command").code == 2);
  CHECK(lccgen("--config " + cfg.string() + " show-config").code == 2);
}

TEST_CASE("cli reports stage order") {
  const fs::path out = kRoot / "order";
  fs::remove_all(out);
  const fs::path cfg = write_config("order", "");
  const Outcome o = lccgen("--config " + cfg.string() + " --out " + out.string() + " sample --n 8");
  CHECK(o.code == 3);
  CHECK(o.err.find("stage order") != std::string::npos);
  CHECK(o.err.find("gan.json") != std::string::npos);
  const auto stages = read_manifest_stages(out);
  REQUIRE_FALSE(stages.empty());
  CHECK_FALSE(stages.back().ok);
}

TEST_CASE("cli stages, manifest, sample count and gap identities") {
  const fs::path out = kRoot / "stages";
  fs::remove_all(out);
  const std::string base = "--config " + write_config("stages", "").string() + " --out " + out.string();
  for (const char* cmd : {"train-ae", "learn-lcc", "train-gan", "eval", "gap"})
    REQUIRE(lccgen(base + " " + cmd).code == 0);
  REQUIRE(lccgen(base + " sample --n 64").code == 0);
  CHECK(data_rows(out / "samples.csv") == 64);

  const GapReport r = gap_from_json(Json::parse(slurp(out / "gap.json")));
  CHECK_NOTHROW(r.validate());
  CHECK(r.recomputed_bound() == r.bound_value);

  // Every listed artifact exists under the output directory with the listed hash.
  std::istringstream manifest(slurp(out / kManifestName));
  std::string kind, a, b;
  int files = 0;
  while (manifest >> kind) {
    if (kind == "file") {
      manifest >> a >> b;
      CHECK(sha256_hex(out / b) == a);
      ++files;
    } else {
      std::getline(manifest, a);
    }
  }
  CHECK(files >= 10);
  for (const auto& e : fs::recursive_directory_iterator(out))
    if (e.is_regular_file() && e.path().filename() != kManifestName)
      CHECK(slurp(out / kManifestName).find(fs::relative(e.path(), out).generic_string()) !=
            std::string::npos);
  for (const auto& s : read_manifest_stages(out)) CHECK(s.ok);
}

TEST_CASE("cli run is reproducible and seed overrides the config") {
  const fs::path cfg = write_config("repro", "gap.in_run = false\n");
  for (const char* d : {"r1", "r2", "r3"}) fs::remove_all(kRoot / d);
  REQUIRE(lccgen("--config " + cfg.string() + " --out " + (kRoot / "r1").string() + " run").code == 0);
  REQUIRE(lccgen("--config " + cfg.string() + " --out " + (kRoot / "r2").string() + " run").code == 0);
  CHECK(slurp(kRoot / "r1" / "metrics.json") == slurp(kRoot / "r2" / "metrics.json"));
  CHECK(slurp(kRoot / "r1" / "samples.csv") == slurp(kRoot / "r2" / "samples.csv"));
  REQUIRE(lccgen("--config " + cfg.string() + " --seed 99 --out " + (kRoot / "r3").string() + " run")
              .code == 0);
  CHECK(slurp(kRoot / "r1" / "samples.csv") != slurp(kRoot / "r3" / "samples.csv"));
  CHECK(slurp(kRoot / "r3" / "config.txt").find("seed = 99") != std::string::npos);
}

TEST_CASE("untrained generator collapses on the ring") {
  const fs::path out = kRoot / "untrained";
  fs::remove_all(out);
  const fs::path cfg = write_config("untrained", "gan.iterations = 0\neval.samples = 2000\ngap.in_run = false\n");
  REQUIRE(lccgen("--config " + cfg.string() + " --seed 1 --out " + out.string() + " run").code == 0);
  const Json m = Json::parse(slurp(out / "metrics.json"));
  CHECK(m.at("coverage").at("covered").get<Index>() <= 2);
}

TEST_CASE("cli digits run writes a pgm grid") {
  const fs::path out = kRoot / "digits";
  fs::remove_all(out);
  const fs::path cfg = write_config(
      "digits", "dataset.kind = digits\nlcc.anchors = 8\nae.latent_dim = 3\ngan.d = 3\n"
                "eval.msssim_pairs = 20\ngap.in_run = false\n");
  REQUIRE(lccgen("--config " + cfg.string() + " --out " + out.string() + " run").code == 0);
  const std::string pgm = slurp(out / "samples.pgm");
  CHECK(pgm.rfind("P5", 0) == 0);
  const Json m = Json::parse(slurp(out / "metrics.json"));
  CHECK(m.contains("diversity_msssim"));
  CHECK(m.at("diversity_msssim").get<double>() <= 1.0);
}
