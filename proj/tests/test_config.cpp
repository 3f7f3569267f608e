#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lccgan/config.hpp"
#include "lccgan/error.hpp"
#include "lccgan/manifest.hpp"
#include "lccgan/rng.hpp"

using namespace lccgan;

namespace {

double pick_double(Rng& rng) {
  switch (rng.index(4)) {
    case 0: return rng.uniform(1e-6, 1e-3);
    case 1: return rng.uniform(0.01, 0.99);
    case 2: return 1.0 / 3.0 + rng.uniform();
    default: return std::ldexp(rng.uniform(0.5, 1.0), static_cast<int>(rng.index(20)) - 10);
  }
}

std::vector<Index> pick_list(Rng& rng) {
  std::vector<Index> v(rng.index(4));
  for (auto& x : v) x = 1 + static_cast<Index>(rng.index(300));
  return v;
}

ExperimentConfig random_config(Rng& rng) {
  ExperimentConfig c;
  c.seed = rng.next_u64();
  c.out = "runs/r" + std::to_string(rng.index(1000));
  const char* kinds[] = {"ring", "swiss_roll", "two_circles"};
  c.dataset = kinds[rng.index(3)];
  c.samples = 10 + static_cast<Index>(rng.index(5000));
  c.train_fraction = rng.uniform(0.1, 0.9);
  c.modes = 2 + static_cast<int>(rng.index(10));
  c.radius = pick_double(rng) + 0.1;
  c.sigma = pick_double(rng);
  c.noise = pick_double(rng);
  c.latent_dim = 1 + static_cast<Index>(rng.index(5));
  c.ae_hidden = pick_list(rng);
  c.ae_learning_rate = pick_double(rng);
  c.anchors = 4 + static_cast<Index>(rng.index(60));
  c.lipschitz_h = pick_double(rng);
  c.lipschitz_g = pick_double(rng);
  c.gan_iterations = static_cast<long>(rng.index(10000));
  c.gan_learning_rate = pick_double(rng);
  c.phi = rng.index(2) ? "log" : "identity";
  c.input = rng.index(2) ? "lcc" : "gaussian";
  c.d = 1 + static_cast<Index>(rng.index(4));
  c.prior = rng.index(2) ? "standard_gaussian" : "normalized_gaussian";
  c.pool = rng.index(2) ? "anchors" : "embeddings";
  c.coverage_radius = pick_double(rng);
  c.capacity_anchors = pick_list(rng);
  c.gap_in_run = rng.index(2) == 0;
  c.gap_hidden = pick_list(rng);
  c.gap_confidence = rng.uniform(0.01, 0.5);
  return c;
}

}  // namespace

TEST_CASE("config round trip over random configs") {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    const ExperimentConfig c = random_config(rng);
    const std::string text = serialize_config(c);
    const ExperimentConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
  }
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(
      "# comment\n"
      "seed = 7\n"
      "\n"
      "[gan]\n"
      "phi = identity   # trailing\n"
      "d = 3\n"
      "[lcc]\n"
      "anchors = 10\n"
      "[]\n"
      "eval.capacity_anchors = 4, 8\n");
  CHECK(c.seed == 7);
  CHECK(c.phi == "identity");
  CHECK(c.d == 3);
  CHECK(c.anchors == 10);
  CHECK(c.capacity_anchors == std::vector<Index>{4, 8});
  CHECK(c.samples == ExperimentConfig{}.samples);
  CHECK(parse_config("") == ExperimentConfig{});
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("gan.unknown = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gan.d = three\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gan.d 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gap.in_run = maybe\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.txt"), ConfigError);

  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  c.d = c.anchors + 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.phi = "sqrt";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.dataset = "digits";
  c.images = "/nonexistent/images.idx";
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("sha256 and manifest") {
  CHECK(sha256_hex_bytes("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex_bytes("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");

  const auto dir = std::filesystem::temp_directory_path() / "lccgen_manifest_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir / "sub");
  std::ofstream(dir / "a.txt") << "abc";
  std::ofstream(dir / "sub" / "b.txt") << "";
  write_manifest(dir, {{"one", true, ""}, {"two", false, "boom"}});
  const auto stages = read_manifest_stages(dir);
  REQUIRE(stages.size() == 2);
  CHECK(stages[0].ok);
  CHECK_FALSE(stages[1].ok);
  CHECK(stages[1].stage == "two");
  CHECK(sha256_hex(dir / "a.txt") == sha256_hex_bytes("abc"));
  std::ifstream in(dir / kManifestName);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find(sha256_hex_bytes("abc") + " a.txt") != std::string::npos);
  CHECK(text.find("sub/b.txt") != std::string::npos);
  std::filesystem::remove_all(dir);
}
