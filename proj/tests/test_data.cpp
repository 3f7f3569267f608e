#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "lccgan/dataset.hpp"
#include "lccgan/rng.hpp"
#include "lccgan/error.hpp"

using namespace lccgan;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("lccgan_" + name); }

std::vector<double> sorted_rows_key(const Matrix& m) {
  std::vector<double> v(m.data(), m.data() + m.size());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("noise-free ring sits on the mode centers") {
  const Dataset ds = generate(ManifoldSpec::ring(8, 2.0, 0.0, 3), 500);
  const Matrix c = ManifoldSpec::ring(8, 2.0, 0.0, 3).mode_centers();
  for (Index k = 0; k < 8; ++k) CHECK(c.row(k).norm() == doctest::Approx(2.0).epsilon(1e-15));
  for (Index i = 0; i < ds.size(); ++i) {
    const int k = ds.labels[static_cast<std::size_t>(i)];
    CHECK(ds.samples.row(i) == c.row(k));
  }
}

TEST_CASE("swiss roll satisfies its parametrisation") {
  const Dataset ds = generate(ManifoldSpec::swiss_roll(0.0, 1), 1000);
  for (Index i = 0; i < ds.size(); ++i) {
    const double x = ds.samples(i, 0), z = ds.samples(i, 2);
    const double t = std::hypot(x, z);
    CHECK(std::abs(x - t * std::cos(t)) < 1e-9);
    CHECK(std::abs(z - t * std::sin(t)) < 1e-9);
  }
}

TEST_CASE("ring mode counts follow multinomial statistics") {
  const Index n = 10000;
  const Dataset ds = generate(ManifoldSpec::ring(8, 2.0, 0.05, 17), n);
  std::vector<int> counts(8, 0);
  for (int l : ds.labels) ++counts[static_cast<std::size_t>(l)];
  const double p = 1.0 / 8, sd = std::sqrt(n * p * (1 - p));
  for (int c : counts) CHECK(std::abs(c - n * p) <= 3 * sd);
}

TEST_CASE("generate is pure") {
  const ManifoldSpec s = ManifoldSpec::two_circles(0.02, 5);
  CHECK(generate(s, 300).samples == generate(s, 300).samples);
}

TEST_CASE("invalid specs are config errors") {
  ManifoldSpec s = ManifoldSpec::swiss_roll(0.0, 1);
  s.ambient_dim = 2;
  CHECK_THROWS_AS(generate(s, 10), ConfigError);
  CHECK_THROWS_AS(parse_manifold_kind("torus"), ConfigError);
  ManifoldSpec r = ManifoldSpec::ring(8, 2.0, 0.05, 1);
  r.intrinsic_dim = 3;
  CHECK_THROWS_AS(r.validate(), ConfigError);
}

TEST_CASE("normalisation maps into [-1,1], is idempotent and invertible") {
  const Dataset raw = generate(ManifoldSpec::swiss_roll(0.1, 2), 400);
  const Dataset once = normalize(raw);
  CHECK(once.samples.maxCoeff() <= 1.0);
  CHECK(once.samples.minCoeff() >= -1.0);
  CHECK(normalize(once).samples == once.samples);
  Dataset stripped = once;
  stripped.normalization.reset();
  CHECK((normalize(stripped).samples - once.samples).cwiseAbs().maxCoeff() < 1e-15);
  const Matrix back = invert_normalization(*once.normalization, once.samples);
  CHECK((back - raw.samples).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("split partitions deterministically") {
  Dataset ds;
  ds.samples.resize(10, 1);
  for (Index i = 0; i < 10; ++i) ds.samples(i, 0) = static_cast<double>(i);
  const auto [a, b] = split(ds, 0.8, 4);
  CHECK(a.size() == 8);
  CHECK(b.size() == 2);
  Matrix all(10, 1);
  all << a.samples, b.samples;
  CHECK(sorted_rows_key(all) == sorted_rows_key(ds.samples));
  const auto [a2, b2] = split(ds, 0.8, 4);
  CHECK(a2.samples == a.samples);
  CHECK_THROWS_AS(split(ds, 1.0, 4), ConfigError);
  CHECK_THROWS_AS(split(ds, 0.0, 4), ConfigError);
}

TEST_CASE("different seeds give different splits") {
  Dataset ds;
  ds.samples.resize(20, 1);
  for (Index i = 0; i < 20; ++i) ds.samples(i, 0) = static_cast<double>(i);
  int differ = 0;
  for (std::uint64_t s = 0; s < 100; ++s)
    if (split(ds, 0.5, 2 * s).first.samples != split(ds, 0.5, 2 * s + 1).first.samples) ++differ;
  CHECK(differ >= 99);
}

TEST_CASE("idx constant images pool to constant values") {
  const auto img = temp_file("const.idx");
  std::vector<std::uint8_t> px(2 * 784, 0);
  std::fill(px.begin() + 784, px.end(), 255);
  write_idx_images(img, px, 2, 28, 28);
  const Dataset ds = load_idx(img, {}, 8);
  CHECK(ds.size() == 2);
  CHECK(ds.dim() == 64);
  CHECK((ds.samples.row(0).array() == -1.0).all());
  CHECK((ds.samples.row(1).array() == 1.0).all());
  fs::remove(img);
}

TEST_CASE("idx magic and truncation are checked") {
  const auto img = temp_file("img.idx"), lab = temp_file("lab.idx");
  write_idx_images(img, std::vector<std::uint8_t>(3 * 16, 7), 3, 4, 4);
  write_idx_labels(lab, {1, 2, 3});
  const Dataset ok = load_idx(img, lab, 2);
  CHECK(ok.labels == std::vector<int>{1, 2, 3});
  // Labels file in the image slot has the wrong magic.
  CHECK_THROWS_AS(load_idx(lab, {}, 2), FormatError);
  // Images file in the label slot likewise.
  CHECK_THROWS_AS(load_idx(img, img, 2), FormatError);
  // Chop the payload.
  fs::resize_file(img, fs::file_size(img) - 5);
  CHECK_THROWS_AS(load_idx(img, {}, 2), IoError);
  fs::remove(img);
  fs::remove(lab);
}

TEST_CASE("mean pooling preserves mass") {
  Rng rng(3);
  const Matrix img = rng.normal_matrix(28, 28);
  const Matrix p = mean_pool(img, 8);
  CHECK(p.mean() == doctest::Approx(img.mean()).epsilon(1e-12));
  const Matrix same = mean_pool(img, 28);
  CHECK((same - img).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rendered digits are deterministic and labelled") {
  const auto [px, labels] = render_digits(20, 8);
  const auto [px2, labels2] = render_digits(20, 8);
  CHECK(px == px2);
  CHECK(labels.size() == 20);
  CHECK(px.size() == 20 * 784);
  for (auto l : labels) CHECK(l <= 9);
  CHECK(*std::max_element(px.begin(), px.end()) > 128);
}

TEST_CASE("csv export writes one row per sample") {
  const auto path = temp_file("rows.csv");
  Matrix m(3, 2);
  m << 1, 2, 3, 4, 5, 0.1;
  write_csv(path, m, {"a", "b"});
  std::ifstream f(path);
  std::string line;
  int lines = 0;
  while (std::getline(f, line)) ++lines;
  CHECK(lines == 4);
  fs::remove(path);
}
