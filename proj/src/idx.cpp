#include <array>
#include <cmath>
#include <fstream>

#include "lccgan/dataset.hpp"
#include "lccgan/error.hpp"
#include "lccgan/rng.hpp"

namespace lccgan {
namespace {

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError(path.string() + ": truncated header");
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::vector<std::uint8_t> read_payload(std::istream& in, std::size_t bytes,
                                       const std::filesystem::path& path) {
  std::vector<std::uint8_t> data(bytes);
  if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes)))
    throw IoError(path.string() + ": truncated payload, expected " + std::to_string(bytes) +
                  " bytes");
  return data;
}

// Row i of the result holds the overlap of output cell i with each source cell,
// so pooled = P * image * P^T / area.
Matrix overlap_matrix(Index src, Index side) {
  Matrix p = Matrix::Zero(side, src);
  const double step = static_cast<double>(src) / static_cast<double>(side);
  for (Index i = 0; i < side; ++i) {
    const double lo = step * static_cast<double>(i);
    const double hi = step * static_cast<double>(i + 1);
    for (Index k = static_cast<Index>(std::floor(lo)); k < src && static_cast<double>(k) < hi; ++k) {
      const double a = std::max(lo, static_cast<double>(k));
      const double b = std::min(hi, static_cast<double>(k + 1));
      if (b > a) p(i, k) = b - a;
    }
  }
  return p;
}

}  // namespace

Matrix mean_pool(const Matrix& image, Index side) {
  if (side < 1 || side > image.rows() || side > image.cols())
    throw ConfigError("mean_pool: target side must lie in [1, source side]");
  const Matrix pr = overlap_matrix(image.rows(), side);
  const Matrix pc = overlap_matrix(image.cols(), side);
  const double area = (static_cast<double>(image.rows()) / static_cast<double>(side)) *
                      (static_cast<double>(image.cols()) / static_cast<double>(side));
  Matrix pooled = pr * image * pc.transpose();
  return pooled / area;
}

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path, Index side) {
  std::ifstream in(images_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + images_path.string());
  const std::uint32_t magic = read_be32(in, images_path);
  if (magic != kIdxImageMagic)
    throw FormatError(images_path.string() + ": bad IDX image magic " + std::to_string(magic));
  const std::uint32_t count = read_be32(in, images_path);
  const std::uint32_t rows = read_be32(in, images_path);
  const std::uint32_t cols = read_be32(in, images_path);
  if (count == 0 || rows == 0 || cols == 0) throw FormatError(images_path.string() + ": empty IDX");
  const auto pixels =
      read_payload(in, std::size_t{count} * rows * cols, images_path);

  Dataset ds;
  ds.name = images_path.filename().string();
  ds.samples.resize(count, side * side);
  Matrix image(rows, cols);
  for (std::uint32_t n = 0; n < count; ++n) {
    const std::size_t base = std::size_t{n} * rows * cols;
    for (std::uint32_t r = 0; r < rows; ++r)
      for (std::uint32_t c = 0; c < cols; ++c) image(r, c) = pixels[base + std::size_t{r} * cols + c];
    const Matrix pooled = mean_pool(image, side);
    for (Index r = 0; r < side; ++r)
      for (Index c = 0; c < side; ++c) ds.samples(n, r * side + c) = pooled(r, c) / 127.5 - 1.0;
  }
  ds.normalization = Normalization{RowVector::Zero(side * side), RowVector::Ones(side * side)};

  if (!labels_path.empty()) {
    std::ifstream lin(labels_path, std::ios::binary);
    if (!lin) throw IoError("cannot open " + labels_path.string());
    const std::uint32_t lmagic = read_be32(lin, labels_path);
    if (lmagic != kIdxLabelMagic)
      throw FormatError(labels_path.string() + ": bad IDX label magic " + std::to_string(lmagic));
    const std::uint32_t lcount = read_be32(lin, labels_path);
    if (lcount != count) throw FormatError("label count differs from image count");
    const auto labels = read_payload(lin, lcount, labels_path);
    ds.labels.assign(labels.begin(), labels.end());
  }
  return ds;
}

void write_idx_images(const std::filesystem::path& path, const std::vector<std::uint8_t>& pixels,
                      std::uint32_t count, std::uint32_t rows, std::uint32_t cols) {
  if (pixels.size() != std::size_t{count} * rows * cols)
    throw DimensionError("write_idx_images: pixel buffer size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_be32(out, kIdxImageMagic);
  write_be32(out, count);
  write_be32(out, rows);
  write_be32(out, cols);
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_be32(out, kIdxLabelMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
}

namespace {

// 5x7 bitmap font, row 0 at the top.
constexpr std::array<std::array<const char*, 7>, 10> kGlyphs = {{
    {" ### ", "#   #", "#  ##", "# # #", "##  #", "#   #", " ### "},
    {"  #  ", " ##  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "},
    {" ### ", "#   #", "    #", "   # ", "  #  ", " #   ", "#####"},
    {"#####", "   # ", "  #  ", "   # ", "    #", "#   #", " ### "},
    {"   # ", "  ## ", " # # ", "#  # ", "#####", "   # ", "   # "},
    {"#####", "#    ", "#### ", "    #", "    #", "#   #", " ### "},
    {"  ## ", " #   ", "#    ", "#### ", "#   #", "#   #", " ### "},
    {"#####", "    #", "   # ", "  #  ", " #   ", " #   ", " #   "},
    {" ### ", "#   #", "#   #", " ### ", "#   #", "#   #", " ### "},
    {" ### ", "#   #", "#   #", " ####", "    #", "   # ", " ##  "},
}};

}  // namespace

std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> render_digits(std::uint32_t count,
                                                                              std::uint64_t seed) {
  constexpr int kSide = 28;
  constexpr double kCell = 2.8;
  Rng rng(seed);
  std::vector<std::uint8_t> pixels(std::size_t{count} * kSide * kSide, 0);
  std::vector<std::uint8_t> labels(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    const int digit = static_cast<int>(rng.index(10));
    labels[n] = static_cast<std::uint8_t>(digit);
    const double s = rng.uniform(0.85, 1.15);
    const double shear = rng.uniform(-0.25, 0.25);
    const double theta = rng.uniform(-0.15, 0.15);
    const double tx = rng.uniform(-2.0, 2.0);
    const double ty = rng.uniform(-2.0, 2.0);
    const double stroke = rng.uniform(0.45, 0.75);

    Eigen::Matrix2d a;
    a << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    Eigen::Matrix2d sh;
    sh << s, shear * s, 0.0, s;
    const Eigen::Matrix2d inv = (a * sh * kCell).inverse();

    std::vector<Eigen::Vector2d> on;
    for (int r = 0; r < 7; ++r)
      for (int c = 0; c < 5; ++c)
        if (kGlyphs[static_cast<std::size_t>(digit)][static_cast<std::size_t>(r)][c] == '#')
          on.emplace_back(c - 2.0, r - 3.0);

    for (int py = 0; py < kSide; ++py) {
      for (int px = 0; px < kSide; ++px) {
        const Eigen::Vector2d q = inv * Eigen::Vector2d(px + 0.5 - 14.0 - tx, py + 0.5 - 14.0 - ty);
        double best = 1e9;
        for (const auto& c : on) best = std::min(best, (q - c).norm());
        const double ink = std::clamp(1.0 - (best - stroke) / 0.35, 0.0, 1.0);
        pixels[std::size_t{n} * kSide * kSide + std::size_t(py) * kSide + std::size_t(px)] =
            static_cast<std::uint8_t>(std::lround(255.0 * ink));
      }
    }
  }
  return {std::move(pixels), std::move(labels)};
}

}  // namespace lccgan
