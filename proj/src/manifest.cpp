#include "lccgan/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>
#include <sstream>

#include "lccgan/error.hpp"

namespace lccgan {

namespace {

struct Digest {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

  Digest() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
      throw IoError("sha256: digest initialisation failed");
  }
  void update(const char* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx.get(), data, n) != 1) throw IoError("sha256: update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) throw IoError("sha256: final failed");
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(digits[md[i] >> 4]);
      out.push_back(digits[md[i] & 0xf]);
    }
    return out;
  }
};

}  // namespace

std::string sha256_hex_bytes(const std::string& bytes) {
  Digest d;
  d.update(bytes.data(), bytes.size());
  return d.hex();
}

std::string sha256_hex(const std::filesystem::path& file) {
  std::ifstream f(file, std::ios::binary);
  if (!f) throw IoError("cannot read " + file.string());
  Digest d;
  std::array<char, 1 << 16> buf;
  while (f) {
    f.read(buf.data(), buf.size());
    d.update(buf.data(), static_cast<std::size_t>(f.gcount()));
  }
  return d.hex();
}

void write_manifest(const std::filesystem::path& dir, const std::vector<StageStatus>& stages) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).generic_string();
    if (rel != kManifestName) files.push_back(rel);
  }
  std::sort(files.begin(), files.end());

  std::ofstream f(dir / kManifestName, std::ios::binary);
  if (!f) throw IoError("cannot write manifest in " + dir.string());
  f << "# lccgen manifest\n";
  for (const auto& s : stages) {
    f << "stage " << s.stage << ' ' << (s.ok ? "ok" : "failed");
    if (!s.message.empty()) f << ' ' << s.message;
    f << '\n';
  }
  for (const auto& rel : files) f << "file " << sha256_hex(dir / rel) << ' ' << rel << '\n';
}

std::vector<StageStatus> read_manifest_stages(const std::filesystem::path& dir) {
  std::vector<StageStatus> out;
  std::ifstream f(dir / kManifestName);
  if (!f) return out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.rfind("stage ", 0) != 0) continue;
    std::istringstream ss(line.substr(6));
    StageStatus s;
    std::string status;
    ss >> s.stage >> status;
    s.ok = status == "ok";
    std::getline(ss, s.message);
    if (!s.message.empty() && s.message.front() == ' ') s.message.erase(0, 1);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace lccgan
