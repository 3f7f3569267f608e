#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace lccgan {

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_hex(const std::filesystem::path& file);
std::string sha256_hex_bytes(const std::string& bytes);

struct StageStatus {
  std::string stage;
  bool ok = true;
  std::string message;
};

inline constexpr const char* kManifestName = "MANIFEST";

/// Rewrites dir/MANIFEST: stage lines, then "file <sha256> <relative path>"
/// for every regular file under dir (sorted), excluding the manifest itself.
void write_manifest(const std::filesystem::path& dir, const std::vector<StageStatus>& stages);
/// Stage lines of an existing manifest (empty when there is none).
std::vector<StageStatus> read_manifest_stages(const std::filesystem::path& dir);

}  // namespace lccgan
