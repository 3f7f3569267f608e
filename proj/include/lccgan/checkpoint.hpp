#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lccgan/network.hpp"

namespace lccgan {

using Json = nlohmann::json;

/// Serialises JSON with every floating-point number printed to 17 significant
/// digits, so 64-bit values round-trip exactly.
std::string dump_json(const Json& doc, int indent = 1);

/// Round-trippable text for a double (17 significant digits).
std::string format_double(double v);

void write_json(const std::filesystem::path& path, const Json& doc);
Json read_json(const std::filesystem::path& path);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// {"in_dim", "out_dim", "layers": [{"in", "out", "activation", "weight", "bias"}]}
Json network_to_json(const NetworkParams& net);
NetworkParams network_from_json(const Json& j);

void save_network(const std::filesystem::path& path, const NetworkParams& net);
NetworkParams load_network(const std::filesystem::path& path);

}  // namespace lccgan
