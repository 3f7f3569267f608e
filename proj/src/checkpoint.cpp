#include "lccgan/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lccgan/error.hpp"

namespace lccgan {

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

void format_double(std::string& out, double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  std::string_view s(buf, static_cast<std::size_t>(res.ptr - buf));
  out.append(s);
  // Keep the value typed as floating point when read back.
  if (s.find_first_of(".eE") == std::string_view::npos) out.append(".0");
}

bool is_flat(const Json& j) {
  for (const auto& e : j)
    if (e.is_structured()) return false;
  return true;
}

void dump(std::string& out, const Json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out.push_back('\n');
    out.append(static_cast<std::size_t>(d * indent), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out.append("{}");
        return;
      }
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        out.append(Json(it.key()).dump());
        out.append(indent < 0 ? ":" : ": ");
        dump(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out.push_back('}');
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out.append("[]");
        return;
      }
      // Numeric rows stay on one line.
      const bool flat = is_flat(j);
      out.push_back('[');
      bool first = true;
      for (const auto& e : j) {
        if (!first) out.append(flat && indent >= 0 ? ", " : ",");
        first = false;
        if (!flat) newline(depth + 1);
        dump(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out.push_back(']');
      return;
    }
    case Json::value_t::number_float:
      format_double(out, j.get<double>());
      return;
    default:
      out.append(j.dump());
  }
}

}  // namespace

std::string dump_json(const Json& doc, int indent) {
  std::string out;
  dump(out, doc, indent, 0);
  return out;
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << dump_json(doc) << '\n';
  if (!f) throw IoError("write failed for " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("matrix must be an array of rows");
  const auto rows = static_cast<Index>(j.size());
  const Index cols = rows == 0 ? 0 : static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw FormatError("ragged matrix in checkpoint");
    for (Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Json network_to_json(const NetworkParams& net) {
  Json layers = Json::array();
  for (const auto& l : net.layers) {
    Json bias = Json::array();
    for (Index j = 0; j < l.bias.size(); ++j) bias.push_back(l.bias(j));
    layers.push_back({{"in", l.in_dim()},
                      {"out", l.out_dim()},
                      {"activation", std::string(to_string(l.activation))},
                      {"weight", matrix_to_json(l.weight)},
                      {"bias", std::move(bias)}});
  }
  return {{"in_dim", net.in_dim()}, {"out_dim", net.out_dim()}, {"layers", std::move(layers)}};
}

NetworkParams network_from_json(const Json& j) {
  try {
    NetworkParams net;
    for (const auto& lj : j.at("layers")) {
      Layer l;
      l.activation = parse_activation(lj.at("activation").get<std::string>());
      l.weight = matrix_from_json(lj.at("weight"));
      const auto& b = lj.at("bias");
      l.bias.resize(static_cast<Index>(b.size()));
      for (std::size_t k = 0; k < b.size(); ++k) l.bias(static_cast<Index>(k)) = b[k].get<double>();
      if (l.weight.rows() != lj.at("in").get<Index>() || l.weight.cols() != lj.at("out").get<Index>())
        throw FormatError("layer extents disagree with its weight matrix");
      net.layers.push_back(std::move(l));
    }
    net.validate();
    if (net.in_dim() != j.at("in_dim").get<Index>() || net.out_dim() != j.at("out_dim").get<Index>())
      throw FormatError("network in_dim/out_dim disagree with its layers");
    return net;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed network checkpoint: ") + e.what());
  } catch (const DimensionError& e) {
    throw FormatError(std::string("inconsistent network checkpoint: ") + e.what());
  }
}

void save_network(const std::filesystem::path& path, const NetworkParams& net) {
  write_json(path, network_to_json(net));
}

NetworkParams load_network(const std::filesystem::path& path) {
  return network_from_json(read_json(path));
}

}  // namespace lccgan
