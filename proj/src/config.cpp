#include "lccgan/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <variant>

#include "lccgan/checkpoint.hpp"
#include "lccgan/dataset.hpp"
#include "lccgan/error.hpp"
#include "lccgan/gan.hpp"
#include "lccgan/sampler.hpp"

namespace lccgan {

namespace {

using Field = std::variant<std::uint64_t*, std::string*, Index*, int*, double*, bool*,
                           std::vector<Index>*>;

std::vector<std::pair<std::string, Field>> fields(ExperimentConfig& c) {
  return {
      {"seed", &c.seed},
      {"out", &c.out},
      {"dataset.kind", &c.dataset},
      {"dataset.samples", &c.samples},
      {"dataset.train_fraction", &c.train_fraction},
      {"dataset.ambient_dim", &c.ambient_dim},
      {"dataset.modes", &c.modes},
      {"dataset.radius", &c.radius},
      {"dataset.sigma", &c.sigma},
      {"dataset.noise", &c.noise},
      {"dataset.images", &c.images},
      {"dataset.labels", &c.labels},
      {"dataset.side", &c.side},
      {"ae.latent_dim", &c.latent_dim},
      {"ae.epochs", &c.ae_epochs},
      {"ae.batch_size", &c.ae_batch},
      {"ae.hidden", &c.ae_hidden},
      {"ae.learning_rate", &c.ae_learning_rate},
      {"lcc.anchors", &c.anchors},
      {"lcc.lipschitz_h", &c.lipschitz_h},
      {"lcc.lipschitz_g", &c.lipschitz_g},
      {"lcc.outer_iterations", &c.lcc_outer},
      {"lcc.kmeans_iterations", &c.lcc_kmeans},
      {"gan.iterations", &c.gan_iterations},
      {"gan.batch_size", &c.gan_batch},
      {"gan.learning_rate", &c.gan_learning_rate},
      {"gan.hidden_width", &c.gan_hidden_width},
      {"gan.hidden_layers", &c.gan_hidden_layers},
      {"gan.phi", &c.phi},
      {"gan.input", &c.input},
      {"gan.d", &c.d},
      {"gan.prior", &c.prior},
      {"gan.pool", &c.pool},
      {"eval.samples", &c.eval_samples},
      {"eval.msssim_pairs", &c.msssim_pairs},
      {"eval.coverage_radius", &c.coverage_radius},
      {"eval.coverage_threshold", &c.coverage_threshold},
      {"eval.capacity_anchors", &c.capacity_anchors},
      {"gap.in_run", &c.gap_in_run},
      {"gap.hidden", &c.gap_hidden},
      {"gap.steps", &c.gap_steps},
      {"gap.restarts", &c.gap_restarts},
      {"gap.learning_rate", &c.gap_learning_rate},
      {"gap.rademacher_draws", &c.gap_draws},
      {"gap.confidence", &c.gap_confidence},
      {"gap.generated", &c.gap_generated},
  };
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError("config: bad value '" + v + "' for " + key);
  return out;
}

void assign(const std::string& key, Field f, const std::string& v) {
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::string>) {
          *p = v;
        } else if constexpr (std::is_same_v<T, bool>) {
          if (v == "true")
            *p = true;
          else if (v == "false")
            *p = false;
          else
            throw ConfigError("config: " + key + " must be true or false");
        } else if constexpr (std::is_same_v<T, std::vector<Index>>) {
          p->clear();
          std::stringstream ss(v);
          std::string item;
          while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) p->push_back(parse_number<Index>(key, item));
          }
        } else {
          *p = parse_number<T>(key, v);
        }
      },
      f);
}

std::string render(Field f) {
  return std::visit(
      [](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return *p;
        } else if constexpr (std::is_same_v<T, bool>) {
          return *p ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::vector<Index>>) {
          std::string s;
          for (std::size_t i = 0; i < p->size(); ++i) s += (i ? "," : "") + std::to_string((*p)[i]);
          return s;
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(*p);
        } else {
          return std::to_string(*p);
        }
      },
      f);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("config: " + msg);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(dataset == "ring" || dataset == "swiss_roll" || dataset == "two_circles" ||
              dataset == "digits",
          "dataset.kind must be ring, swiss_roll, two_circles or digits");
  require(samples >= 4, "dataset.samples must be >= 4");
  require(train_fraction > 0.0 && train_fraction < 1.0, "dataset.train_fraction must be in (0,1)");
  require(ambient_dim >= 1, "dataset.ambient_dim must be >= 1");
  require(side >= 2, "dataset.side must be >= 2");
  if (dataset == "digits") {
    require(images.empty() || std::filesystem::exists(images), "dataset.images not found: " + images);
    require(labels.empty() || std::filesystem::exists(labels), "dataset.labels not found: " + labels);
  } else {
    ManifoldSpec spec;
    spec.kind = dataset == "ring"         ? ManifoldKind::ring_of_gaussians
                : dataset == "swiss_roll" ? ManifoldKind::swiss_roll
                                          : ManifoldKind::two_circles;
    spec.ambient_dim = ambient_dim;
    spec.modes = modes;
    spec.radius = radius;
    spec.sigma = sigma;
    spec.noise = noise;
    try {
      spec.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  require(latent_dim >= 1, "ae.latent_dim must be >= 1");
  require(ae_epochs >= 1 && ae_batch >= 1, "ae.epochs and ae.batch_size must be >= 1");
  for (Index h : ae_hidden) require(h >= 1, "ae.hidden widths must be >= 1");
  require(ae_learning_rate > 0.0, "ae.learning_rate must be > 0");
  require(anchors >= 2, "lcc.anchors must be >= 2");
  require(lipschitz_h > 0.0 && lipschitz_g > 0.0, "lcc.lipschitz_h and lcc.lipschitz_g must be > 0");
  require(lcc_outer >= 1 && lcc_kmeans >= 0, "lcc iteration counts out of range");
  require(gan_iterations >= 0 && gan_batch >= 1, "gan.iterations >= 0 and gan.batch_size >= 1 required");
  require(gan_learning_rate > 0.0, "gan.learning_rate must be > 0");
  require(gan_hidden_width >= 1 && gan_hidden_layers >= 0, "gan hidden layout out of range");
  require(d >= 1, "gan.d must be >= 1");
  require(d <= anchors, "gan.d = " + std::to_string(d) + " exceeds lcc.anchors = " +
                            std::to_string(anchors));
  require(pool == "anchors" || pool == "embeddings", "gan.pool must be anchors or embeddings");
  try {
    parse_phi(phi);
    parse_generator_input(input);
    parse_prior(prior);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  require(eval_samples >= 2 && msssim_pairs >= 1, "eval sample counts out of range");
  require(coverage_radius >= 0.0, "eval.coverage_radius must be >= 0");
  require(coverage_threshold > 0.0 && coverage_threshold <= 1.0, "eval.coverage_threshold must be in (0,1]");
  for (Index m : capacity_anchors) require(m >= 2, "eval.capacity_anchors entries must be >= 2");
  for (Index h : gap_hidden) require(h >= 1, "gap.hidden widths must be >= 1");
  require(gap_steps >= 1 && gap_restarts >= 1 && gap_draws >= 1, "gap iteration counts must be >= 1");
  require(gap_learning_rate > 0.0, "gap.learning_rate must be > 0");
  require(gap_confidence > 0.0 && gap_confidence < 1.0, "gap.confidence must be in (0,1)");
  require(gap_generated >= 0, "gap.generated must be >= 0");
  require(!out.empty(), "out must not be empty");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  auto table = fields(cfg);
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    const std::string value = trim(line.substr(eq + 1));
    auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
    if (it == table.end()) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    assign(key, it->second, value);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  ExperimentConfig copy = cfg;
  std::string out;
  for (const auto& [key, field] : fields(copy)) out += key + " = " + render(field) + "\n";
  return out;
}

}  // namespace lccgan
