#include "lccgan/gap.hpp"

#include <cmath>

#include "lccgan/approximation.hpp"
#include "lccgan/error.hpp"

namespace lccgan {

void GapConfig::validate() const {
  disc.validate();
  if (rademacher_draws < 1) throw ConfigError("gap: rademacher_draws must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("gap: confidence must be in (0,1)");
  if (generated < 0) throw ConfigError("gap: generated must be >= 0");
}

double GapReport::recomputed_bound() const {
  return 2.0 * rademacher +
         2.0 * phi_bound * std::sqrt(2.0 * std::log(1.0 / confidence) / static_cast<double>(n)) +
         2.0 * epsilon;
}

void GapReport::validate() const {
  if (n < 1) throw ContractError("gap report: N must be >= 1");
  if (gap != std::abs(train_distance - heldout_distance))
    throw ContractError("gap report: gap differs from |train - heldout|");
  if (epsilon != phi_lipschitz * quality + 2.0 * phi_bound)
    throw ContractError("gap report: epsilon differs from L_phi Q + 2 Delta");
  if (bound_value != recomputed_bound()) throw ContractError("gap report: bound_value mismatch");
}

void finalize(GapReport& r) {
  r.gap = std::abs(r.train_distance - r.heldout_distance);
  r.epsilon = r.phi_lipschitz * r.quality + 2.0 * r.phi_bound;
  r.bound_value = r.recomputed_bound();
}

GapReport gap_harness(const GanModel& model, const Dataset& train, const Dataset& heldout,
                      const GapConfig& cfg) {
  cfg.validate();
  model.validate();
  train.validate();
  heldout.validate();
  if (model.input != GeneratorInput::lcc || !model.dict)
    throw ConfigError("gap: the harness needs an lcc generator (Q is defined through codings)");
  if (train.dim() != heldout.dim() || train.dim() != model.generator.out_dim())
    throw DimensionError("gap: dataset and generator dimensions differ");

  const Dictionary& dict = *model.dict;
  Rng rng(cfg.seed);
  const Index n_gen = cfg.generated > 0 ? cfg.generated : train.size();
  Rng draw = rng.derive(1);
  const SampleBatch batch = sample_batch(dict, cfg.sampler, dict.anchors(), n_gen, draw);
  const Matrix fake = generate(model, batch.latent);

  GapReport r;
  const DistanceEstimate dt =
      estimate_nn_distance(fake, train.samples, model.phi, cfg.disc, rng.derive(2).next_u64());
  const DistanceEstimate dh =
      estimate_nn_distance(fake, heldout.samples, model.phi, cfg.disc, rng.derive(2).next_u64());
  r.train_distance = dt.distance;
  r.heldout_distance = dh.distance;
  r.rademacher = estimate_rademacher(train.samples, model.phi, cfg.disc, cfg.rademacher_draws,
                                     rng.derive(3).next_u64());
  r.phi_bound = phi_bound(model.phi);
  r.phi_lipschitz = phi_lipschitz(model.phi);
  r.confidence = cfg.confidence;
  r.quality = generative_quality(dict, batch.codings, dict.lipschitz_h, dict.lipschitz_g);
  r.n = train.size();
  r.steps = dt.steps;
  r.restarts = dt.restarts;
  finalize(r);
  r.validate();
  return r;
}

Json gap_to_json(const GapReport& r) {
  return Json{{"train_distance", r.train_distance},
              {"heldout_distance", r.heldout_distance},
              {"gap", r.gap},
              {"rademacher", r.rademacher},
              {"phi_bound", r.phi_bound},
              {"confidence", r.confidence},
              {"quality", r.quality},
              {"phi_lipschitz", r.phi_lipschitz},
              {"epsilon", r.epsilon},
              {"bound_value", r.bound_value},
              {"n", r.n},
              {"inner_steps", r.steps},
              {"inner_restarts", r.restarts}};
}

GapReport gap_from_json(const Json& j) {
  GapReport r;
  try {
    r.train_distance = j.at("train_distance").get<double>();
    r.heldout_distance = j.at("heldout_distance").get<double>();
    r.gap = j.at("gap").get<double>();
    r.rademacher = j.at("rademacher").get<double>();
    r.phi_bound = j.at("phi_bound").get<double>();
    r.confidence = j.at("confidence").get<double>();
    r.quality = j.at("quality").get<double>();
    r.phi_lipschitz = j.at("phi_lipschitz").get<double>();
    r.epsilon = j.at("epsilon").get<double>();
    r.bound_value = j.at("bound_value").get<double>();
    r.n = j.at("n").get<Index>();
    r.steps = j.value("inner_steps", 0);
    r.restarts = j.value("inner_restarts", 0);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed gap report: ") + e.what());
  }
  return r;
}

std::string gap_csv_header() {
  return "seed,n,train_distance,heldout_distance,gap,rademacher,phi_bound,confidence,quality,"
         "phi_lipschitz,epsilon,bound_value";
}

std::string gap_csv_row(const GapReport& r, std::uint64_t seed) {
  std::string s = std::to_string(seed) + "," + std::to_string(r.n);
  for (double v : {r.train_distance, r.heldout_distance, r.gap, r.rademacher, r.phi_bound,
                   r.confidence, r.quality, r.phi_lipschitz, r.epsilon, r.bound_value})
    s += "," + format_double(v);
  return s;
}

}  // namespace lccgan
