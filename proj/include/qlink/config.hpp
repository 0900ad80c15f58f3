#pragma once

#include <json.hpp>
#include <set>
#include <string>
#include <vector>

#include "qlink/evolve.hpp"
#include "qlink/model.hpp"

namespace qlink {

using Json = nlohmann::ordered_json;

// Full run configuration: a single JSON file, schema-validated with unknown
// keys rejected. CLI flags override individual keys. Defaults are what the
// struct initializers say.
struct RunConfig {
  GaugeModelSpec model = GaugeModelSpec::u1(1, 4, {1.0, 0.5, 1.0, 0.0});

  // dims
  int lmax = 60;
  int fit_lo = 100;
  int fit_hi = 1000;

  // evolve / groundstate
  EvolveMode mode = EvolveMode::ImaginaryTime;
  double dt = 0.01;
  int steps = 100;
  int order = 2;
  int m_max = 64;
  double svd_tol = 1e-12;
  double leak_tol = 1e-10;
  int reproject_every = 1;
  int measure_every = 1;
  KernelKind kernel = KernelKind::Blocked;
  std::string initial_state = "projected-uniform";  // or "random" or "config"
  std::vector<int> initial_config;
  bool checkpoint = false;
  std::vector<std::pair<double, int>> gs_schedule = {
      {0.2, 200}, {0.05, 400}, {0.01, 600}, {0.002, 800}, {0.0005, 1200}};
  double gs_energy_tol = 1e-9;

  // validate
  int validate_length = 4;
  bool corrupt_v_hook = false;  // test hook: corrupts a V tensor entry

  // bench
  std::vector<int> bench_nbars = {1, 2, 3, 4};
  int bench_m = 6;
  int bench_b = 2;

  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = ".";
};

namespace detail {

inline void reject_unknown(const Json& j, const std::set<std::string>& allowed,
                           const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown config key '" + it.key() + "' in " + where);
}

}  // namespace detail

inline GaugeModelSpec parse_model(const Json& j) {
  detail::reject_unknown(j, {"group", "nbar", "rishon_statistics", "matter", "length",
                             "particle_number", "couplings"},
                         "model");
  GaugeModelSpec spec;
  const std::string group = j.value("group", "U1");
  if (group == "U1")
    spec.group = GaugeGroup::U1;
  else if (group == "U2")
    spec.group = GaugeGroup::U2;
  else
    throw ConfigError("model.group must be U1 or U2");
  spec.nbar = j.value("nbar", 1);
  const std::string stats =
      j.value("rishon_statistics",
              spec.group == GaugeGroup::U1 ? "bosonic-truncated" : "fermionic");
  if (stats == "bosonic-truncated")
    spec.statistics = RishonStatistics::BosonicTruncated;
  else if (stats == "fermionic")
    spec.statistics = RishonStatistics::Fermionic;
  else
    throw ConfigError("model.rishon_statistics must be bosonic-truncated or fermionic");
  const std::string matter = j.value(
      "matter", spec.group == GaugeGroup::U1 ? "spinless-fermion" : "spinhalf-fermion");
  if (matter == "spinless-fermion")
    spec.matter = MatterKind::SpinlessFermion;
  else if (matter == "spinhalf-fermion")
    spec.matter = MatterKind::SpinHalfFermion;
  else
    throw ConfigError("model.matter must be spinless-fermion or spinhalf-fermion");
  spec.length = j.value("length", 4);
  if (j.contains("particle_number")) {
    const Json& p = j.at("particle_number");
    if (p.is_number_integer()) {
      spec.filling = {p.get<int>(), p.get<int>()};
    } else if (p.is_object()) {
      detail::reject_unknown(p, {"odd", "even"}, "model.particle_number");
      spec.filling = {p.at("odd").get<int>(), p.at("even").get<int>()};
    } else {
      throw ConfigError("model.particle_number must be an integer or {odd, even}");
    }
  } else {
    spec.filling = GaugeModelSpec::default_filling(spec.group, spec.nbar);
  }
  if (j.contains("couplings")) {
    const Json& c = j.at("couplings");
    detail::reject_unknown(c, {"J", "m", "g2", "g2_nonabelian"}, "model.couplings");
    spec.couplings.hopping = c.value("J", 1.0);
    spec.couplings.mass_stag = c.value("m", 0.0);
    spec.couplings.g2_abelian = c.value("g2", 0.0);
    spec.couplings.g2_nonabelian = c.value("g2_nonabelian", 0.0);
  }
  spec.validate();
  return spec;
}

inline RunConfig parse_config(const Json& j) {
  detail::reject_unknown(
      j, {"model", "dims", "evolve", "groundstate", "validate", "bench", "seed", "threads", "out"},
      "config");
  RunConfig cfg;
  if (j.contains("model")) cfg.model = parse_model(j.at("model"));
  if (j.contains("dims")) {
    const Json& d = j.at("dims");
    detail::reject_unknown(d, {"lmax", "fit_window"}, "dims");
    cfg.lmax = d.value("lmax", cfg.lmax);
    if (d.contains("fit_window")) {
      const auto w = d.at("fit_window").get<std::vector<int>>();
      if (w.size() != 2) throw ConfigError("dims.fit_window must be [lo, hi]");
      cfg.fit_lo = w[0];
      cfg.fit_hi = w[1];
    }
  }
  if (j.contains("evolve")) {
    const Json& e = j.at("evolve");
    detail::reject_unknown(e,
                           {"mode", "dt", "steps", "order", "m_max", "svd_tol", "leak_tol",
                            "reproject_every", "measure_every", "kernel", "initial_state",
                            "initial_config", "checkpoint"},
                           "evolve");
    const std::string mode = e.value("mode", "imaginary");
    if (mode == "real")
      cfg.mode = EvolveMode::RealTime;
    else if (mode == "imaginary")
      cfg.mode = EvolveMode::ImaginaryTime;
    else
      throw ConfigError("evolve.mode must be real or imaginary");
    cfg.dt = e.value("dt", cfg.dt);
    cfg.steps = e.value("steps", cfg.steps);
    cfg.order = e.value("order", cfg.order);
    cfg.m_max = e.value("m_max", cfg.m_max);
    cfg.svd_tol = e.value("svd_tol", cfg.svd_tol);
    cfg.leak_tol = e.value("leak_tol", cfg.leak_tol);
    cfg.reproject_every = e.value("reproject_every", cfg.reproject_every);
    cfg.measure_every = e.value("measure_every", cfg.measure_every);
    const std::string kernel = e.value("kernel", "blocked");
    if (kernel == "blocked")
      cfg.kernel = KernelKind::Blocked;
    else if (kernel == "dense")
      cfg.kernel = KernelKind::Dense;
    else
      throw ConfigError("evolve.kernel must be blocked or dense");
    cfg.initial_state = e.value("initial_state", cfg.initial_state);
    if (cfg.initial_state != "projected-uniform" && cfg.initial_state != "random" &&
        cfg.initial_state != "config")
      throw ConfigError("evolve.initial_state must be projected-uniform, random or config");
    if (e.contains("initial_config"))
      cfg.initial_config = e.at("initial_config").get<std::vector<int>>();
    cfg.checkpoint = e.value("checkpoint", cfg.checkpoint);
  }
  if (j.contains("groundstate")) {
    const Json& g = j.at("groundstate");
    detail::reject_unknown(g, {"schedule", "energy_tol"}, "groundstate");
    if (g.contains("schedule")) {
      cfg.gs_schedule.clear();
      for (const auto& row : g.at("schedule")) {
        if (!row.is_array() || row.size() != 2)
          throw ConfigError("groundstate.schedule rows must be [dt, steps]");
        cfg.gs_schedule.emplace_back(row[0].get<double>(), row[1].get<int>());
      }
    }
    cfg.gs_energy_tol = g.value("energy_tol", cfg.gs_energy_tol);
  }
  if (j.contains("validate")) {
    const Json& v = j.at("validate");
    detail::reject_unknown(v, {"length", "corrupt_v"}, "validate");
    cfg.validate_length = v.value("length", cfg.validate_length);
    cfg.corrupt_v_hook = v.value("corrupt_v", false);
  }
  if (j.contains("bench")) {
    const Json& b = j.at("bench");
    detail::reject_unknown(b, {"nbar_list", "m", "b"}, "bench");
    if (b.contains("nbar_list")) cfg.bench_nbars = b.at("nbar_list").get<std::vector<int>>();
    cfg.bench_m = b.value("m", cfg.bench_m);
    cfg.bench_b = b.value("b", cfg.bench_b);
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.out_dir = j.value("out", cfg.out_dir);
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  Json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace qlink
