// qlink: gauge-invariant tensor-network toolkit for 1D quantum link models.
//
// Subcommands: dims, evolve, groundstate, validate, bench.
// Configuration comes from a JSON file (--config); individual flags override.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "qlink/qlink.hpp"

namespace fs = std::filesystem;
using namespace qlink;

namespace {

struct CliOverrides {
  std::string config_path;
  std::string out_dir;
  int threads = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

RunConfig make_config(const CliOverrides& cli) {
  RunConfig cfg = cli.config_path.empty() ? RunConfig{} : load_config(cli.config_path);
  if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
  if (cli.threads > 0) cfg.threads = cli.threads;
  if (cli.seed_set) cfg.seed = cli.seed;
  max_threads() = std::max(1, cfg.threads);
  fs::create_directories(cfg.out_dir);
  return cfg;
}

void write_json(const Json& j, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
}

std::string fixed_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

int cmd_dims(const RunConfig& cfg) {
  ReducedBasis basis = ReducedBasis::build(cfg.model);
  AutomatonGraph graph = build_automaton(basis);
  const int lmax = std::max(cfg.lmax, cfg.fit_hi);
  DimensionTable table = dimension_table(graph, lmax);

  CsvWriter csv(fixed_path(cfg, "dims.csv"));
  std::vector<std::string> header = {"l"};
  for (int q = 0; q <= table.nbar; ++q) header.push_back("D_" + std::to_string(q));
  header.push_back("D_total");
  csv.row(header);
  for (int l = 0; l <= cfg.lmax; ++l) {
    std::vector<std::string> row = {std::to_string(l)};
    for (int q = 0; q <= table.nbar; ++q) row.push_back(table.dq[l][q].str());
    row.push_back(table.total(l).str());
    csv.row(row);
  }
  csv.close();

  AlphaFit fit = fit_alpha(table, cfg.fit_lo, cfg.fit_hi);
  Json report;
  report["model"] = to_string(cfg.model.group) + " nbar=" + std::to_string(cfg.model.nbar);
  report["alpha"] = fit.alpha;
  report["log_alpha"] = fit.slope;
  report["window"] = {fit.lo, fit.hi};
  report["residual"] = fit.residual;
  write_json(report, fixed_path(cfg, "alpha_fit.json"));
  std::cout << "dims: wrote dims.csv and alpha_fit.json (alpha = " << fit.alpha << ")\n";
  return 0;
}

MpdoState make_initial_state(const RunConfig& cfg, const ReducedBasis& basis) {
  if (cfg.initial_state == "projected-uniform")
    return MpdoState::projected_uniform(basis, cfg.model.length);
  if (cfg.initial_state == "random") {
    std::mt19937_64 rng(cfg.seed);
    return MpdoState::random_constrained(basis, cfg.model.length, cfg.m_max / 4 + 1, 1, rng);
  }
  if (static_cast<int>(cfg.initial_config.size()) != cfg.model.length)
    throw ConfigError("evolve.initial_config must list one reduced index per site");
  std::vector<int> config = cfg.initial_config;
  for (int& j : config) --j;  // config file uses 1-based reduced indices
  return MpdoState::product_state(basis, config);
}

void write_trajectory(const RunConfig& cfg, const std::vector<StepRecord>& traj,
                      const std::string& name) {
  CsvWriter csv(fixed_path(cfg, name));
  std::vector<std::string> header = {"step", "time", "energy", "norm", "leakage", "log_norm",
                                     "discarded_weight"};
  for (int x = 1; x <= cfg.model.length; ++x) header.push_back("n_psi_" + std::to_string(x));
  for (int x = 1; x < cfg.model.length; ++x) header.push_back("E_" + std::to_string(x));
  csv.row(header);
  for (const auto& r : traj) {
    std::vector<std::string> row = {std::to_string(r.step), CsvWriter::number(r.time),
                                    CsvWriter::number(r.energy), CsvWriter::number(r.norm),
                                    CsvWriter::number(r.leakage), CsvWriter::number(r.log_norm),
                                    CsvWriter::number(r.discarded)};
    for (double v : r.n_psi) row.push_back(CsvWriter::number(v));
    for (double v : r.e_link) row.push_back(CsvWriter::number(v));
    csv.row(row);
  }
}

int cmd_evolve(const RunConfig& cfg) {
  ReducedBasis basis = ReducedBasis::build(cfg.model);
  ChainOperators chain = ChainOperators::build(basis, cfg.model.length);
  MpdoState state = make_initial_state(cfg, basis);

  EvolveOptions opt;
  opt.mode = cfg.mode;
  opt.dt = cfg.dt;
  opt.steps = cfg.steps;
  opt.order = cfg.order;
  opt.m_max = cfg.m_max;
  opt.svd_tol = cfg.svd_tol;
  opt.leak_tol = cfg.leak_tol;
  opt.reproject_every = cfg.reproject_every;
  opt.measure_every = cfg.measure_every;
  opt.kernel = cfg.kernel;

  EvolveResult result = evolve(state, chain, opt);
  write_trajectory(cfg, result.trajectory, "trajectory.csv");
  if (cfg.checkpoint) save_checkpoint(state, fixed_path(cfg, "state.qlk"));
  std::cout << "evolve: " << cfg.steps << " steps, final energy "
            << result.trajectory.back().energy << ", max bond " << state.max_bond() << "\n";
  return 0;
}

int cmd_groundstate(const RunConfig& cfg) {
  ReducedBasis basis = ReducedBasis::build(cfg.model);
  ChainOperators chain = ChainOperators::build(basis, cfg.model.length);
  MpdoState state = make_initial_state(cfg, basis);

  GroundStateOptions opt;
  opt.schedule = cfg.gs_schedule;
  opt.energy_tol = cfg.gs_energy_tol;
  opt.order = cfg.order;
  opt.m_max = cfg.m_max;
  opt.svd_tol = cfg.svd_tol;
  opt.leak_tol = cfg.leak_tol;
  opt.kernel = cfg.kernel;

  GroundStateResult result = find_ground_state(state, chain, opt);
  for (size_t i = 0; i < result.trajectory.size(); ++i)
    result.trajectory[i].step = static_cast<int>(i + 1);
  write_trajectory(cfg, result.trajectory, "trajectory.csv");
  if (cfg.checkpoint) save_checkpoint(state, fixed_path(cfg, "state.qlk"));

  Json report;
  report["energy"] = result.energy;
  report["steps"] = result.trajectory.size();
  report["max_bond"] = state.max_bond();
  report["final_leakage"] = result.trajectory.back().leakage;
  write_json(report, fixed_path(cfg, "groundstate.json"));
  std::cout << "groundstate: E = " << result.energy << "\n";
  return 0;
}

int cmd_validate(const RunConfig& cfg) {
  std::vector<ValidationReport> reports;
  std::string dump;
  for (const auto& spec : worked_models(cfg.validate_length)) {
    reports.push_back(run_validation(spec, cfg.validate_length, cfg.seed, cfg.corrupt_v_hook));
    ReducedBasis basis = ReducedBasis::build(spec);
    dump += "## " + to_string(spec.group) + " nbar=" + std::to_string(spec.nbar) + "\n";
    dump += dump_reduced_basis(basis);
    dump += "\n";
  }
  Json j = validation_to_json(reports);
  write_json(j, fixed_path(cfg, "validate.json"));
  {
    std::ofstream f(fixed_path(cfg, "basis_dump.txt"), std::ios::binary);
    f << dump;
  }
  bool all = j["all_pass"].get<bool>();
  for (const auto& r : reports) {
    std::cout << r.model << ": " << (r.all_pass() ? "pass" : "FAIL") << "\n";
    for (const auto& c : r.checks)
      if (!c.pass)
        std::cout << "  FAIL " << c.name << " measured " << c.measured << " tol " << c.tolerance
                  << "\n";
  }
  std::cout << (all ? "validate: all checks passed" : "validate: FAILURES") << "\n";
  return all ? 0 : 1;
}

int cmd_bench(const RunConfig& cfg) {
  Json report;
  report["m"] = cfg.bench_m;
  report["b"] = cfg.bench_b;
  report["models"] = Json::array();
  double prev_ratio = 0.0;
  bool decreasing = true;
  for (size_t i = 0; i < cfg.bench_nbars.size(); ++i) {
    const int nbar = cfg.bench_nbars[i];
    GaugeModelSpec spec = GaugeModelSpec::u1(nbar, 4, {1.0, 0.0, 1.0, 0.0});
    ReducedBasis basis = ReducedBasis::build(spec);
    ChainOperators chain = ChainOperators::build(basis, 4);
    std::mt19937_64 rng(cfg.seed);
    MpdoState a = MpdoState::random_constrained(basis, 4, cfg.bench_m, cfg.bench_b, rng);
    MpdoState b = a;
    const int x = 2;
    ProjectedGate gate =
        build_projected_gate(chain.h_reduced[x - 1], chain.links[x - 1], cx(0.0, 0.05));
    GateApplyOptions opt;
    opt.m_max = 1 << 20;
    OpCounter blocked, dense;
    apply_gate_blocked(a, gate, chain.links[x - 1].sectors, opt, &blocked);
    apply_gate_dense(b, gate, opt, &dense);

    const int d = basis.dim(x), chi = chain.links[x - 1].sectors.chi;
    const double m = cfg.bench_m, bb = cfg.bench_b;
    Json row;
    row["nbar"] = nbar;
    row["d"] = d;
    row["chi"] = chi;
    row["blocked"] = {{"contraction_madds", blocked.contraction_madds},
                      {"gate_madds", blocked.gate_madds},
                      {"svd_model_ops", blocked.svd_model_ops},
                      {"contraction_bound", chi * bb * bb * m * m * m},
                      {"gate_bound", double(chi) * chi * bb * bb * m * m}};
    row["dense"] = {{"contraction_madds", dense.contraction_madds},
                    {"gate_madds", dense.gate_madds},
                    {"svd_model_ops", dense.svd_model_ops},
                    {"contraction_model", double(d) * d * bb * bb * m * m * m},
                    {"gate_model", double(d) * d * d * d * bb * bb * m * m}};
    const double ratio =
        static_cast<double>(blocked.svd_model_ops) / static_cast<double>(dense.svd_model_ops);
    row["svd_ratio_blocked_over_dense"] = ratio;
    if (i > 0 && ratio >= prev_ratio) decreasing = false;
    prev_ratio = ratio;
    report["models"].push_back(row);
    std::cout << "bench nbar=" << nbar << ": svd ratio " << ratio << "\n";
  }
  report["svd_ratio_decreasing"] = decreasing;
  write_json(report, fixed_path(cfg, "bench.json"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qlink: gauge-invariant tensor networks for 1D quantum link models"};
  app.require_subcommand(1);

  CliOverrides cli;
  app.add_option("--config", cli.config_path, "JSON config file");
  app.add_option("--out", cli.out_dir, "output directory (overrides config)");
  app.add_option("--threads", cli.threads, "worker thread cap");
  auto* seed_opt = app.add_option("--seed", cli.seed, "RNG seed (overrides config)");

  auto* dims = app.add_subcommand("dims", "constrained Hilbert-space dimensions and alpha fit");
  auto* evolve_cmd = app.add_subcommand("evolve", "real/imaginary TEBD evolution");
  auto* ground = app.add_subcommand("groundstate", "imaginary-time evolution with convergence stop");
  auto* validate = app.add_subcommand("validate", "run the invariant suite at small L");
  auto* bench = app.add_subcommand("bench", "op-counter report, blocked vs dense kernels");

  CLI11_PARSE(app, argc, argv);
  cli.seed_set = seed_opt->count() > 0;

  try {
    RunConfig cfg = make_config(cli);
    if (dims->parsed()) return cmd_dims(cfg);
    if (evolve_cmd->parsed()) return cmd_evolve(cfg);
    if (ground->parsed()) return cmd_groundstate(cfg);
    if (validate->parsed()) return cmd_validate(cfg);
    if (bench->parsed()) return cmd_bench(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
