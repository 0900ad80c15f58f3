#pragma once

#include <map>
#include <vector>

#include "qlink/kernels.hpp"
#include "qlink/trotter.hpp"

namespace qlink {

enum class EvolveMode { RealTime, ImaginaryTime };
enum class KernelKind { Blocked, Dense };

struct EvolveOptions {
  EvolveMode mode = EvolveMode::ImaginaryTime;
  double dt = 0.01;
  int steps = 100;
  int order = 2;
  int m_max = 64;
  double svd_tol = 1e-12;
  double leak_tol = 1e-10;
  int reproject_every = 1;  // apply Qbar_r every k steps; 0 disables
  int measure_every = 1;
  KernelKind kernel = KernelKind::Blocked;
};

struct StepRecord {
  int step = 0;
  double time = 0.0;
  double energy = 0.0;
  double norm = 1.0;
  double leakage = 0.0;
  double log_norm = 0.0;
  double discarded = 0.0;
  std::vector<double> n_psi;   // per site
  std::vector<double> e_link;  // per link
};

struct EvolveResult {
  std::vector<StepRecord> trajectory;
  OpCounter counters;
};

// Precomputed per-chain structures shared by evolution and measurement.
struct ChainOperators {
  const ReducedBasis* basis = nullptr;
  int length = 0;
  std::vector<LinkStructure> links;  // [x-1] for link (x, x+1)
  std::vector<Mat> h_reduced;        // reduced gate Hamiltonians
  std::vector<Mat> n_psi_reduced;    // per site
  std::vector<Mat> e_link_reduced;   // per link
  LinkMpo qbar;

  static ChainOperators build(const ReducedBasis& basis, int length) {
    ChainOperators c;
    c.basis = &basis;
    c.length = length;
    for (int x = 1; x < length; ++x) {
      c.links.push_back(build_link_projector(basis, x));
      c.h_reduced.push_back(reduced_gate_hamiltonian(basis, x));
      TwoSiteOp e = basis.ops.link_electric();
      c.e_link_reduced.push_back(
          e.reduced(basis.vertex(x).isometry, basis.vertex(x + 1).isometry));
    }
    for (int x = 1; x <= length; ++x)
      c.n_psi_reduced.push_back(reduce_vertex_operator(basis.vertex(x), basis.ops.n_psi));
    c.qbar = assemble_global_mpo(basis, length);
    return c;
  }
};

namespace detail {

inline void apply_layer(MpdoState& state, const ChainOperators& chain,
                        const std::map<std::pair<int, int>, ProjectedGate>& gate_cache,
                        LayerParity parity, int coeff_key, KernelKind kernel,
                        const GateApplyOptions& opt, OpCounter& counter) {
  const int first = (parity == LayerParity::Odd) ? 1 : 2;
  for (int x = first; x < state.length; x += 2) {
    const ProjectedGate& gate = gate_cache.at({coeff_key, x});
    if (kernel == KernelKind::Blocked)
      apply_gate_blocked(state, gate, chain.links[x - 1].sectors, opt, &counter);
    else
      apply_gate_dense(state, gate, opt, &counter);
  }
}

}  // namespace detail

// Re-projection: the canonical-basis link projectors are diagonal and mutually
// commuting, so applying them gate by gate realizes Qbar_r exactly.
inline void reproject(MpdoState& state, const ChainOperators& chain, KernelKind kernel,
                      const GateApplyOptions& opt, OpCounter* counter = nullptr) {
  for (int x = 1; x < state.length; ++x) {
    ProjectedGate q = projector_gate(chain.links[x - 1]);
    if (kernel == KernelKind::Blocked)
      apply_gate_blocked(state, q, chain.links[x - 1].sectors, opt, counter);
    else
      apply_gate_dense(state, q, opt, counter);
  }
}

inline StepRecord measure(const MpdoState& state, const ChainOperators& chain, int step,
                          double time) {
  StepRecord rec;
  rec.step = step;
  rec.time = time;
  rec.norm = std::sqrt(state.norm_squared());
  rec.log_norm = state.log_norm;
  rec.discarded = state.discarded_weight;
  double energy = 0.0;
  for (int x = 1; x < state.length; ++x)
    energy += state.expectation_link(x, chain.h_reduced[x - 1]).real();
  rec.energy = energy;
  for (int x = 1; x <= state.length; ++x)
    rec.n_psi.push_back(state.expectation_site(x, chain.n_psi_reduced[x - 1]).real());
  for (int x = 1; x < state.length; ++x)
    rec.e_link.push_back(state.expectation_link(x, chain.e_link_reduced[x - 1]).real());
  rec.leakage = state.leakage(chain.qbar);
  return rec;
}

// TEBD sweep of the projected gates M = Q exp(c gamma h) over the layer
// schedule. Real time evolves X by exp(i H t); imaginary time applies
// exp(-H dt/2) per step (one rho-level step of dt) and renormalizes.
inline EvolveResult evolve(MpdoState& state, const ChainOperators& chain,
                           const EvolveOptions& opt) {
  if (state.length != chain.length) throw DimensionError("evolve: chain length mismatch");
  const cx gamma = (opt.mode == EvolveMode::RealTime) ? cx(0.0, opt.dt) : cx(-0.5 * opt.dt, 0.0);
  TrotterSchedule schedule = trotter_schedule(opt.order, gamma);

  GateApplyOptions gate_opt;
  gate_opt.m_max = opt.m_max;
  gate_opt.svd_tol = opt.svd_tol;

  // coefficients repeat across layers; key them by index into a unique list
  std::vector<double> coeffs;
  std::vector<int> layer_key;
  for (const auto& layer : schedule.layers) {
    int key = -1;
    for (size_t i = 0; i < coeffs.size(); ++i)
      if (coeffs[i] == layer.coeff) key = static_cast<int>(i);
    if (key < 0) {
      key = static_cast<int>(coeffs.size());
      coeffs.push_back(layer.coeff);
    }
    layer_key.push_back(key);
  }
  std::map<std::pair<int, int>, ProjectedGate> gates;
  for (size_t k = 0; k < coeffs.size(); ++k)
    for (int x = 1; x < state.length; ++x)
      gates[{static_cast<int>(k), x}] =
          build_projected_gate(chain.h_reduced[x - 1], chain.links[x - 1], coeffs[k] * gamma);

  EvolveResult result;
  result.trajectory.push_back(measure(state, chain, 0, 0.0));
  for (int step = 1; step <= opt.steps; ++step) {
    for (size_t li = 0; li < schedule.layers.size(); ++li)
      detail::apply_layer(state, chain, gates, schedule.layers[li].parity, layer_key[li],
                          opt.kernel, gate_opt, result.counters);
    if (opt.mode == EvolveMode::ImaginaryTime) state.normalize();
    if (opt.reproject_every > 0 && step % opt.reproject_every == 0)
      reproject(state, chain, opt.kernel, gate_opt, &result.counters);
    if (opt.measure_every > 0 && (step % opt.measure_every == 0 || step == opt.steps)) {
      StepRecord rec = measure(state, chain, step, step * opt.dt);
      if (rec.leakage > opt.leak_tol)
        throw KernelError("gauge leakage " + std::to_string(rec.leakage) +
                          " above leak_tol after re-projection (kernel bug)");
      result.trajectory.push_back(std::move(rec));
    }
  }
  return result;
}

// Imaginary-time ground-state search: a dt-annealing schedule with an energy
// convergence stop per stage.
struct GroundStateOptions {
  std::vector<std::pair<double, int>> schedule = {
      {0.2, 200}, {0.05, 400}, {0.01, 600}, {0.002, 800}, {0.0005, 1200}};
  double energy_tol = 1e-9;  // stop a stage when |dE| per step falls below
  int order = 2;
  int m_max = 64;
  double svd_tol = 1e-12;
  double leak_tol = 1e-10;
  KernelKind kernel = KernelKind::Blocked;
};

struct GroundStateResult {
  double energy = 0.0;
  std::vector<StepRecord> trajectory;
};

inline GroundStateResult find_ground_state(MpdoState& state, const ChainOperators& chain,
                                           const GroundStateOptions& opt) {
  GroundStateResult out;
  double last_energy = 0.0;
  bool have_last = false;
  for (const auto& [dt, steps] : opt.schedule) {
    EvolveOptions eo;
    eo.mode = EvolveMode::ImaginaryTime;
    eo.dt = dt;
    eo.order = opt.order;
    eo.m_max = opt.m_max;
    eo.svd_tol = opt.svd_tol;
    eo.leak_tol = opt.leak_tol;
    eo.kernel = opt.kernel;
    eo.steps = 1;
    eo.measure_every = 1;
    for (int s = 0; s < steps; ++s) {
      EvolveResult r = evolve(state, chain, eo);
      const StepRecord& rec = r.trajectory.back();
      out.trajectory.push_back(rec);
      if (have_last && std::abs(rec.energy - last_energy) < opt.energy_tol * dt) {
        last_energy = rec.energy;
        break;
      }
      last_energy = rec.energy;
      have_last = true;
    }
  }
  out.energy = last_energy;
  return out;
}

}  // namespace qlink
