// Acceptance suite: thirteen numbered criteria, one pass/fail line each.
// Every tolerance is pinned here. Exit code = number of failed criteria.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <vector>

#include "qlink/qlink.hpp"

using namespace qlink;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::vector<GaugeModelSpec> acceptance_models() {
  return {GaugeModelSpec::u1(1, 4, {1.0, 0.5, 1.0, 0.0}),
          GaugeModelSpec::u1(2, 4, {0.8, 0.3, 0.9, 0.0}),
          GaugeModelSpec::u2(1, 4, {1.0, 0.5, 1.0, 0.8}),
          GaugeModelSpec::u2(2, 4, {1.0, 0.5, 1.0, 0.8})};
}

// ---------------------------------------------------------------------- 1
void criterion_1_fibonacci() {
  Timer timer;
  ReducedBasis basis = ReducedBasis::build(GaugeModelSpec::u1(1, 4));
  DimensionTable t = dimension_table(build_automaton(basis), 60);
  bool pass = true;
  BigInt a = 1, b = 1;  // Fib(1), Fib(2)
  std::vector<BigInt> fib = {a, b};
  for (int k = 3; k <= 63; ++k) fib.push_back(fib[fib.size() - 1] + fib[fib.size() - 2]);
  for (int l = 0; l <= 60; ++l) pass = pass && (t.total(l) == fib[l + 2]);
  const int pairs[5][2] = {{1, 1}, {2, 1}, {3, 2}, {5, 3}, {8, 5}};
  for (int l = 0; l <= 4; ++l)
    pass = pass && (t.dq[l][0] == pairs[l][0]) && (t.dq[l][1] == pairs[l][1]);
  const double dt = timer.seconds();
  pass = pass && dt < 1.0;
  report(1, "Fibonacci dimension law, U1 nbar=1, l=0..60", pass, "runtime " + fmt(dt) + " s");
}

// ---------------------------------------------------------------------- 2
void criterion_2_golden_ratio() {
  Timer timer;
  ReducedBasis basis = ReducedBasis::build(GaugeModelSpec::u1(1, 4));
  DimensionTable t = dimension_table(build_automaton(basis), 1000);
  AlphaFit fit = fit_alpha(t, 100, 1000);
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double err = std::abs(fit.alpha - phi);
  const double dt = timer.seconds();
  report(2, "golden-ratio growth (alpha within 1e-4 of 1.6180)", err <= 1e-4 && dt < 5.0,
         "alpha " + fmt(fit.alpha) + ", err " + fmt(err) + ", runtime " + fmt(dt) + " s");
}

// ---------------------------------------------------------------------- 3
void criterion_3_u2_single() {
  Timer timer;
  ReducedBasis basis = ReducedBasis::build(GaugeModelSpec::u2(1, 4));
  DimensionTable t = dimension_table(build_automaton(basis), 200);
  bool pass = true;
  for (int l = 0; l <= 200; ++l) pass = pass && (t.total(l) == BigInt(1) << (l + 1));
  const double dt = timer.seconds();
  pass = pass && dt < 1.0;
  report(3, "U2 nbar=1: D(l) = 2^(l+1) exactly, l=0..200", pass, "runtime " + fmt(dt) + " s");
}

// ---------------------------------------------------------------------- 4
void criterion_4_u2_double() {
  Timer timer;
  ReducedBasis basis = ReducedBasis::build(GaugeModelSpec::u2(2, 4));
  DimensionTable t = dimension_table(build_automaton(basis), 850);
  AlphaFit fit = fit_alpha(t, 100, 850);
  const double err = std::abs(fit.alpha - 2.2469796);
  const double dt = timer.seconds();
  report(4, "U2 nbar=2 growth basis (within 1e-3 of 2.2469796)", err <= 1e-3 && dt < 5.0,
         "alpha " + fmt(fit.alpha) + ", err " + fmt(err) + ", runtime " + fmt(dt) + " s");
}

// ---------------------------------------------------------------------- 5
void criterion_5_alpha_saturation() {
  Timer timer;
  bool pass = true;
  std::string detail;
  try {
    std::vector<int> nbars;
    for (int n = 1; n <= 10; ++n) nbars.push_back(n);
    auto rows = alpha_saturation_scan(nbars, 100, 1000);  // throws unless monotone and < 2
    // log(2 - alpha) vs log(nbar) linear fit over nbar = 2..10
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int n = 0;
    for (const auto& r : rows) {
      if (r.nbar < 2) continue;
      const double x = std::log(static_cast<double>(r.nbar)), y = std::log(r.two_minus_alpha);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      syy += y * y;
      ++n;
    }
    const double cov = n * sxy - sx * sy;
    const double r2 = cov * cov / ((n * sxx - sx * sx) * (n * syy - sy * sy));
    pass = r2 >= 0.98;
    detail = "R^2 " + fmt(r2);
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  const double dt = timer.seconds();
  pass = pass && dt < 60.0;
  report(5, "alpha(nbar) monotone, < 2, polynomial saturation", pass,
         detail + ", runtime " + fmt(dt) + " s");
}

// ---------------------------------------------------------------------- 6
void criterion_6_structural_identities() {
  Timer timer;
  double worst = 0.0;
  for (const auto& spec : acceptance_models()) {
    ReducedBasis basis = ReducedBasis::build(spec);
    // A A^dag = 1 and A^dag A = P
    for (int x : {1, 2}) {
      const Mat& a = basis.vertex(x).isometry;
      Mat p = build_gauge_projector(basis.ops, x);
      worst = std::max(worst, max_abs(Mat(a * a.adjoint() -
                                          Mat::Identity(a.rows(), a.rows()))));
      worst = std::max(worst, max_abs(Mat(a.adjoint() * a - p)));
    }
    // Qbar^2 = Qbar (diagonal 0/1 from the contracted MPO)
    ChainDims cd = ChainDims::make(basis, 4);
    LinkMpo mpo = assemble_global_mpo(basis, 4);
    IVec diag = mpo.contracted_diagonal(cd);
    for (Eigen::Index i = 0; i < diag.size(); ++i)
      worst = std::max(worst, std::abs(static_cast<double>(diag(i) * diag(i) - diag(i))));
    // [H_r, Qbar_r] = 0 (Qbar diagonal: entrywise criterion)
    std::vector<Mat> gates = oracle::reduced_gates(basis, 4);
    std::vector<int> j(4, 0);
    for (long long col = 0; col < cd.total; ++col) {
      for (int x = 1; x < 4; ++x) {
        const int dl = basis.dim(x), dr = basis.dim(x + 1);
        std::vector<int> jp = j;
        for (int a = 0; a < dl; ++a)
          for (int b = 0; b < dr; ++b) {
            const cx amp = gates[x - 1](a * dr + b, j[x - 1] * dr + j[x]);
            if (std::abs(amp) < 1e-15) continue;
            jp[x - 1] = a;
            jp[x] = b;
            worst = std::max(worst, std::abs(amp) * std::abs(diag(cd.index(jp)) - diag(col)));
          }
      }
      for (int x = 3; x >= 0; --x) {
        if (++j[x] < cd.dims[x]) break;
        j[x] = 0;
      }
    }
    // [Q_r, exp(gamma h_r)] = 0
    for (int x = 1; x < 4; ++x) {
      LinkStructure link = build_link_projector(basis, x);
      Mat h = gates[x - 1];
      Eigen::SelfAdjointEigenSolver<Mat> es(h);
      Vec ph(h.rows());
      for (Eigen::Index i = 0; i < ph.size(); ++i)
        ph(i) = std::exp(cx(0.0, 0.2) * es.eigenvalues()(i));
      Mat em = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
      Mat q = link.q_dense();
      worst = std::max(worst, max_abs(Mat(q * em - em * q)));
    }
  }
  const double dt = timer.seconds();
  report(6, "structural identities at L=4, all four models, max-entry 1e-12",
         worst <= 1e-12 && dt < 30.0, "worst " + fmt(worst) + ", runtime " + fmt(dt) + " s");
}

// ---------------------------------------------------------------------- 7
void criterion_7_chi() {
  bool pass = true;
  std::string detail;
  {
    ReducedBasis basis = ReducedBasis::build(GaugeModelSpec::u1(1, 4));
    const int chi = build_link_projector(basis, 1).sectors.chi;
    pass = pass && chi == 5;
    detail += "U1(1):" + std::to_string(chi);
  }
  for (int nbar = 1; nbar <= 6; ++nbar) {
    ReducedBasis basis = ReducedBasis::build(GaugeModelSpec::u1(nbar, 4));
    for (int x : {1, 2}) pass = pass && build_link_projector(basis, x).sectors.chi == 4 * nbar + 1;
  }
  {
    ReducedBasis basis = ReducedBasis::build(GaugeModelSpec::u2(1, 4));
    const int chi = build_link_projector(basis, 1).sectors.chi;
    pass = pass && chi == 8;
    detail += " U2(1):" + std::to_string(chi);
  }
  {
    ReducedBasis basis = ReducedBasis::build(GaugeModelSpec::u2(2, 4));
    const int chi = build_link_projector(basis, 1).sectors.chi;
    pass = pass && chi == 14;
    detail += " U2(2):" + std::to_string(chi);
  }
  report(7, "support dimensions chi (5, 4nbar+1, 8, 14)", pass, detail);
}

// ---------------------------------------------------------------------- 8
void criterion_8_counting() {
  bool pass = true;
  for (const auto& spec : acceptance_models()) {
    GaugeModelSpec s = spec;
    s.length = 6;
    ReducedBasis basis = ReducedBasis::build(s);
    DimensionTable t = dimension_table(build_automaton(basis), 6);
    for (int length = 2; length <= 6; ++length) {
      auto e = oracle::enumerate_constrained(basis, length);
      LinkMpo mpo = assemble_global_mpo(basis, length);
      pass = pass && (BigInt(e.size()) == t.total(length));
      pass = pass && (static_cast<long long>(e.size()) ==
                      mpo.trace(ChainDims::make(basis, length)));
    }
  }
  report(8, "enumeration = automaton = trace(Qbar), exact, L <= 6", pass, "all models");
}

// ---------------------------------------------------------------------- 9
void criterion_9_kernel_equivalence() {
  Timer timer;
  double worst = 0.0;
  std::mt19937_64 rng(2024);
  for (const auto& spec : acceptance_models()) {
    ReducedBasis basis = ReducedBasis::build(spec);
    ChainOperators chain = ChainOperators::build(basis, 4);
    for (int rep = 0; rep < 50; ++rep) {
      const int x = 1 + rep % 3;
      MpdoState a = MpdoState::random_constrained(basis, 4, 4, 2, rng);
      MpdoState b = a;
      ProjectedGate gate =
          build_projected_gate(chain.h_reduced[x - 1], chain.links[x - 1], cx(0.0, 0.06));
      GateApplyOptions opt;
      opt.m_max = 512;
      apply_gate_blocked(a, gate, chain.links[x - 1].sectors, opt);
      apply_gate_dense(b, gate, opt);
      worst = std::max(worst, detail::max_diff(detail::two_site_tensor(a, x),
                                               detail::two_site_tensor(b, x)));
    }
  }
  const double dt = timer.seconds();
  report(9, "blocked kernel = dense kernel, 50 random states per model",
         worst <= 1e-10 && dt < 60.0, "worst " + fmt(worst) + ", runtime " + fmt(dt) + " s");
}

// --------------------------------------------------------------------- 10
void criterion_10_cost_model() {
  const int m = 6, b = 2;
  bool pass = true;
  std::string detail = "svd ratios";
  double prev_ratio = 2.0;
  for (int nbar = 1; nbar <= 4; ++nbar) {
    GaugeModelSpec spec = GaugeModelSpec::u1(nbar, 4, {1.0, 0.0, 1.0, 0.0});
    ReducedBasis basis = ReducedBasis::build(spec);
    ChainOperators chain = ChainOperators::build(basis, 4);
    std::mt19937_64 rng(7);
    MpdoState a = MpdoState::random_constrained(basis, 4, m, b, rng);
    MpdoState bb = a;
    const int x = 2;
    ProjectedGate gate =
        build_projected_gate(chain.h_reduced[x - 1], chain.links[x - 1], cx(0.0, 0.05));
    GateApplyOptions opt;
    opt.m_max = 1 << 20;
    OpCounter cb, cd;
    apply_gate_blocked(a, gate, chain.links[x - 1].sectors, opt, &cb);
    apply_gate_dense(bb, gate, opt, &cd);

    const double d = basis.dim(x), chi = chain.links[x - 1].sectors.chi;
    pass = pass && (static_cast<double>(cb.contraction_madds) <=
                    1.1 * (chi * b * b * double(m) * m * m));
    pass = pass && (static_cast<double>(cb.gate_madds) <=
                    1.1 * (chi * chi * b * b * double(m) * m));
    const double dense_contract = d * d * b * b * double(m) * m * m;
    const double dense_gate = d * d * d * d * b * b * double(m) * m;
    pass = pass && std::abs(cd.contraction_madds - dense_contract) <= 0.1 * dense_contract;
    pass = pass && std::abs(cd.gate_madds - dense_gate) <= 0.1 * dense_gate;
    const double ratio = static_cast<double>(cb.svd_model_ops) / cd.svd_model_ops;
    pass = pass && ratio < prev_ratio;
    prev_ratio = ratio;
    detail += " " + fmt(ratio);
  }
  report(10, "blocked cost model within bounds; SVD ratio decreasing in nbar", pass, detail);
}

// --------------------------------------------------------------------- 11/13
double g_leak_worst = 0.0;

void criterion_11_ground_state() {
  Timer timer;
  bool pass = true;
  std::string detail;
  for (int length : {4, 6}) {
    GaugeModelSpec spec = GaugeModelSpec::u1(1, length, {1.0, 0.5, 1.0, 0.0});
    ReducedBasis basis = ReducedBasis::build(spec);
    ChainOperators chain = ChainOperators::build(basis, length);
    auto en = oracle::enumerate_constrained(basis, length);
    auto [e0, gs] = oracle::ground_state(oracle::dense_hamiltonian(basis, en, chain.h_reduced));
    MpdoState state = MpdoState::projected_uniform(basis, length);
    GroundStateResult res = find_ground_state(state, chain, GroundStateOptions{});
    const double err = std::abs(res.energy - e0);
    pass = pass && err <= 1e-6;
    for (const auto& rec : res.trajectory) g_leak_worst = std::max(g_leak_worst, rec.leakage);
    detail += "L=" + std::to_string(length) + " err " + fmt(err) + "  ";
  }
  const double dt = timer.seconds();
  pass = pass && dt < 120.0;
  report(11, "imaginary-time ground state within 1e-6 of the oracle (L=4, 6)", pass,
         detail + "runtime " + fmt(dt) + " s");
}

void criterion_12_real_time() {
  Timer timer;
  GaugeModelSpec spec = GaugeModelSpec::u1(1, 4, {1.0, 0.5, 1.0, 0.0});
  ReducedBasis basis = ReducedBasis::build(spec);
  ChainOperators chain = ChainOperators::build(basis, 4);
  auto en = oracle::enumerate_constrained(basis, 4);
  Mat h = oracle::dense_hamiltonian(basis, en, chain.h_reduced);

  auto run = [&](double dt) {
    MpdoState state = MpdoState::projected_uniform(basis, 4);
    Vec psi0_full = state.to_vector();
    Vec psi0(en.size());
    for (int k = 0; k < en.size(); ++k) psi0(k) = psi0_full(en.dims.index(en.configs[k]));
    psi0.normalize();
    EvolveOptions opt;
    opt.mode = EvolveMode::RealTime;
    opt.dt = dt;
    opt.steps = static_cast<int>(std::lround(1.0 / dt));
    opt.order = 2;
    opt.svd_tol = 0.0;  // error-order study: no truncation beyond roundoff
    opt.measure_every = 50;
    EvolveResult r = evolve(state, chain, opt);
    for (const auto& rec : r.trajectory) g_leak_worst = std::max(g_leak_worst, rec.leakage);
    Vec psi_t = state.to_vector();
    psi_t.normalize();
    Vec psi_ex = oracle::embed(en, oracle::exact_propagate(h, psi0, 1.0, false));
    const double dist = (psi_t - psi_ex).norm();
    const double fidelity = std::abs(psi_ex.dot(psi_t));
    return std::make_pair(dist, fidelity);
  };

  auto [d4, f4] = run(4e-3);
  auto [d2, f2] = run(2e-3);
  auto [d1, f1] = run(1e-3);
  const double slope_a = std::log(d4 / d2) / std::log(2.0);
  const double slope_b = std::log(d2 / d1) / std::log(2.0);
  bool pass = f1 >= 1.0 - 1e-6;
  pass = pass && std::abs(slope_a - 2.0) <= 0.3 && std::abs(slope_b - 2.0) <= 0.3;
  const double dt = timer.seconds();
  report(12, "real-time p=2 accuracy: fidelity and error order", pass,
         "1-F " + fmt(1.0 - f1) + ", slopes " + fmt(slope_a) + "/" + fmt(slope_b) +
             ", runtime " + fmt(dt) + " s");
}

void criterion_13_gauge_protection() {
  report(13, "gauge leakage <= 1e-10 at every logged step of criteria 11-12",
         g_leak_worst <= 1e-10, "worst leakage " + fmt(g_leak_worst));
}

}  // namespace

int main() {
  std::printf("qlink acceptance suite\n");
  criterion_1_fibonacci();
  criterion_2_golden_ratio();
  criterion_3_u2_single();
  criterion_4_u2_double();
  criterion_5_alpha_saturation();
  criterion_6_structural_identities();
  criterion_7_chi();
  criterion_8_counting();
  criterion_9_kernel_equivalence();
  criterion_10_cost_model();
  criterion_11_ground_state();
  criterion_12_real_time();
  criterion_13_gauge_protection();
  if (g_failures == 0)
    std::printf("all 13 criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", g_failures);
  return g_failures;
}
