#pragma once

#include <json.hpp>
#include <random>
#include <string>
#include <vector>

#include "qlink/automaton.hpp"
#include "qlink/evolve.hpp"
#include "qlink/oracle.hpp"

namespace qlink {

struct ValidationCheck {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::string model;
  std::vector<ValidationCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  void add(const std::string& name, double measured, double tolerance) {
    checks.push_back({name, measured, tolerance, measured <= tolerance});
  }
};

namespace detail {

// Two-site tensor of the pair (x, x+1) contracted over the middle bond; the
// gauge-invariant object compared between kernels.
inline std::vector<cx> two_site_tensor(const MpdoState& s, int x) {
  const SiteTensor& l = s.site[x - 1];
  const SiteTensor& r = s.site[x];
  std::vector<cx> theta(static_cast<size_t>(l.ml) * l.d * l.b * r.d * r.b * r.mr, cx(0.0));
  size_t i = 0;
  for (int wl = 0; wl < l.ml; ++wl)
    for (int j1 = 0; j1 < l.d; ++j1)
      for (int k1 = 0; k1 < l.b; ++k1)
        for (int j2 = 0; j2 < r.d; ++j2)
          for (int k2 = 0; k2 < r.b; ++k2)
            for (int wr = 0; wr < r.mr; ++wr, ++i)
              for (int w = 0; w < l.mr; ++w)
                theta[i] += l.at(wl, j1, k1, w) * r.at(w, j2, k2, wr);
  return theta;
}

inline double max_diff(const std::vector<cx>& a, const std::vector<cx>& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace detail

// Runs the full invariant suite for one model at a small chain length and
// reports measured residuals against their tolerances. corrupt_v is a test
// hook that flips one entry of the first link's V tensor, which must make the
// link-projector idempotence check fail.
inline ValidationReport run_validation(const GaugeModelSpec& spec, int length,
                                       std::uint64_t seed = 1, bool corrupt_v = false) {
  ValidationReport report;
  report.model = to_string(spec.group) + " nbar=" + std::to_string(spec.nbar);

  GaugeModelSpec s = spec;
  s.length = length;
  s.validate();
  ReducedBasis basis = ReducedBasis::build(s);
  const double tol = kStructuralTol;

  // isometry and projector identities, per sublattice parity
  double iso_id = 0.0, iso_proj = 0.0, proj_idem = 0.0, qp_comm = 0.0;
  const auto occ_minus = detail::occupation_totals(basis.ops.space, basis.ops.space.minus_mode(0));
  const auto occ_plus = detail::occupation_totals(basis.ops.space, basis.ops.space.plus_mode(0));
  for (int x : {1, 2}) {
    const VertexBasis& vb = basis.vertex(x);
    Mat p = build_gauge_projector(basis.ops, x);
    const Mat& a = vb.isometry;
    iso_id = std::max(iso_id, max_abs(Mat(a * a.adjoint() - Mat::Identity(vb.d(), vb.d()))));
    iso_proj = std::max(iso_proj, max_abs(Mat(a.adjoint() * a - p)));
    proj_idem = std::max(proj_idem, max_abs(Mat(p * p - p)));
    // [Q_{x,x+1}, P_x (x) 1] reduces to a vertex-level statement: P must not
    // mix n_+ sectors (and n_- sectors, for the right vertex).
    for (int r = 0; r < basis.ops.space.dim; ++r)
      for (int c = 0; c < basis.ops.space.dim; ++c) {
        qp_comm = std::max(qp_comm, std::abs(p(r, c)) *
                                        std::abs(occ_plus[r] - occ_plus[c]));
        qp_comm = std::max(qp_comm, std::abs(p(r, c)) *
                                        std::abs(occ_minus[r] - occ_minus[c]));
      }
  }
  report.add("isometry_identity", iso_id, tol);
  report.add("isometry_projector", iso_proj, tol);
  report.add("projector_idempotent", proj_idem, tol);
  report.add("link_gauge_commutator", qp_comm, tol);

  // link structures, possibly corrupted through the test hook
  std::vector<LinkStructure> links;
  for (int x = 1; x < length; ++x) links.push_back(build_link_projector(basis, x));
  if (corrupt_v) {
    // test hook: double the one-hot entry of the first V row; the rebuilt
    // diagonal then carries a 2 and the idempotence check below must fail
    LinkStructure& link = links[0];
    for (int q = 0; q <= link.nbar; ++q)
      if (link.v(0, q) == 1) {
        link.v(0, q) = 2;
        break;
      }
    for (int j = 0; j < link.sectors.dim_left; ++j)
      for (int jp = 0; jp < link.sectors.dim_right; ++jp) {
        int val = 0;
        for (int q = 0; q <= link.nbar; ++q) val += link.v(j, q) * link.z(q, jp);
        link.q_diag(static_cast<Eigen::Index>(j) * link.sectors.dim_right + jp) = val;
      }
  }

  // Q_r idempotence from the V/Z decomposition (diagonal entries must be 0/1)
  double q_idem = 0.0;
  for (const auto& link : links)
    for (Eigen::Index i = 0; i < link.q_diag.size(); ++i)
      q_idem = std::max(q_idem, std::abs(static_cast<double>(link.q_diag(i) * link.q_diag(i) -
                                                             link.q_diag(i))));
  report.add("link_projector_idempotent", q_idem, 0.0);

  // gate Hamiltonians: hermiticity, [h, N_link] = 0, [Q, exp(gamma h)] = 0
  double herm = 0.0, h_link = 0.0, q_exp = 0.0;
  for (int x = 1; x < length; ++x) {
    Mat h = reduced_gate_hamiltonian(basis, x);
    herm = std::max(herm, max_abs(Mat(h - h.adjoint())));
    TwoSiteOp link_n = basis.ops.link_number();
    Mat n_r = link_n.reduced(basis.vertex(x).isometry, basis.vertex(x + 1).isometry);
    h_link = std::max(h_link, max_abs(Mat(h * n_r - n_r * h)));
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec ph(h.rows());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::exp(cx(0.0, 0.1) * es.eigenvalues()(i));
    Mat em = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    Mat q = links[x - 1].q_dense();
    q_exp = std::max(q_exp, max_abs(Mat(q * em - em * q)));
  }
  report.add("gate_hermitian", herm, tol);
  report.add("gate_link_charge_commutator", h_link, tol);
  report.add("projector_exponential_commutator", q_exp, tol);

  // global MPO versus direct product of link masks; F entries binary
  ChainDims cd = ChainDims::make(basis, length);
  LinkMpo mpo = assemble_global_mpo(basis, length);
  IVec mpo_diag = mpo.contracted_diagonal(cd);
  IVec direct = qbar_diagonal_direct(basis, cd);
  double mpo_diff = 0.0, f_binary = 0.0;
  for (Eigen::Index i = 0; i < mpo_diag.size(); ++i)
    mpo_diff = std::max(mpo_diff, std::abs(static_cast<double>(mpo_diag(i) - direct(i))));
  for (const auto& core : mpo.cores)
    for (int8_t v : core.f) f_binary = std::max(f_binary, std::abs(v * (v - 1.0)));
  report.add("qbar_mpo_matches_direct", mpo_diff, 0.0);
  report.add("f_entries_binary", f_binary, 0.0);

  // [H_r, Qbar_r] on the product space: Qbar is diagonal, so the commutator
  // entry is H(r,c) (qbar(c) - qbar(r)).
  std::vector<Mat> gates = oracle::reduced_gates(basis, length);
  double hq = 0.0;
  {
    std::vector<int> j(length, 0);
    for (long long col = 0; col < cd.total; ++col) {
      for (int x = 1; x < length; ++x) {
        const int dl = basis.dim(x), dr = basis.dim(x + 1);
        std::vector<int> jp = j;
        for (int a = 0; a < dl; ++a)
          for (int b = 0; b < dr; ++b) {
            const cx amp = gates[x - 1](a * dr + b, j[x - 1] * dr + j[x]);
            if (std::abs(amp) < 1e-15) continue;
            jp[x - 1] = a;
            jp[x] = b;
            const long long row = cd.index(jp);
            hq = std::max(hq, std::abs(amp) * std::abs(direct(row) - direct(col)));
          }
      }
      for (int x = length - 1; x >= 0; --x) {
        if (++j[x] < cd.dims[x]) break;
        j[x] = 0;
      }
    }
  }
  report.add("hamiltonian_qbar_commutator", hq, tol);

  // chi against the closed forms
  int chi_expected = -1;
  if (s.group == GaugeGroup::U1)
    chi_expected = 4 * s.nbar + 1;
  else if (s.nbar == 1)
    chi_expected = 8;
  else if (s.nbar == 2)
    chi_expected = 14;
  if (chi_expected > 0)
    report.add("chi_closed_form", std::abs(links[0].sectors.chi - chi_expected), 0.0);
  report.add("mpo_bondlink_minimal", std::abs(link_schmidt_rank(links[0]) - (s.nbar + 1)), 0.0);

  // counting equivalence: enumeration = automaton = trace of Qbar_r
  oracle::Enumeration en = oracle::enumerate_constrained(basis, length);
  AutomatonGraph graph = build_automaton(basis);
  DimensionTable table = dimension_table(graph, length);
  const double cnt_auto =
      std::abs(static_cast<double>(en.size()) - table.total(length).convert_to<double>());
  const double cnt_trace = std::abs(static_cast<double>(en.size() - mpo.trace(cd)));
  report.add("count_enumeration_vs_automaton", cnt_auto, 0.0);
  report.add("count_enumeration_vs_trace", cnt_trace, 0.0);
  double arrows_per_parity = 0.0;
  arrows_per_parity = std::max(
      arrows_per_parity,
      std::abs(static_cast<double>(graph.arrows_odd_site.size()) - basis.odd_basis.d()));
  arrows_per_parity = std::max(
      arrows_per_parity,
      std::abs(static_cast<double>(graph.arrows_even_site.size()) - basis.even_basis.d()));
  report.add("automaton_arrows_per_parity", arrows_per_parity, 0.0);

  // blocked versus dense kernel on a random constrained state
  {
    std::mt19937_64 rng(seed);
    MpdoState a = MpdoState::random_constrained(basis, length, 4, 2, rng);
    MpdoState b = a;
    const int x = length - 1;  // last link: unaffected by the corrupt_v hook
    Mat h = gates[x - 1];
    ProjectedGate gate = build_projected_gate(h, links[x - 1], cx(0.0, 0.05));
    GateApplyOptions opt;
    opt.m_max = 256;
    apply_gate_blocked(a, gate, links[x - 1].sectors, opt);
    apply_gate_dense(b, gate, opt);
    report.add("kernel_blocked_vs_dense",
               detail::max_diff(detail::two_site_tensor(a, x), detail::two_site_tensor(b, x)),
               1e-10);
  }

  return report;
}

inline std::vector<GaugeModelSpec> worked_models(int length) {
  return {GaugeModelSpec::u1(1, length, {1.0, 0.5, 1.0, 0.0}),
          GaugeModelSpec::u1(2, length, {1.0, 0.5, 1.0, 0.0}),
          GaugeModelSpec::u2(1, length, {1.0, 0.5, 1.0, 0.8}),
          GaugeModelSpec::u2(2, length, {1.0, 0.5, 1.0, 0.8})};
}

inline nlohmann::ordered_json validation_to_json(const std::vector<ValidationReport>& reports) {
  nlohmann::ordered_json out;
  out["reports"] = nlohmann::ordered_json::array();
  bool all = true;
  for (const auto& r : reports) {
    nlohmann::ordered_json jr;
    jr["model"] = r.model;
    jr["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) {
      nlohmann::ordered_json jc;
      jc["name"] = c.name;
      jc["measured"] = c.measured;
      jc["tolerance"] = c.tolerance;
      jc["pass"] = c.pass;
      jr["checks"].push_back(jc);
    }
    jr["all_pass"] = r.all_pass();
    all = all && r.all_pass();
    out["reports"].push_back(jr);
  }
  out["all_pass"] = all;
  return out;
}

}  // namespace qlink
