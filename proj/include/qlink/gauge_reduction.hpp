#pragma once

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "qlink/hamiltonian.hpp"
#include "qlink/local_ops.hpp"

namespace qlink {

// Relative singular-value threshold of the rank-revealing factorizations used
// to build projectors and reduced bases.
inline constexpr double kRankTol = 1e-10;

// One canonical gauge-invariant vertex state |j>_r: a simultaneous eigenvector
// of n_- and n_+ inside the physical subspace.
struct ReducedState {
  Vec coeff;  // amplitudes over the unreduced vertex basis
  int n_minus = 0;
  int n_plus = 0;
  int n_psi = 0;
};

struct VertexBasis {
  int parity = 1;  // 1 = odd sites, 0 = even sites (1-based x)
  int target = 0;  // particle_number_rule value at this parity
  int dim_full = 0;
  std::vector<ReducedState> states;
  Mat isometry;  // A: d x D with A A^dag = 1_d and A^dag A = P

  int d() const { return static_cast<int>(states.size()); }
  int n_plus(int j) const { return states[j].n_plus; }
  int n_minus(int j) const { return states[j].n_minus; }
};

namespace detail {

inline std::vector<int> occupation_totals(const VertexSpace& vs, int first_mode) {
  std::vector<int> occ(vs.dim, 0);
  for (int s = 0; s < vs.dim; ++s)
    for (int c = 0; c < vs.colors; ++c) occ[s] += vs.occupation(s, first_mode + c);
  return occ;
}

inline bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return false;
}

}  // namespace detail

// Projector P_x onto the gauge-invariant vertex subspace: joint kernel of the
// Gauss constraints (occupancy target for the U(1) part, SU(2) generators for
// U2) together with the per-end occupancy caps forced by the link constraint.
inline Mat build_gauge_projector(const LocalOperatorSet& ops, int x) {
  const VertexSpace& vs = ops.space;
  const int target = ops.spec.target_occupation(x);
  const int cap = ops.spec.end_capacity();

  std::vector<Mat> rows;
  rows.push_back(ops.n_total - static_cast<double>(target) * Mat::Identity(vs.dim, vs.dim));

  const auto occ_minus = detail::occupation_totals(vs, vs.minus_mode(0));
  const auto occ_plus = detail::occupation_totals(vs, vs.plus_mode(0));
  Mat cap_minus = Mat::Zero(vs.dim, vs.dim), cap_plus = Mat::Zero(vs.dim, vs.dim);
  bool any_cap = false;
  for (int s = 0; s < vs.dim; ++s) {
    if (occ_minus[s] > cap) cap_minus(s, s) = 1.0, any_cap = true;
    if (occ_plus[s] > cap) cap_plus(s, s) = 1.0, any_cap = true;
  }
  if (any_cap) {
    rows.push_back(cap_minus);
    rows.push_back(cap_plus);
  }
  if (ops.nonabelian())
    for (int nu = 0; nu < 3; ++nu) rows.push_back(ops.gauge_su2[nu]);

  Mat stacked(static_cast<Eigen::Index>(rows.size()) * vs.dim, vs.dim);
  for (size_t r = 0; r < rows.size(); ++r)
    stacked.block(static_cast<Eigen::Index>(r) * vs.dim, 0, vs.dim, vs.dim) = rows[r];

  Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankTol * smax) ++rank;
  const int d = vs.dim - rank;
  if (d == 0)
    throw ModelError("particle_number_rule admits no gauge-invariant state at vertex " +
                     std::to_string(x));
  Mat null_basis = svd.matrixV().rightCols(d);
  return null_basis * null_basis.adjoint();
}

// Canonical gauge-link basis of range(P): per joint (n_-, n_+) eigenvalue
// block, an orthonormal range basis from a column-pivoted QR in fixed input
// ordering; states sorted by (n_+, n_-, lexicographic coefficients).
inline VertexBasis canonical_reduced_basis(const Mat& p, const LocalOperatorSet& ops, int x) {
  const VertexSpace& vs = ops.space;
  VertexBasis basis;
  basis.parity = x % 2;
  basis.target = ops.spec.target_occupation(x);
  basis.dim_full = vs.dim;

  // [n_{x,+-}, G] = 0 is a precondition: P must be block diagonal over the
  // joint occupation sectors.
  const auto occ_minus = detail::occupation_totals(vs, vs.minus_mode(0));
  const auto occ_plus = detail::occupation_totals(vs, vs.plus_mode(0));
  const int cap = ops.spec.end_capacity();
  for (int s = 0; s < vs.dim; ++s)
    for (int t = 0; t < vs.dim; ++t)
      if ((occ_minus[s] != occ_minus[t] || occ_plus[s] != occ_plus[t]) &&
          std::abs(p(s, t)) > kRankTol)
        throw ModelError("gauge projector mixes rishon occupation sectors");

  for (int b = 0; b <= cap; ++b) {
    for (int a = 0; a <= cap; ++a) {
      std::vector<int> idx;
      for (int s = 0; s < vs.dim; ++s)
        if (occ_minus[s] == a && occ_plus[s] == b) idx.push_back(s);
      if (idx.empty()) continue;
      const int n = static_cast<int>(idx.size());
      Mat block(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) block(r, c) = p(idx[r], idx[c]);
      if (block.cwiseAbs().maxCoeff() < kRankTol) continue;

      Eigen::ColPivHouseholderQR<Mat> qr(block);
      qr.setThreshold(kRankTol);
      const int rank = static_cast<int>(qr.rank());
      if (rank == 0) continue;
      Mat q = qr.householderQ() * Mat::Identity(n, rank);

      std::vector<Vec> block_states;
      for (int k = 0; k < rank; ++k) {
        Vec v = Vec::Zero(vs.dim);
        for (int r = 0; r < n; ++r) v(idx[r]) = q(r, k);
        // phase fix: largest-magnitude amplitude made real positive
        int kmax = 0;
        double amax = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i)
          if (std::abs(v(i)) > amax + 1e-14) amax = std::abs(v(i)), kmax = static_cast<int>(i);
        v *= std::conj(v(kmax)) / std::abs(v(kmax));
        block_states.push_back(std::move(v));
      }
      std::sort(block_states.begin(), block_states.end(), detail::lex_less);
      for (auto& v : block_states)
        basis.states.push_back({std::move(v), a, b, basis.target - a - b});
    }
  }

  const int d = static_cast<int>(basis.states.size());
  basis.isometry.resize(d, vs.dim);
  for (int j = 0; j < d; ++j) basis.isometry.row(j) = basis.states[j].coeff.conjugate();

  // contract: each |j>_r is a simultaneous eigenvector of n_-, n_+ and is
  // annihilated by the (shifted) gauge generators.
  for (int j = 0; j < d; ++j) {
    const auto& st = basis.states[j];
    if (max_abs(Vec(ops.n_minus * st.coeff - static_cast<double>(st.n_minus) * st.coeff)) > 1e-9 ||
        max_abs(Vec(ops.n_plus * st.coeff - static_cast<double>(st.n_plus) * st.coeff)) > 1e-9)
      throw ModelError("canonical state is not a rishon-number eigenvector");
    if (ops.nonabelian())
      for (int nu = 0; nu < 3; ++nu)
        if (max_abs(Vec(ops.gauge_su2[nu] * st.coeff)) > 1e-9)
          throw ModelError("canonical state is not gauge invariant");
  }
  return basis;
}

// Per-vertex reduced bases of a staggered chain (period 2: one basis per
// sublattice parity).
struct ReducedBasis {
  GaugeModelSpec spec;
  LocalOperatorSet ops;
  VertexBasis odd_basis, even_basis;

  const VertexBasis& vertex(int x) const { return (x % 2 == 1) ? odd_basis : even_basis; }
  int dim(int x) const { return vertex(x).d(); }
  int n_plus(int x, int j) const { return vertex(x).n_plus(j); }
  int n_minus(int x, int j) const { return vertex(x).n_minus(j); }

  static ReducedBasis build(const GaugeModelSpec& spec) {
    ReducedBasis rb;
    rb.spec = spec;
    rb.ops = LocalOperatorSet::build(spec);
    Mat p_odd = build_gauge_projector(rb.ops, 1);
    rb.odd_basis = canonical_reduced_basis(p_odd, rb.ops, 1);
    if (spec.filling.uniform()) {
      rb.even_basis = rb.odd_basis;
      rb.even_basis.parity = 0;
    } else {
      Mat p_even = build_gauge_projector(rb.ops, 2);
      rb.even_basis = canonical_reduced_basis(p_even, rb.ops, 2);
    }
    return rb;
  }
};

// (A_1 (x) ... (x) A_k) O (A_1 (x) ... (x) A_k)^dag for a dense operator on
// the unreduced span of the listed vertices.
inline Mat reduce_operator(const std::vector<const Mat*>& isometries, const Mat& op) {
  Mat a_total = Mat::Identity(1, 1);
  for (const Mat* a : isometries) a_total = kron(a_total, *a);
  if (a_total.cols() != op.rows()) throw DimensionError("reduce_operator: dimension mismatch");
  return a_total * op * a_total.adjoint();
}

inline Mat reduce_vertex_operator(const VertexBasis& vb, const Mat& op) {
  if (vb.isometry.cols() != op.rows())
    throw DimensionError("reduce_vertex_operator: dimension mismatch");
  return vb.isometry * op * vb.isometry.adjoint();
}

// Reduced two-site gate Hamiltonian h^{[r]}_{x,x+1}.
inline Mat reduced_gate_hamiltonian(const ReducedBasis& basis, int x) {
  TwoSiteOp h = build_two_site_hamiltonian(basis.ops, x);
  return h.reduced(basis.vertex(x).isometry, basis.vertex(x + 1).isometry);
}

// Human-readable listing of the reduced basis (documentation + golden tests).
inline std::string dump_reduced_basis(const ReducedBasis& basis) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(6);
  const VertexSpace& vs = basis.ops.space;
  auto dump_vertex = [&](const VertexBasis& vb, const char* name) {
    out << "# " << name << " sites: d=" << vb.d() << " D=" << vb.dim_full
        << " target=" << vb.target << "\n";
    for (int j = 0; j < vb.d(); ++j) {
      const auto& st = vb.states[j];
      out << "j=" << (j + 1) << "  n-=" << st.n_minus << " npsi=" << st.n_psi
          << " n+=" << st.n_plus << "  ";
      bool first = true;
      for (int s = 0; s < vs.dim; ++s) {
        if (std::abs(st.coeff(s)) < 1e-12) continue;
        if (!first) out << "  ";
        first = false;
        out << "|";
        for (int m = 0; m < vs.n_modes(); ++m) {
          if (m) out << ",";
          out << vs.occupation(s, m);
        }
        out << "> ";
        const cx amp = st.coeff(s);
        out << (amp.real() >= 0 ? "+" : "") << amp.real();
        if (std::abs(amp.imag()) > 1e-12) out << (amp.imag() >= 0 ? "+" : "") << amp.imag() << "i";
      }
      out << "\n";
    }
  };
  dump_vertex(basis.odd_basis, "odd");
  dump_vertex(basis.even_basis, "even");
  return out.str();
}

}  // namespace qlink
