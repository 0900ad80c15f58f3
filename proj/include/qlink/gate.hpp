#pragma once

#include <Eigen/Eigenvalues>

#include "qlink/link_constraint.hpp"
#include "qlink/types.hpp"

namespace qlink {

// Constrained evolution gate M^{[r,nu]} = Q_{r,x,x+1} exp(c_nu gamma h^{[r]}),
// supported exactly on Omega x Omega after masking.
struct ProjectedGate {
  int x = 1;  // left vertex
  cx tau;     // c_nu * gamma
  Mat m;      // (d_l d_r)^2, row = output pair j_l*d_r + j_r
};

// h_r must be Hermitian; the exponential is computed by eigendecomposition
// (the gates are small). Asserted structure: [Q, exp] = 0, conservation of
// the total link rishon number (entries between pairs of different total
// vanish), support contained in Omega x Omega.
inline ProjectedGate build_projected_gate(const Mat& h_r, const LinkStructure& link, cx tau,
                                          double tol = kStructuralTol) {
  if (!is_hermitian(h_r, 1e-10)) throw ModelError("build_projected_gate: non-Hermitian input");
  const Eigen::Index n = h_r.rows();
  if (link.q_diag.size() != n) throw DimensionError("build_projected_gate: dimension mismatch");

  Eigen::SelfAdjointEigenSolver<Mat> es(h_r);
  Vec phases(n);
  for (Eigen::Index i = 0; i < n; ++i) phases(i) = std::exp(tau * es.eigenvalues()(i));
  Mat expm = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

  // [Q, exp(tau h)] = 0: Q is diagonal 0/1, so the commutator entry is
  // (q_r - q_c) * expm(r,c).
  double comm = 0.0;
  const double scale = std::max(1.0, expm.cwiseAbs().maxCoeff());
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      if (link.q_diag(r) != link.q_diag(c))
        comm = std::max(comm, std::abs(expm(r, c)));
  if (comm > tol * scale)
    throw KernelError("build_projected_gate: gate does not commute with the link projector");

  // conservation of the total link charge n_+(x,j) + n_-(x+1,j')
  const int dr = link.sectors.dim_right;
  std::vector<int> pair_total(n);
  for (Eigen::Index p = 0; p < n; ++p) {
    const int jl = static_cast<int>(p) / dr, jr = static_cast<int>(p) % dr;
    int npl = 0, nmr = 0;
    for (int q = 0; q <= link.nbar; ++q) {
      if (link.v(jl, q)) npl = q;
      if (link.z(q, jr)) nmr = link.nbar - q;
    }
    pair_total[p] = npl + nmr;
  }
  double charge_violation = 0.0;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      if (pair_total[r] != pair_total[c])
        charge_violation = std::max(charge_violation, std::abs(expm(r, c)));
  if (charge_violation > tol * scale)
    throw KernelError("build_projected_gate: gate violates link charge conservation");

  ProjectedGate gate;
  gate.x = link.x;
  gate.tau = tau;
  gate.m = Mat::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (!link.q_diag(r)) continue;
    for (Eigen::Index c = 0; c < n; ++c) {
      if (!link.q_diag(c)) continue;  // exp maps supp(Q) to itself
      gate.m(r, c) = expm(r, c);
    }
  }
  return gate;
}

// The projector itself as a gate (tau = 0).
inline ProjectedGate projector_gate(const LinkStructure& link) {
  ProjectedGate gate;
  gate.x = link.x;
  gate.tau = cx(0.0);
  gate.m = link.q_dense();
  return gate;
}

}  // namespace qlink
