#pragma once

#include "qlink/local_ops.hpp"

namespace qlink {

// Weight of site y's mass term inside gate (x,x+1): bulk sites are shared by
// two gates (1/2 each), chain ends belong to a single gate.
inline double mass_gate_weight(int y, int length) {
  return (y == 1 || y == length) ? 1.0 : 0.5;
}

// Gauge-coupled two-site Hamiltonian h_{x,x+1} on the unreduced pair space:
// hopping J (psi^dag_x U_{x,x+1} psi_{x+1} + h.c.), abelian electric energy,
// non-abelian electric energy (U2), and the apportioned staggered mass.
// x is the 1-based left vertex, 1 <= x <= L-1.
inline TwoSiteOp build_two_site_hamiltonian(const LocalOperatorSet& ops, int x) {
  const GaugeModelSpec& spec = ops.spec;
  if (x < 1 || x >= spec.length) throw DimensionError("gate index out of range");

  const int dim = ops.space.dim;
  const bool oddr = ops.rishons_odd();
  TwoSiteOp h = TwoSiteOp::zero(dim, dim);

  const double j = spec.couplings.hopping;
  if (j != 0.0) {
    // gauge-invariant minimal coupling: the matter color contracts with the
    // rishon color of the same vertex,
    // J psi^{a dag}_x c^{b dag}_{x+1,-} c^{a}_{x,+} psi^{b}_{x+1} + h.c.
    for (int a = 0; a < ops.space.colors; ++a)
      for (int b = 0; b < ops.space.colors; ++b) {
        TwoSiteOp hop = pair_product(ops.space, ops.vertex_parity,
                                     {{0, Mat(ops.psi_annihilate[a].adjoint()), true},
                                      {1, Mat(ops.minus_annihilate[b].adjoint()), oddr},
                                      {0, ops.plus_annihilate[a], oddr},
                                      {1, ops.psi_annihilate[b], true}},
                                     cx(j));
        h += hop;
        h += hop.adjoint();
      }
  }

  TwoSiteOp e = ops.link_electric();
  if (spec.group == GaugeGroup::U1) {
    if (spec.couplings.g2_abelian != 0.0) h += cx(spec.couplings.g2_abelian) * (e * e);
  } else {
    if (spec.couplings.g2_abelian != 0.0) h += cx(0.5 * spec.couplings.g2_abelian) * (e * e);
    if (spec.couplings.g2_nonabelian != 0.0) {
      for (int nu = 0; nu < 3; ++nu) {
        TwoSiteOp l = ops.link_L(nu), r = ops.link_R(nu);
        h += cx(0.5 * spec.couplings.g2_nonabelian) * (l * l + r * r);
      }
    }
  }

  const double m = spec.couplings.mass_stag;
  if (m != 0.0) {
    const double sign_l = (x % 2 == 1) ? -1.0 : 1.0;
    const double sign_r = ((x + 1) % 2 == 1) ? -1.0 : 1.0;
    h += TwoSiteOp::left_op(ops.n_psi, dim, cx(m * sign_l * mass_gate_weight(x, spec.length)));
    h += TwoSiteOp::right_op(dim, ops.n_psi, cx(m * sign_r * mass_gate_weight(x + 1, spec.length)));
  }
  return h;
}

}  // namespace qlink
