#pragma once

#include <array>
#include <cassert>
#include <initializer_list>
#include <vector>

#include "qlink/error.hpp"
#include "qlink/model.hpp"
#include "qlink/types.hpp"

namespace qlink {

// ---------------------------------------------------------------------------
// Vertex mode space
//
// A computational vertex groups the left rishon modes, the matter modes and
// the right rishon modes, one mode per color, in that order:
//   (x,-)[color 0..C-1], psi[color 0..C-1], (x,+)[color 0..C-1].
// Mode 0 is the most significant digit of the vertex basis index, and a basis
// state |n_0, n_1, ...> stands for the ordered product
// (c_0^dag)^{n_0} (c_1^dag)^{n_1} ... |vac>, which fixes all fermionic signs.
// ---------------------------------------------------------------------------

struct ModeInfo {
  int dim = 2;
  bool fermionic = true;
};

struct VertexSpace {
  std::vector<ModeInfo> modes;
  int colors = 1;
  int dim = 1;

  int minus_mode(int color) const { return color; }
  int psi_mode(int color) const { return colors + color; }
  int plus_mode(int color) const { return 2 * colors + color; }
  int n_modes() const { return static_cast<int>(modes.size()); }

  int occupation(int state, int mode) const {
    int rem = state;
    for (int m = n_modes() - 1; m > mode; --m) rem /= modes[m].dim;
    return rem % modes[mode].dim;
  }

  static VertexSpace make(const GaugeModelSpec& spec) {
    VertexSpace vs;
    vs.colors = spec.colors();
    const bool ferm = spec.statistics == RishonStatistics::Fermionic;
    const int rishon_dim = ferm ? 2 : spec.nbar + 1;
    for (int c = 0; c < vs.colors; ++c) vs.modes.push_back({rishon_dim, ferm});
    for (int c = 0; c < vs.colors; ++c) vs.modes.push_back({2, true});
    for (int c = 0; c < vs.colors; ++c) vs.modes.push_back({rishon_dim, ferm});
    vs.dim = 1;
    for (const auto& m : vs.modes) vs.dim *= m.dim;
    return vs;
  }
};

namespace detail {

inline Mat boson_annihilator(int dim) {
  Mat a = Mat::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline Mat fermion_annihilator() {
  Mat c = Mat::Zero(2, 2);
  c(0, 1) = 1.0;
  return c;
}

inline Mat number_diagonal(int dim) {
  Mat n = Mat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

inline Mat parity_diagonal(int dim) {
  Mat p = Mat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return p;
}

}  // namespace detail

// Embeds a single-mode matrix into the vertex space. Parity-odd operators
// (creation/annihilation of a fermionic mode) pick up Jordan-Wigner strings
// over every fermionic mode to their left.
inline Mat mode_op(const VertexSpace& vs, int mode, const Mat& local, bool parity_odd) {
  Mat out = Mat::Identity(1, 1);
  for (int m = 0; m < vs.n_modes(); ++m) {
    const int dm = vs.modes[m].dim;
    if (m == mode) {
      out = kron(out, local);
    } else if (m < mode && parity_odd && vs.modes[m].fermionic) {
      out = kron(out, detail::parity_diagonal(dm));
    } else {
      out = kron(out, Mat::Identity(dm, dm));
    }
  }
  return out;
}

// Pauli matrices: the SU(2) generators used for the non-abelian pieces,
// normalized as Tr(lambda^mu lambda^nu) = 2 delta^{mu nu}.
inline std::array<Mat, 3> pauli_matrices() {
  Mat sx = Mat::Zero(2, 2), sy = Mat::Zero(2, 2), sz = Mat::Zero(2, 2);
  sx(0, 1) = 1.0;
  sx(1, 0) = 1.0;
  sy(0, 1) = cx(0.0, -1.0);
  sy(1, 0) = cx(0.0, 1.0);
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  return {sx, sy, sz};
}

// ---------------------------------------------------------------------------
// Two-site operators on a vertex pair, kept in Kronecker-sum form
// sum_k coeff_k (left_k (x) right_k). Jordan-Wigner strings crossing the
// vertex boundary become vertex parity insertions on the left factor.
// ---------------------------------------------------------------------------

struct TwoSiteOp {
  struct Term {
    cx coeff;
    Mat left;
    Mat right;
  };
  int dim_left = 0;
  int dim_right = 0;
  std::vector<Term> terms;

  static TwoSiteOp zero(int dl, int dr) { return {dl, dr, {}}; }

  static TwoSiteOp identity(int dl, int dr) {
    return {dl, dr, {{cx(1.0), Mat::Identity(dl, dl), Mat::Identity(dr, dr)}}};
  }

  static TwoSiteOp left_op(const Mat& a, int dr, cx coeff = cx(1.0)) {
    return {static_cast<int>(a.rows()), dr, {{coeff, a, Mat::Identity(dr, dr)}}};
  }

  static TwoSiteOp right_op(int dl, const Mat& b, cx coeff = cx(1.0)) {
    return {dl, static_cast<int>(b.rows()), {{coeff, Mat::Identity(dl, dl), b}}};
  }

  TwoSiteOp& operator+=(const TwoSiteOp& o) {
    assert(dim_left == o.dim_left && dim_right == o.dim_right);
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    return *this;
  }

  friend TwoSiteOp operator+(TwoSiteOp a, const TwoSiteOp& b) { return a += b; }

  friend TwoSiteOp operator*(cx s, TwoSiteOp a) {
    for (auto& t : a.terms) t.coeff *= s;
    return a;
  }

  friend TwoSiteOp operator*(const TwoSiteOp& a, const TwoSiteOp& b) {
    assert(a.dim_left == b.dim_left && a.dim_right == b.dim_right);
    TwoSiteOp out = zero(a.dim_left, a.dim_right);
    for (const auto& ta : a.terms)
      for (const auto& tb : b.terms)
        out.terms.push_back({ta.coeff * tb.coeff, ta.left * tb.left, ta.right * tb.right});
    return out;
  }

  TwoSiteOp adjoint() const {
    TwoSiteOp out = zero(dim_left, dim_right);
    for (const auto& t : terms)
      out.terms.push_back({std::conj(t.coeff), t.left.adjoint(), t.right.adjoint()});
    return out;
  }

  // Dense pair-space matrix; only sensible for small vertex dimensions.
  Mat dense() const {
    Mat out = Mat::Zero(static_cast<Eigen::Index>(dim_left) * dim_right,
                        static_cast<Eigen::Index>(dim_left) * dim_right);
    for (const auto& t : terms) out += t.coeff * kron(t.left, t.right);
    return out;
  }

  // (A_l (x) A_r) O (A_l (x) A_r)^dag, performed factor by factor so the full
  // pair space is never materialized.
  Mat reduced(const Mat& a_left, const Mat& a_right) const {
    const Eigen::Index dl = a_left.rows(), dr = a_right.rows();
    Mat out = Mat::Zero(dl * dr, dl * dr);
    for (const auto& t : terms) {
      Mat rl = a_left * t.left * a_left.adjoint();
      Mat rr = a_right * t.right * a_right.adjoint();
      out += t.coeff * kron(rl, rr);
    }
    return out;
  }

  // Action on a pair-space vector indexed as s = s_left*dim_right + s_right.
  Vec apply(const Vec& v) const {
    Eigen::Map<const Mat> vm(v.data(), dim_right, dim_left);  // column-major: (s_r, s_l)
    Mat acc = Mat::Zero(dim_right, dim_left);
    for (const auto& t : terms) acc += t.coeff * (t.right * vm * t.left.transpose());
    return Eigen::Map<const Vec>(acc.data(), acc.size());
  }
};

struct PairFactor {
  int site;  // 0 = left vertex, 1 = right vertex
  Mat op;    // vertex-dense operator (internal strings already included)
  bool parity_odd;
};

// Operator product f1 f2 ... fn of elementary vertex operators on a pair,
// evaluated left to right. Each parity-odd factor on the right vertex drags a
// string over the whole left vertex.
inline TwoSiteOp pair_product(const VertexSpace& vs, const Mat& vertex_parity,
                              std::initializer_list<PairFactor> factors, cx coeff = cx(1.0)) {
  Mat left = Mat::Identity(vs.dim, vs.dim);
  Mat right = Mat::Identity(vs.dim, vs.dim);
  for (const auto& f : factors) {
    if (f.site == 0) {
      left = left * f.op;
    } else {
      if (f.parity_odd) left = left * vertex_parity;
      right = right * f.op;
    }
  }
  TwoSiteOp out = TwoSiteOp::zero(vs.dim, vs.dim);
  out.terms.push_back({coeff, left, right});
  return out;
}

// ---------------------------------------------------------------------------
// All microscopic operators of one vertex, plus the link-level bilinears.
// ---------------------------------------------------------------------------

struct LocalOperatorSet {
  GaugeModelSpec spec;
  VertexSpace space;

  // Per color, vertex-dense with internal Jordan-Wigner strings.
  std::vector<Mat> psi_annihilate;
  std::vector<Mat> minus_annihilate;
  std::vector<Mat> plus_annihilate;

  Mat n_psi, n_minus, n_plus, n_total;  // color-summed number operators
  Mat vertex_parity;                    // (-1)^{fermion number of the vertex}

  // SU(2) pieces (U2 only; empty for U1): spin of each mode group and the
  // three Gauss generators G^nu = S^nu_- + S^nu_psi + S^nu_+.
  std::array<Mat, 3> spin_minus, spin_psi, spin_plus, gauge_su2;

  bool nonabelian() const { return spec.group == GaugeGroup::U2; }

  static LocalOperatorSet build(const GaugeModelSpec& spec) {
    spec.validate();
    LocalOperatorSet ops;
    ops.spec = spec;
    ops.space = VertexSpace::make(spec);
    const VertexSpace& vs = ops.space;
    const bool ferm_rishons = spec.statistics == RishonStatistics::Fermionic;

    const Mat rishon_ann = ferm_rishons ? detail::fermion_annihilator()
                                        : detail::boson_annihilator(spec.nbar + 1);
    const Mat psi_ann = detail::fermion_annihilator();

    for (int c = 0; c < vs.colors; ++c) {
      ops.minus_annihilate.push_back(mode_op(vs, vs.minus_mode(c), rishon_ann, ferm_rishons));
      ops.psi_annihilate.push_back(mode_op(vs, vs.psi_mode(c), psi_ann, true));
      ops.plus_annihilate.push_back(mode_op(vs, vs.plus_mode(c), rishon_ann, ferm_rishons));
    }

    auto number_total = [&](int first_mode) {
      Mat n = Mat::Zero(vs.dim, vs.dim);
      for (int c = 0; c < vs.colors; ++c) {
        const int mode = first_mode + c;
        n += mode_op(vs, mode, detail::number_diagonal(vs.modes[mode].dim), false);
      }
      return n;
    };
    ops.n_minus = number_total(vs.minus_mode(0));
    ops.n_psi = number_total(vs.psi_mode(0));
    ops.n_plus = number_total(vs.plus_mode(0));
    ops.n_total = ops.n_minus + ops.n_psi + ops.n_plus;

    ops.vertex_parity = Mat::Identity(vs.dim, vs.dim);
    for (int m = 0; m < vs.n_modes(); ++m) {
      if (vs.modes[m].fermionic)
        ops.vertex_parity = ops.vertex_parity * mode_op(vs, m, detail::parity_diagonal(2), false);
    }

    if (ops.nonabelian()) {
      const auto sigma = pauli_matrices();
      auto group_spin = [&](const std::vector<Mat>& ann, int nu) {
        Mat s = Mat::Zero(vs.dim, vs.dim);
        for (int a = 0; a < vs.colors; ++a)
          for (int b = 0; b < vs.colors; ++b) {
            const cx w = 0.5 * sigma[nu](a, b);
            if (w != cx(0.0)) s += w * (ann[a].adjoint() * ann[b]);
          }
        return s;
      };
      for (int nu = 0; nu < 3; ++nu) {
        ops.spin_minus[nu] = group_spin(ops.minus_annihilate, nu);
        ops.spin_psi[nu] = group_spin(ops.psi_annihilate, nu);
        ops.spin_plus[nu] = group_spin(ops.plus_annihilate, nu);
        ops.gauge_su2[nu] = ops.spin_minus[nu] + ops.spin_psi[nu] + ops.spin_plus[nu];
      }
    }
    return ops;
  }

  bool rishons_odd() const { return spec.statistics == RishonStatistics::Fermionic; }

  // ----- link-level operators on the pair (x, x+1) -----

  // N_{x,x+1} = n_{x,+} + n_{x+1,-}
  TwoSiteOp link_number() const {
    return TwoSiteOp::left_op(n_plus, space.dim) + TwoSiteOp::right_op(space.dim, n_minus);
  }

  // E_{x,x+1} = (n_{x+1,-} - n_{x,+}) / 2
  TwoSiteOp link_electric() const {
    return TwoSiteOp::right_op(space.dim, n_minus, cx(0.5)) +
           TwoSiteOp::left_op(n_plus, space.dim, cx(-0.5));
  }

  // U^{ab}_{x,x+1} = c^{a dag}_{x+1,-} c^{b}_{x,+}
  TwoSiteOp link_u(int a, int b) const {
    const bool odd = rishons_odd();
    return pair_product(space, vertex_parity,
                        {{1, Mat(minus_annihilate[a].adjoint()), odd}, {0, plus_annihilate[b], odd}});
  }

  // Non-abelian electric components on the link: L^nu acts on the + end of x,
  // R^nu on the - end of x+1.
  TwoSiteOp link_L(int nu) const { return TwoSiteOp::left_op(spin_plus[nu], space.dim); }
  TwoSiteOp link_R(int nu) const { return TwoSiteOp::right_op(space.dim, spin_minus[nu]); }
};

}  // namespace qlink
