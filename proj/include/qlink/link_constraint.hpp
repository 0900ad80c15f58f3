#pragma once

#include <Eigen/SVD>
#include <cstdint>
#include <vector>

#include "qlink/gauge_reduction.hpp"

namespace qlink {

// Product index over a reduced chain: j_1 is the most significant digit.
struct ChainDims {
  std::vector<int> dims;
  long long total = 1;

  static ChainDims make(const ReducedBasis& basis, int length) {
    ChainDims cd;
    for (int x = 1; x <= length; ++x) {
      cd.dims.push_back(basis.dim(x));
      cd.total *= basis.dim(x);
    }
    return cd;
  }
  int sites() const { return static_cast<int>(dims.size()); }
  long long index(const std::vector<int>& j) const {
    long long idx = 0;
    for (int x = 0; x < sites(); ++x) idx = idx * dims[x] + j[x];
    return idx;
  }
  std::vector<int> digits(long long idx) const {
    std::vector<int> j(sites());
    for (int x = sites() - 1; x >= 0; --x) {
      j[x] = static_cast<int>(idx % dims[x]);
      idx /= dims[x];
    }
    return j;
  }
};

// Admissible triplets (j, j', q) of one link and their charge-sector geometry.
struct ChargeSectorMap {
  struct Triplet {
    int j_left, j_right, q;
  };
  int nbar = 0, dim_left = 0, dim_right = 0, chi = 0;
  std::vector<Triplet> omega;                 // ordered: q asc, then j, then j'
  std::vector<std::vector<int>> sector_left;  // J_l(q) = { j : n_+(x,j) = q }
  std::vector<std::vector<int>> sector_right; // J_r(q) = { j' : n_-(x+1,j') = nbar - q }
  std::vector<int> xi_left, xi_right;         // sector sizes
};

inline ChargeSectorMap charge_sector_map(const ReducedBasis& basis, int x) {
  if (x < 1 || x >= basis.spec.length) throw DimensionError("link index out of range");
  const VertexBasis& l = basis.vertex(x);
  const VertexBasis& r = basis.vertex(x + 1);
  const int nbar = basis.spec.nbar;

  ChargeSectorMap map;
  map.nbar = nbar;
  map.dim_left = l.d();
  map.dim_right = r.d();
  map.sector_left.assign(nbar + 1, {});
  map.sector_right.assign(nbar + 1, {});
  for (int j = 0; j < l.d(); ++j) {
    const int q = l.n_plus(j);
    if (q <= nbar) map.sector_left[q].push_back(j);
  }
  for (int j = 0; j < r.d(); ++j) {
    const int q = nbar - r.n_minus(j);
    if (q >= 0 && q <= nbar) map.sector_right[q].push_back(j);
  }
  for (int q = 0; q <= nbar; ++q) {
    map.xi_left.push_back(static_cast<int>(map.sector_left[q].size()));
    map.xi_right.push_back(static_cast<int>(map.sector_right[q].size()));
    for (int j : map.sector_left[q])
      for (int jp : map.sector_right[q]) map.omega.push_back({j, jp, q});
  }
  map.chi = static_cast<int>(map.omega.size());
  return map;
}

// Link projector in the canonical basis: a diagonal 0/1 matrix with the
// optimal Schmidt split Q = sum_q V_{.,q} (x) Z_{q,.}. Stored as integer
// masks.
struct LinkStructure {
  int x = 1;  // left vertex (1-based)
  int nbar = 0;
  IMat v;       // d_l x (nbar+1),  V[j][q]  = delta(n_+(x,j), q)
  IMat z;       // (nbar+1) x d_r,  Z[q][j'] = delta(nbar - q, n_-(x+1,j'))
  IVec q_diag;  // (d_l * d_r) 0/1 diagonal of Q_{r,x,x+1}
  ChargeSectorMap sectors;

  Mat q_dense() const {
    Mat q = Mat::Zero(q_diag.size(), q_diag.size());
    for (Eigen::Index i = 0; i < q_diag.size(); ++i) q(i, i) = q_diag(i);
    return q;
  }
};

inline LinkStructure build_link_projector(const ReducedBasis& basis, int x) {
  const VertexBasis& l = basis.vertex(x);
  const VertexBasis& r = basis.vertex(x + 1);
  const int nbar = basis.spec.nbar;

  LinkStructure link;
  link.x = x;
  link.nbar = nbar;
  link.v = IMat::Zero(l.d(), nbar + 1);
  link.z = IMat::Zero(nbar + 1, r.d());
  for (int j = 0; j < l.d(); ++j)
    if (l.n_plus(j) <= nbar) link.v(j, l.n_plus(j)) = 1;
  for (int j = 0; j < r.d(); ++j)
    if (r.n_minus(j) <= nbar) link.z(nbar - r.n_minus(j), j) = 1;

  link.q_diag = IVec::Zero(static_cast<Eigen::Index>(l.d()) * r.d());
  for (int j = 0; j < l.d(); ++j)
    for (int jp = 0; jp < r.d(); ++jp) {
      int val = 0;
      for (int q = 0; q <= nbar; ++q) val += link.v(j, q) * link.z(q, jp);
      link.q_diag(static_cast<Eigen::Index>(j) * r.d() + jp) = val;
    }
  link.sectors = charge_sector_map(basis, x);
  return link;
}

// Global link-constraint MPO: per-vertex cores F^{[x] q_{x-1}, q_x}_{j,j} =
// Z^{[x]}_{q_{x-1}, j} V^{[x]}_{j, q_x}, diagonal in j, bondlink nbar+1.
// The dangling boundary charge indices are summed over (open-boundary
// convention), so the contracted chain equals the product of the interior
// link projectors.
struct LinkMpo {
  struct Core {
    int m_prev = 1, m_next = 1, d = 0;
    std::vector<int8_t> f;  // (q_prev * m_next + q_next) * d + j
    int at(int qp, int qn, int j) const { return f[(static_cast<size_t>(qp) * m_next + qn) * d + j]; }
  };
  int nbar = 0;
  int length = 0;
  std::vector<Core> cores;  // cores[x-1] for vertex x

  // Diagonal of the contracted chain over the reduced product basis.
  // Exponential in L; intended for the small-L verification path.
  IVec contracted_diagonal(const ChainDims& cd) const {
    IVec diag(cd.total);
    std::vector<int> j(cd.sites(), 0);
    for (long long idx = 0; idx < cd.total; ++idx) {
      std::vector<long long> t(cores[0].m_next, 0);
      for (int qn = 0; qn < cores[0].m_next; ++qn) t[qn] = cores[0].at(0, qn, j[0]);
      for (int x = 1; x < cd.sites(); ++x) {
        const Core& c = cores[x];
        std::vector<long long> t2(c.m_next, 0);
        for (int qp = 0; qp < c.m_prev; ++qp)
          for (int qn = 0; qn < c.m_next; ++qn) t2[qn] += t[qp] * c.at(qp, qn, j[x]);
        t.swap(t2);
      }
      long long v = 0;
      for (long long u : t) v += u;
      diag(idx) = static_cast<int>(v);
      for (int x = cd.sites() - 1; x >= 0; --x) {
        if (++j[x] < cd.dims[x]) break;
        j[x] = 0;
      }
    }
    return diag;
  }

  // Exact trace of the contracted projector (= constrained dimension).
  long long trace(const ChainDims& cd) const {
    std::vector<long long> t(cores[0].m_next, 0);
    for (int qn = 0; qn < cores[0].m_next; ++qn)
      for (int j = 0; j < cores[0].d; ++j) t[qn] += cores[0].at(0, qn, j);
    for (int x = 1; x < cd.sites(); ++x) {
      const Core& c = cores[x];
      std::vector<long long> t2(c.m_next, 0);
      for (int qp = 0; qp < c.m_prev; ++qp)
        for (int qn = 0; qn < c.m_next; ++qn) {
          long long w = 0;
          for (int j = 0; j < c.d; ++j) w += c.at(qp, qn, j);
          t2[qn] += t[qp] * w;
        }
      t.swap(t2);
    }
    long long tr = 0;
    for (long long u : t) tr += u;
    return tr;
  }
};

inline LinkMpo assemble_global_mpo(const ReducedBasis& basis, int length) {
  LinkMpo mpo;
  mpo.nbar = basis.spec.nbar;
  mpo.length = length;
  const int m = mpo.nbar + 1;
  for (int x = 1; x <= length; ++x) {
    const VertexBasis& vb = basis.vertex(x);
    LinkMpo::Core core;
    core.d = vb.d();
    core.m_prev = (x == 1) ? 1 : m;
    core.m_next = (x == length) ? 1 : m;
    core.f.assign(static_cast<size_t>(core.m_prev) * core.m_next * core.d, 0);
    for (int qp = 0; qp < core.m_prev; ++qp)
      for (int qn = 0; qn < core.m_next; ++qn)
        for (int j = 0; j < core.d; ++j) {
          // summed dangling index: Z (V) collapses to 1 at the left (right) end
          const int zval = (x == 1) ? 1 : (mpo.nbar - qp == vb.n_minus(j) ? 1 : 0);
          const int vval = (x == length) ? 1 : (vb.n_plus(j) == qn ? 1 : 0);
          core.f[(static_cast<size_t>(qp) * core.m_next + qn) * core.d + j] =
              static_cast<int8_t>(zval * vval);
        }
    mpo.cores.push_back(std::move(core));
  }
  return mpo;
}

// Direct product of the interior link masks over the reduced product basis
// (the reference the MPO contraction is checked against).
inline IVec qbar_diagonal_direct(const ReducedBasis& basis, const ChainDims& cd) {
  const int nbar = basis.spec.nbar;
  IVec diag(cd.total);
  std::vector<int> j(cd.sites(), 0);
  for (long long idx = 0; idx < cd.total; ++idx) {
    int ok = 1;
    for (int x = 1; x < cd.sites(); ++x)
      if (basis.n_plus(x, j[x - 1]) + basis.n_minus(x + 1, j[x]) != nbar) ok = 0;
    diag(idx) = ok;
    for (int x = cd.sites() - 1; x >= 0; --x) {
      if (++j[x] < cd.dims[x]) break;
      j[x] = 0;
    }
  }
  return diag;
}

// Operator Schmidt rank of Q_{r,x,x+1} across the link cut.
inline int link_schmidt_rank(const LinkStructure& link, double tol = kRankTol) {
  const int dl = link.sectors.dim_left, dr = link.sectors.dim_right;
  Mat m = Mat::Zero(static_cast<Eigen::Index>(dl) * dl, static_cast<Eigen::Index>(dr) * dr);
  for (int j = 0; j < dl; ++j)
    for (int jp = 0; jp < dr; ++jp)
      m(static_cast<Eigen::Index>(j) * dl + j, static_cast<Eigen::Index>(jp) * dr + jp) =
          static_cast<double>(link.q_diag(static_cast<Eigen::Index>(j) * dr + jp));
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++rank;
  return rank;
}

}  // namespace qlink
