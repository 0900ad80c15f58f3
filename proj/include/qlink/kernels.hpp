#pragma once

#include <Eigen/SVD>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "qlink/gate.hpp"
#include "qlink/log.hpp"
#include "qlink/mpdo.hpp"

namespace qlink {

// Instrumented operation counts. Contraction/gate counts are complex
// multiply-add operations actually performed; the SVD cost is the standard
// rows*cols*min(rows,cols) model per factorization.
struct OpCounter {
  std::uint64_t contraction_madds = 0;  // X-X contraction
  std::uint64_t gate_madds = 0;         // assembling M into Gamma
  std::uint64_t svd_model_ops = 0;

  OpCounter& operator+=(const OpCounter& o) {
    contraction_madds += o.contraction_madds;
    gate_madds += o.gate_madds;
    svd_model_ops += o.svd_model_ops;
    return *this;
  }
};

struct GateApplyOptions {
  int m_max = 64;
  double svd_tol = 1e-12;         // relative discarded-weight threshold
  double degeneracy_gap = 1e-10;  // cluster resolution at the truncation edge
  enum class Absorb { Left, Right, Split } absorb = Absorb::Split;
};

struct TruncationResult {
  int kept = 0;
  double discarded_weight = 0.0;  // relative
  bool overflow = false;          // m_max forced more truncation than svd_tol
};

namespace detail {

// Global truncation across sectors: keep the m_max largest singular values,
// subject to the relative discarded-weight target and keep-all-or-drop-all
// treatment of degenerate clusters at the edge. Ties break toward lower
// sector, then lower index.
struct SigmaEntry {
  double sigma;
  int sector;
  int index;
};

inline TruncationResult select_singular_values(std::vector<SigmaEntry>& entries,
                                               const GateApplyOptions& opt,
                                               std::vector<int>& kept_per_sector, int n_sectors) {
  std::sort(entries.begin(), entries.end(), [](const SigmaEntry& a, const SigmaEntry& b) {
    if (a.sigma != b.sigma) return a.sigma > b.sigma;
    if (a.sector != b.sector) return a.sector < b.sector;
    return a.index < b.index;
  });
  double total = 0.0;
  for (const auto& e : entries) total += e.sigma * e.sigma;
  if (total == 0.0) throw KernelError("gate application produced a zero state");
  const double smax = entries[0].sigma;

  // roundoff floor
  int n = static_cast<int>(entries.size());
  while (n > 1 && entries[n - 1].sigma < smax * 1e-14) --n;

  // smallest k meeting the discarded-weight target
  int k_tol = n;
  double tail = 0.0;
  for (int i = n - 1; i >= 1; --i) {
    tail += entries[i].sigma * entries[i].sigma;
    if (tail <= opt.svd_tol * total)
      k_tol = i;
    else
      break;
  }
  int k = std::min(k_tol, n);
  TruncationResult res;
  res.overflow = k > opt.m_max;
  k = std::min(k, opt.m_max);

  // degeneracy clusters: never cut between near-equal values
  auto same_cluster = [&](int i) {
    return std::abs(entries[i - 1].sigma - entries[i].sigma) < opt.degeneracy_gap * smax;
  };
  if (k > 0 && k < n && same_cluster(k)) {
    int hi = k;
    while (hi < n && same_cluster(hi)) ++hi;  // extend to cluster end
    if (hi <= opt.m_max) {
      k = hi;
    } else {
      int lo = k;
      while (lo > 1 && same_cluster(lo - 1)) --lo;  // drop the whole cluster
      k = lo - 1;
      if (k == 0) throw KernelError("degenerate cluster does not fit below m_max");
    }
  }

  double disc = 0.0;
  for (int i = k; i < static_cast<int>(entries.size()); ++i) disc += entries[i].sigma * entries[i].sigma;
  res.discarded_weight = disc / total;
  res.kept = k;
  kept_per_sector.assign(n_sectors, 0);
  entries.resize(k);
  for (const auto& e : entries) ++kept_per_sector[e.sector];
  return res;
}

inline void absorb_weights(GateApplyOptions::Absorb mode, double sigma, double& wl, double& wr) {
  switch (mode) {
    case GateApplyOptions::Absorb::Left:
      wl = sigma;
      wr = 1.0;
      break;
    case GateApplyOptions::Absorb::Right:
      wl = 1.0;
      wr = sigma;
      break;
    default:
      wl = wr = std::sqrt(sigma);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dense (reference) kernel: full contraction of X^[x], X^[x+1] and M into
// Gamma, one global SVD, global truncation. Costs d^2 b^2 m^3 + d^4 b^2 m^2
// multiply-adds plus a (bmd)^3-model SVD. Bond labels become untracked.
// ---------------------------------------------------------------------------

inline TruncationResult apply_gate_dense(MpdoState& state, const ProjectedGate& gate,
                                         const GateApplyOptions& opt, OpCounter* counter = nullptr) {
  const int x = gate.x;
  SiteTensor& l = state.site[x - 1];
  SiteTensor& r = state.site[x];
  const int ml = l.ml, dl = l.d, b1 = l.b, mm = l.mr;
  const int dr = r.d, b2 = r.b, mr = r.mr;
  if (r.ml != mm) throw DimensionError("apply_gate_dense: bond mismatch");

  // T(wl,k1,j1p,j2p,k2,wr) = sum_w X[x](wl,j1p,k1,w) X[x+1](w,j2p,k2,wr)
  std::vector<cx> t(static_cast<size_t>(ml) * b1 * dl * dr * b2 * mr, cx(0.0));
  auto tidx = [&](int wl, int k1, int j1, int j2, int k2, int wr) {
    return ((((static_cast<size_t>(wl) * b1 + k1) * dl + j1) * dr + j2) * b2 + k2) * mr + wr;
  };
  for (int wl = 0; wl < ml; ++wl)
    for (int k1 = 0; k1 < b1; ++k1)
      for (int j1 = 0; j1 < dl; ++j1)
        for (int w = 0; w < mm; ++w) {
          const cx xl = l.at(wl, j1, k1, w);
          for (int j2 = 0; j2 < dr; ++j2)
            for (int k2 = 0; k2 < b2; ++k2)
              for (int wr = 0; wr < mr; ++wr)
                t[tidx(wl, k1, j1, j2, k2, wr)] += xl * r.at(w, j2, k2, wr);
        }
  if (counter)
    counter->contraction_madds += static_cast<std::uint64_t>(ml) * b1 * dl * mm * dr * b2 * mr;

  // Gamma = M T over the physical pairs
  std::vector<cx> g(t.size(), cx(0.0));
  for (int j1 = 0; j1 < dl; ++j1)
    for (int j2 = 0; j2 < dr; ++j2)
      for (int p1 = 0; p1 < dl; ++p1)
        for (int p2 = 0; p2 < dr; ++p2) {
          const cx coef = gate.m(j1 * dr + j2, p1 * dr + p2);
          if (counter)
            counter->gate_madds += static_cast<std::uint64_t>(ml) * b1 * b2 * mr;
          if (coef == cx(0.0)) continue;
          for (int wl = 0; wl < ml; ++wl)
            for (int k1 = 0; k1 < b1; ++k1)
              for (int k2 = 0; k2 < b2; ++k2)
                for (int wr = 0; wr < mr; ++wr)
                  g[tidx(wl, k1, j1, j2, k2, wr)] += coef * t[tidx(wl, k1, p1, p2, k2, wr)];
        }

  // reshape to ((wl,k1,j1) x (j2,k2,wr)) and factorize
  const int rows = ml * b1 * dl, cols = dr * b2 * mr;
  Mat gm(rows, cols);
  for (int wl = 0; wl < ml; ++wl)
    for (int k1 = 0; k1 < b1; ++k1)
      for (int j1 = 0; j1 < dl; ++j1)
        for (int j2 = 0; j2 < dr; ++j2)
          for (int k2 = 0; k2 < b2; ++k2)
            for (int wr = 0; wr < mr; ++wr)
              gm((wl * b1 + k1) * dl + j1, (j2 * b2 + k2) * mr + wr) =
                  g[tidx(wl, k1, j1, j2, k2, wr)];
  Eigen::JacobiSVD<Mat> svd(gm, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (counter)
    counter->svd_model_ops +=
        static_cast<std::uint64_t>(rows) * cols * std::min(rows, cols);

  std::vector<detail::SigmaEntry> entries;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    entries.push_back({svd.singularValues()(i), 0, static_cast<int>(i)});
  std::vector<int> kept_per_sector;
  TruncationResult res = detail::select_singular_values(entries, opt, kept_per_sector, 1);
  const int k = res.kept;

  SiteTensor nl = SiteTensor::zeros(ml, dl, b1, k);
  SiteTensor nr = SiteTensor::zeros(k, dr, b2, mr);
  for (int i = 0; i < k; ++i) {
    double wl_s, wr_s;
    detail::absorb_weights(opt.absorb, svd.singularValues()(i), wl_s, wr_s);
    for (int wl = 0; wl < ml; ++wl)
      for (int k1 = 0; k1 < b1; ++k1)
        for (int j1 = 0; j1 < dl; ++j1)
          nl.at(wl, j1, k1, i) = svd.matrixU()((wl * b1 + k1) * dl + j1, i) * wl_s;
    for (int j2 = 0; j2 < dr; ++j2)
      for (int k2 = 0; k2 < b2; ++k2)
        for (int wr = 0; wr < mr; ++wr)
          nr.at(i, j2, k2, wr) = std::conj(svd.matrixV()((j2 * b2 + k2) * mr + wr, i)) * wr_s;
  }
  l = std::move(nl);
  r = std::move(nr);
  state.bond_charge[x - 1].clear();  // dense SVD mixes charge sectors
  state.discarded_weight += res.discarded_weight;
  return res;
}

// ---------------------------------------------------------------------------
// Charge-sector block-sparse kernel. Only admissible physical pairs are
// touched: the X-X contraction runs per middle-bond charge block, Gamma is
// assembled on Omega pairs only, and the SVD factorizes one block per
// intermediate charge q. Costs are bounded by chi b^2 m^3 + chi^2 b^2 m^2
// multiply-adds and a sum-of-blocks SVD model.
// ---------------------------------------------------------------------------

inline TruncationResult apply_gate_blocked(MpdoState& state, const ProjectedGate& gate,
                                           const ChargeSectorMap& sectors,
                                           const GateApplyOptions& opt,
                                           OpCounter* counter = nullptr) {
  const int x = gate.x;
  SiteTensor& l = state.site[x - 1];
  SiteTensor& r = state.site[x];
  const int ml = l.ml, dl = l.d, b1 = l.b, mm = l.mr;
  const int dr = r.d, b2 = r.b, mr = r.mr;
  if (r.ml != mm) throw DimensionError("apply_gate_blocked: bond mismatch");
  const std::vector<int>& qmid = state.bond_charge[x - 1];
  if (static_cast<int>(qmid.size()) != mm)
    throw KernelError("apply_gate_blocked: middle bond has no charge labels");

  const int nq = sectors.nbar + 1;
  std::vector<std::vector<int>> wq(nq);
  for (int w = 0; w < mm; ++w) {
    if (qmid[w] < 0 || qmid[w] >= nq) throw KernelError("apply_gate_blocked: invalid bond label");
    wq[qmid[w]].push_back(w);
  }

  // position of j within its sector
  std::vector<int> pos_left(dl, -1), pos_right(dr, -1);
  for (int q = 0; q < nq; ++q) {
    for (size_t i = 0; i < sectors.sector_left[q].size(); ++i)
      pos_left[sectors.sector_left[q][i]] = static_cast<int>(i);
    for (size_t i = 0; i < sectors.sector_right[q].size(); ++i)
      pos_right[sectors.sector_right[q][i]] = static_cast<int>(i);
  }

  // T_q((wl,k1,a1),(a2,k2,wr)) restricted to the sector's pairs and bond block
  std::vector<std::vector<cx>> tq(nq);
  for (int q = 0; q < nq; ++q) {
    const int xl = sectors.xi_left[q], xr = sectors.xi_right[q];
    if (xl == 0 || xr == 0 || wq[q].empty()) continue;
    tq[q].assign(static_cast<size_t>(ml) * b1 * xl * xr * b2 * mr, cx(0.0));
    for (int a1 = 0; a1 < xl; ++a1) {
      const int j1 = sectors.sector_left[q][a1];
      for (int a2 = 0; a2 < xr; ++a2) {
        const int j2 = sectors.sector_right[q][a2];
        for (int wl = 0; wl < ml; ++wl)
          for (int k1 = 0; k1 < b1; ++k1)
            for (int w : wq[q]) {
              const cx xv = l.at(wl, j1, k1, w);
              if (counter)
                counter->contraction_madds += static_cast<std::uint64_t>(b2) * mr;
              if (xv == cx(0.0)) continue;
              for (int k2 = 0; k2 < b2; ++k2)
                for (int wr = 0; wr < mr; ++wr)
                  tq[q][((((static_cast<size_t>(wl) * b1 + k1) * xl + a1) * xr + a2) * b2 + k2) *
                            mr +
                        wr] += xv * r.at(w, j2, k2, wr);
            }
      }
    }
  }

  // Gamma blocks per output charge q', assembled from all Omega triplets
  std::vector<Mat> gamma(nq);
  std::vector<int> rows_q(nq, 0), cols_q(nq, 0);
  for (int qo = 0; qo < nq; ++qo) {
    const int xl = sectors.xi_left[qo], xr = sectors.xi_right[qo];
    if (xl == 0 || xr == 0) continue;
    rows_q[qo] = ml * b1 * xl;
    cols_q[qo] = xr * b2 * mr;
    gamma[qo] = Mat::Zero(rows_q[qo], cols_q[qo]);
    for (int a1 = 0; a1 < xl; ++a1) {
      const int j1 = sectors.sector_left[qo][a1];
      for (int a2 = 0; a2 < xr; ++a2) {
        const int j2 = sectors.sector_right[qo][a2];
        const int out_pair = j1 * dr + j2;
        for (const auto& tin : sectors.omega) {
          if (counter)
            counter->gate_madds += static_cast<std::uint64_t>(ml) * b1 * b2 * mr;
          if (tq[tin.q].empty()) continue;
          const cx coef = gate.m(out_pair, tin.j_left * dr + tin.j_right);
          if (coef == cx(0.0)) continue;
          const int p1 = pos_left[tin.j_left], p2 = pos_right[tin.j_right];
          const int xli = sectors.xi_left[tin.q], xri = sectors.xi_right[tin.q];
          for (int wl = 0; wl < ml; ++wl)
            for (int k1 = 0; k1 < b1; ++k1)
              for (int k2 = 0; k2 < b2; ++k2)
                for (int wr = 0; wr < mr; ++wr)
                  gamma[qo]((wl * b1 + k1) * xl + a1, (a2 * b2 + k2) * mr + wr) +=
                      coef *
                      tq[tin.q][((((static_cast<size_t>(wl) * b1 + k1) * xli + p1) * xri + p2) *
                                     b2 +
                                 k2) *
                                    mr +
                                wr];
        }
      }
    }
  }

  // independent SVD per block (parallelizable across charge sectors)
  std::vector<Eigen::JacobiSVD<Mat>> svds(nq);
  std::vector<int> active;
  for (int q = 0; q < nq; ++q)
    if (gamma[q].size() > 0) active.push_back(q);
  parallel_for(static_cast<int>(active.size()), [&](int i) {
    const int q = active[i];
    svds[q].compute(gamma[q], Eigen::ComputeThinU | Eigen::ComputeThinV);
  });
  if (counter)
    for (int q : active)
      counter->svd_model_ops += static_cast<std::uint64_t>(rows_q[q]) * cols_q[q] *
                                std::min(rows_q[q], cols_q[q]);

  std::vector<detail::SigmaEntry> entries;
  for (int q : active)
    for (Eigen::Index i = 0; i < svds[q].singularValues().size(); ++i)
      entries.push_back({svds[q].singularValues()(i), q, static_cast<int>(i)});
  std::vector<int> kept_per_sector;
  TruncationResult res = detail::select_singular_values(entries, opt, kept_per_sector, nq);

  std::vector<int> offset(nq, 0);
  int total_kept = 0;
  for (int q = 0; q < nq; ++q) {
    offset[q] = total_kept;
    total_kept += kept_per_sector[q];
  }

  SiteTensor nl = SiteTensor::zeros(ml, dl, b1, total_kept);
  SiteTensor nr = SiteTensor::zeros(total_kept, dr, b2, mr);
  std::vector<int> new_labels(total_kept, 0);
  for (int q = 0; q < nq; ++q) {
    const int xl = sectors.xi_left[q], xr = sectors.xi_right[q];
    for (int i = 0; i < kept_per_sector[q]; ++i) {
      const int wnew = offset[q] + i;
      new_labels[wnew] = q;
      double wl_s, wr_s;
      detail::absorb_weights(opt.absorb, svds[q].singularValues()(i), wl_s, wr_s);
      for (int wl = 0; wl < ml; ++wl)
        for (int k1 = 0; k1 < b1; ++k1)
          for (int a1 = 0; a1 < xl; ++a1)
            nl.at(wl, sectors.sector_left[q][a1], k1, wnew) =
                svds[q].matrixU()((wl * b1 + k1) * xl + a1, i) * wl_s;
      for (int a2 = 0; a2 < xr; ++a2)
        for (int k2 = 0; k2 < b2; ++k2)
          for (int wr = 0; wr < mr; ++wr)
            nr.at(wnew, sectors.sector_right[q][a2], k2, wr) =
                std::conj(svds[q].matrixV()((a2 * b2 + k2) * mr + wr, i)) * wr_s;
    }
  }
  l = std::move(nl);
  r = std::move(nr);
  state.bond_charge[x - 1] = std::move(new_labels);
  state.discarded_weight += res.discarded_weight;
  if (res.overflow)
    log::warn("bond overflow at link " + std::to_string(x) + ": discarded weight " +
              std::to_string(res.discarded_weight));
  return res;
}

}  // namespace qlink
