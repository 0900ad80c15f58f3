#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <algorithm>
#include <cmath>
#include <vector>

#include "qlink/gauge_reduction.hpp"

namespace qlink {

using BigInt = boost::multiprecision::cpp_int;

// Natural log of a positive big integer via its top 63 bits.
inline double log_big(const BigInt& v) {
  if (v <= 0) throw DimensionError("log_big: non-positive argument");
  const unsigned bits = boost::multiprecision::msb(v) + 1;
  if (bits <= 63) return std::log(v.convert_to<double>());
  const unsigned shift = bits - 63;
  const BigInt top = v >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

// Directed graph on link charges whose iterated arrow-sum computes the
// constrained sector dimensions D_q(l). One arrow per reduced state per
// sublattice parity. Node labels are the MPO bond charges: the physical rule
// (source N - n_-, target n_+) composed with the per-link-parity relabeling
// q -> N - q on odd-origin links, which makes the arrow set translation
// invariant for the staggered models and matches the closed-form growth laws.
struct AutomatonGraph {
  struct Arrow {
    int from = 0, to = 0;
    int state = 0;  // reduced state index j the arrow comes from
  };
  int nbar = 0;
  int period = 1;                        // 1 if both parities share one arrow set
  std::vector<Arrow> arrows_odd_site;    // used when appending an odd site
  std::vector<Arrow> arrows_even_site;

  const std::vector<Arrow>& arrows_for_site(int x) const {
    return (x % 2 == 1) ? arrows_odd_site : arrows_even_site;
  }
};

inline AutomatonGraph build_automaton(const ReducedBasis& basis) {
  AutomatonGraph g;
  g.nbar = basis.spec.nbar;
  const int nbar = g.nbar;

  auto arrows_of = [&](const VertexBasis& vb, bool odd_site) {
    std::vector<AutomatonGraph::Arrow> arrows;
    for (int j = 0; j < vb.d(); ++j) {
      const int src_phys = nbar - vb.n_minus(j);
      const int dst_phys = vb.n_plus(j);
      // left link of an odd site has an even origin (identity relabeling);
      // its right link has an odd origin (reversal), and vice versa.
      const int src = odd_site ? src_phys : nbar - src_phys;
      const int dst = odd_site ? nbar - dst_phys : dst_phys;
      arrows.push_back({src, dst, j});
    }
    return arrows;
  };
  g.arrows_odd_site = arrows_of(basis.odd_basis, true);
  g.arrows_even_site = arrows_of(basis.even_basis, false);

  auto key = [](const std::vector<AutomatonGraph::Arrow>& a) {
    std::vector<std::pair<int, int>> k;
    for (const auto& ar : a) k.emplace_back(ar.from, ar.to);
    std::sort(k.begin(), k.end());
    return k;
  };
  g.period = (key(g.arrows_odd_site) == key(g.arrows_even_site)) ? 1 : 2;
  return g;
}

// Exact sector dimensions D_q(l) for l = 0..lmax, seeded with D_q(0) = 1.
struct DimensionTable {
  int nbar = 0;
  std::vector<std::vector<BigInt>> dq;  // [l][q]

  int lmax() const { return static_cast<int>(dq.size()) - 1; }
  BigInt total(int l) const {
    BigInt t = 0;
    for (const auto& v : dq[l]) t += v;
    return t;
  }
};

inline DimensionTable dimension_table(const AutomatonGraph& graph, int lmax) {
  if (lmax < 0) throw DimensionError("dimension_table: lmax must be >= 0");
  DimensionTable table;
  table.nbar = graph.nbar;
  table.dq.reserve(lmax + 1);
  table.dq.emplace_back(graph.nbar + 1, BigInt(1));
  for (int l = 1; l <= lmax; ++l) {
    std::vector<BigInt> next(graph.nbar + 1, BigInt(0));
    for (const auto& a : graph.arrows_for_site(l)) next[a.to] += table.dq[l - 1][a.from];
    table.dq.push_back(std::move(next));
  }
  return table;
}

// Least-squares fit of ln D(l) ~ ln(alpha) * l over [lo, hi].
struct AlphaFit {
  double alpha = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max |ln D - fit| over the window
  int lo = 0, hi = 0;
};

inline AlphaFit fit_alpha(const DimensionTable& table, int lo, int hi) {
  if (lo < 0 || hi > table.lmax() || hi - lo + 1 < 10)
    throw DimensionError("fit_alpha: window must lie in the table and span >= 10 points");
  const int n = hi - lo + 1;
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = log_big(table.total(lo + i));
    if (i > 0 && y[i] <= y[i - 1] && table.total(lo + i) <= table.total(lo + i - 1))
      throw DimensionError("fit_alpha: D(l) is not strictly increasing over the window");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + i;
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  AlphaFit fit;
  fit.lo = lo;
  fit.hi = hi;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.alpha = std::exp(fit.slope);
  for (int i = 0; i < n; ++i)
    fit.residual = std::max(fit.residual, std::abs(y[i] - (fit.intercept + fit.slope * (lo + i))));
  return fit;
}

struct AlphaScanRow {
  int nbar = 0;
  double alpha = 0.0;
  double two_minus_alpha = 0.0;
};

// alpha(N) for a family of U1 models; monotone increasing and < 2 for every
// finite N (checked).
inline std::vector<AlphaScanRow> alpha_saturation_scan(const std::vector<int>& nbars,
                                                       int fit_lo = 100, int fit_hi = 1000) {
  std::vector<AlphaScanRow> rows(nbars.size());
  parallel_for(static_cast<int>(nbars.size()), [&](int i) {
    GaugeModelSpec spec = GaugeModelSpec::u1(nbars[i], 2);
    ReducedBasis basis = ReducedBasis::build(spec);
    AutomatonGraph graph = build_automaton(basis);
    DimensionTable table = dimension_table(graph, fit_hi);
    AlphaFit fit = fit_alpha(table, fit_lo, fit_hi);
    rows[i] = {nbars[i], fit.alpha, 2.0 - fit.alpha};
  });
  for (size_t i = 0; i + 1 < rows.size(); ++i)
    if (!(rows[i + 1].alpha > rows[i].alpha))
      throw ModelError("alpha(N) failed to increase monotonically");
  for (const auto& r : rows)
    if (!(r.alpha < 2.0)) throw ModelError("alpha(N) reached 2 at finite N");
  return rows;
}

}  // namespace qlink
