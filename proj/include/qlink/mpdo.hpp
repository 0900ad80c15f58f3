#pragma once

#include <Eigen/SVD>
#include <fstream>
#include <random>
#include <vector>

#include "qlink/link_constraint.hpp"

namespace qlink {

// Rank-4 site tensor X^[x] with indices (w_{x-1}, j_x, k_x, w_x):
// left bond, physical reduced, bath, right bond.
struct SiteTensor {
  int ml = 1, d = 1, b = 1, mr = 1;
  std::vector<cx> data;

  static SiteTensor zeros(int ml, int d, int b, int mr) {
    SiteTensor t;
    t.ml = ml;
    t.d = d;
    t.b = b;
    t.mr = mr;
    t.data.assign(static_cast<size_t>(ml) * d * b * mr, cx(0.0));
    return t;
  }
  size_t idx(int wl, int j, int k, int wr) const {
    return ((static_cast<size_t>(wl) * d + j) * b + k) * mr + wr;
  }
  cx& at(int wl, int j, int k, int wr) { return data[idx(wl, j, k, wr)]; }
  const cx& at(int wl, int j, int k, int wr) const { return data[idx(wl, j, k, wr)]; }
};

// Matrix product density operator rho = X X^dag. Bonds may carry charge
// labels (the link charge q of the cut), which the block-sparse kernels rely
// on; a state produced by unlabeled dense SVDs has untracked bonds.
struct MpdoState {
  const ReducedBasis* basis = nullptr;
  int length = 0;
  std::vector<SiteTensor> site;                // [x-1]
  std::vector<std::vector<int>> bond_charge;   // [x-1]: labels of bond (x, x+1); empty = untracked
  double log_norm = 0.0;                       // accumulated renormalization log
  double discarded_weight = 0.0;               // cumulative relative discarded weight

  bool labeled() const {
    for (const auto& q : bond_charge)
      if (q.empty()) return false;
    return true;
  }
  int bond_dim(int x) const { return site[x - 1].mr; }  // bond (x, x+1)
  int max_bond() const {
    int m = 1;
    for (int x = 1; x < length; ++x) m = std::max(m, bond_dim(x));
    return m;
  }

  // ---- constructors ----

  static MpdoState product_state(const ReducedBasis& basis, const std::vector<int>& config) {
    const int length = static_cast<int>(config.size());
    MpdoState s;
    s.basis = &basis;
    s.length = length;
    for (int x = 1; x < length; ++x)
      if (basis.n_plus(x, config[x - 1]) + basis.n_minus(x + 1, config[x]) != basis.spec.nbar)
        throw ModelError("product_state: configuration violates a link constraint");
    for (int x = 1; x <= length; ++x) {
      SiteTensor t = SiteTensor::zeros(1, basis.dim(x), 1, 1);
      t.at(0, config[x - 1], 0, 0) = 1.0;
      s.site.push_back(std::move(t));
      if (x < length) s.bond_charge.push_back({basis.n_plus(x, config[x - 1])});
    }
    return s;
  }

  // Qbar_r applied to the uniform product state: bond dimension nbar+1 with
  // one index per charge, X^[x](q, j, q') = Z(q,j) V(j,q') / sqrt(d).
  static MpdoState projected_uniform(const ReducedBasis& basis, int length) {
    const int nbar = basis.spec.nbar;
    const int m = nbar + 1;
    MpdoState s;
    s.basis = &basis;
    s.length = length;
    for (int x = 1; x <= length; ++x) {
      const VertexBasis& vb = basis.vertex(x);
      const int ml = (x == 1) ? 1 : m;
      const int mr = (x == length) ? 1 : m;
      SiteTensor t = SiteTensor::zeros(ml, vb.d(), 1, mr);
      const double w = 1.0 / std::sqrt(static_cast<double>(vb.d()));
      for (int wl = 0; wl < ml; ++wl)
        for (int j = 0; j < vb.d(); ++j)
          for (int wr = 0; wr < mr; ++wr) {
            const int zok = (x == 1) ? 1 : (nbar - wl == vb.n_minus(j) ? 1 : 0);
            const int vok = (x == length) ? 1 : (vb.n_plus(j) == wr ? 1 : 0);
            if (zok && vok) t.at(wl, j, 0, wr) = w;
          }
      s.site.push_back(std::move(t));
      if (x < length) {
        std::vector<int> labels(m);
        for (int q = 0; q < m; ++q) labels[q] = q;
        s.bond_charge.push_back(std::move(labels));
      }
    }
    s.normalize();
    return s;
  }

  // Random constrained state with target bond dimension and bath dimension:
  // bond indices are distributed over the charges admissible on each cut and
  // entries are Gaussian wherever the charge labels allow.
  static MpdoState random_constrained(const ReducedBasis& basis, int length, int m_target,
                                      int bath, std::mt19937_64& rng) {
    const int nbar = basis.spec.nbar;
    MpdoState s;
    s.basis = &basis;
    s.length = length;
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<std::vector<int>> labels(length - 1);
    for (int x = 1; x < length; ++x) {
      std::vector<int> valid;
      for (int q = 0; q <= nbar; ++q) {
        bool left_ok = false, right_ok = false;
        for (int j = 0; j < basis.dim(x); ++j) left_ok |= (basis.n_plus(x, j) == q);
        for (int j = 0; j < basis.dim(x + 1); ++j)
          right_ok |= (basis.n_minus(x + 1, j) == nbar - q);
        if (left_ok && right_ok) valid.push_back(q);
      }
      for (int w = 0; w < m_target; ++w)
        labels[x - 1].push_back(valid[w % valid.size()]);
    }

    for (int x = 1; x <= length; ++x) {
      const VertexBasis& vb = basis.vertex(x);
      const int ml = (x == 1) ? 1 : static_cast<int>(labels[x - 2].size());
      const int mr = (x == length) ? 1 : static_cast<int>(labels[x - 1].size());
      SiteTensor t = SiteTensor::zeros(ml, vb.d(), bath, mr);
      for (int wl = 0; wl < ml; ++wl)
        for (int j = 0; j < vb.d(); ++j) {
          if (x > 1 && nbar - labels[x - 2][wl] != vb.n_minus(j)) continue;
          for (int k = 0; k < bath; ++k)
            for (int wr = 0; wr < mr; ++wr) {
              if (x < length && labels[x - 1][wr] != vb.n_plus(j)) continue;
              t.at(wl, j, k, wr) = cx(gauss(rng), gauss(rng));
            }
        }
      s.site.push_back(std::move(t));
    }
    s.bond_charge = std::move(labels);
    s.normalize();
    return s;
  }

  // Unlabeled MPDO (b = 1) from a dense vector over the reduced product basis.
  static MpdoState from_dense(const ReducedBasis& basis, int length, const Vec& psi,
                              double tol = 1e-13) {
    ChainDims cd = ChainDims::make(basis, length);
    if (psi.size() != cd.total) throw DimensionError("from_dense: dimension mismatch");
    MpdoState s;
    s.basis = &basis;
    s.length = length;
    s.bond_charge.assign(length - 1, {});
    Mat rest = Mat::Zero(1, psi.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i) rest(0, i) = psi(i);
    int ml = 1;
    for (int x = 1; x < length; ++x) {
      const int d = cd.dims[x - 1];
      long long right_dim = rest.cols() / d;
      Mat m(static_cast<Eigen::Index>(ml) * d, right_dim);
      for (int wl = 0; wl < ml; ++wl)
        for (int j = 0; j < d; ++j)
          for (long long r = 0; r < right_dim; ++r)
            m(static_cast<Eigen::Index>(wl) * d + j, r) =
                rest(wl, static_cast<Eigen::Index>(j) * right_dim + r);
      Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const auto& sv = svd.singularValues();
      int rank = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * sv(0)) ++rank;
      rank = std::max(rank, 1);
      SiteTensor t = SiteTensor::zeros(ml, d, 1, rank);
      for (int wl = 0; wl < ml; ++wl)
        for (int j = 0; j < d; ++j)
          for (int w = 0; w < rank; ++w)
            t.at(wl, j, 0, w) = svd.matrixU()(static_cast<Eigen::Index>(wl) * d + j, w);
      s.site.push_back(std::move(t));
      rest = Mat(sv.head(rank).asDiagonal()) * svd.matrixV().leftCols(rank).adjoint();
      ml = rank;
    }
    const int d = cd.dims[length - 1];
    SiteTensor t = SiteTensor::zeros(ml, d, 1, 1);
    for (int wl = 0; wl < ml; ++wl)
      for (int j = 0; j < d; ++j) t.at(wl, j, 0, 0) = rest(wl, j);
    s.site.push_back(std::move(t));
    return s;
  }

  // ---- contractions ----

  // Transfer vector over (w, w_bar) pairs, row-major w * m_bar + w_bar.
  static std::vector<cx> transfer_start() { return {cx(1.0)}; }

  std::vector<cx> transfer_step(const std::vector<cx>& v, int x, const Mat* op) const {
    const SiteTensor& t = site[x - 1];
    std::vector<cx> out(static_cast<size_t>(t.mr) * t.mr, cx(0.0));
    for (int wl = 0; wl < t.ml; ++wl)
      for (int wb = 0; wb < t.ml; ++wb) {
        const cx vin = v[static_cast<size_t>(wl) * t.ml + wb];
        if (vin == cx(0.0)) continue;
        for (int ja = 0; ja < t.d; ++ja)
          for (int jb = 0; jb < t.d; ++jb) {
            const cx w = op ? (*op)(jb, ja) : (ja == jb ? cx(1.0) : cx(0.0));
            if (w == cx(0.0)) continue;
            for (int k = 0; k < t.b; ++k)
              for (int wr = 0; wr < t.mr; ++wr) {
                const cx xl = t.at(wl, ja, k, wr);
                if (xl == cx(0.0)) continue;
                for (int wbr = 0; wbr < t.mr; ++wbr)
                  out[static_cast<size_t>(wr) * t.mr + wbr] +=
                      vin * w * xl * std::conj(t.at(wb, jb, k, wbr));
              }
          }
      }
    return out;
  }

  double norm_squared() const {
    std::vector<cx> v = transfer_start();
    for (int x = 1; x <= length; ++x) v = transfer_step(v, x, nullptr);
    return v[0].real();
  }

  void scale(cx factor) {
    for (auto& c : site[0].data) c *= factor;
  }

  double normalize() {
    const double n = std::sqrt(norm_squared());
    if (n == 0.0) throw KernelError("normalize: state has zero norm");
    scale(cx(1.0 / n));
    log_norm += std::log(n);
    return n;
  }

  // Tr(rho O_x) / Tr(rho) for a reduced single-site operator.
  cx expectation_site(int x0, const Mat& op) const {
    std::vector<cx> v = transfer_start();
    for (int x = 1; x <= length; ++x) v = transfer_step(v, x, x == x0 ? &op : nullptr);
    std::vector<cx> n = transfer_start();
    for (int x = 1; x <= length; ++x) n = transfer_step(n, x, nullptr);
    return v[0] / n[0];
  }

  // Tr(rho O_{x,x+1}) / Tr(rho) for a reduced two-site operator
  // ((d_x d_{x+1})^2, row = output pair).
  cx expectation_link(int x0, const Mat& op) const {
    const SiteTensor& a = site[x0 - 1];
    const SiteTensor& c = site[x0];
    std::vector<cx> v = transfer_start();
    for (int x = 1; x < x0; ++x) v = transfer_step(v, x, nullptr);
    // two-site step
    std::vector<cx> out(static_cast<size_t>(c.mr) * c.mr, cx(0.0));
    const int dr = c.d;
    for (int wl = 0; wl < a.ml; ++wl)
      for (int wb = 0; wb < a.ml; ++wb) {
        const cx vin = v[static_cast<size_t>(wl) * a.ml + wb];
        if (vin == cx(0.0)) continue;
        for (int j1a = 0; j1a < a.d; ++j1a)
          for (int j2a = 0; j2a < c.d; ++j2a)
            for (int j1b = 0; j1b < a.d; ++j1b)
              for (int j2b = 0; j2b < c.d; ++j2b) {
                const cx w = op(j1b * dr + j2b, j1a * dr + j2a);
                if (w == cx(0.0)) continue;
                for (int k1 = 0; k1 < a.b; ++k1)
                  for (int k2 = 0; k2 < c.b; ++k2)
                    for (int wm = 0; wm < a.mr; ++wm)
                      for (int wmb = 0; wmb < a.mr; ++wmb) {
                        const cx left = a.at(wl, j1a, k1, wm) * std::conj(a.at(wb, j1b, k1, wmb));
                        if (left == cx(0.0)) continue;
                        for (int wr = 0; wr < c.mr; ++wr)
                          for (int wbr = 0; wbr < c.mr; ++wbr)
                            out[static_cast<size_t>(wr) * c.mr + wbr] +=
                                vin * w * left * c.at(wm, j2a, k2, wr) *
                                std::conj(c.at(wmb, j2b, k2, wbr));
                      }
              }
      }
    std::vector<cx> vv = out;
    for (int x = x0 + 2; x <= length; ++x) vv = transfer_step(vv, x, nullptr);
    std::vector<cx> n = transfer_start();
    for (int x = 1; x <= length; ++x) n = transfer_step(n, x, nullptr);
    return vv[0] / n[0];
  }

  // <Qbar_r> = Tr(rho Qbar_r)/Tr(rho), contracted through the F-core MPO.
  double qbar_expectation(const LinkMpo& mpo) const {
    // transfer over (w, w_bar, q)
    const int m0 = mpo.cores[0].m_prev;  // = 1
    std::vector<cx> v(static_cast<size_t>(m0), cx(1.0));
    int mw = 1, mq = m0;
    for (int x = 1; x <= length; ++x) {
      const SiteTensor& t = site[x - 1];
      const LinkMpo::Core& f = mpo.cores[x - 1];
      std::vector<cx> out(static_cast<size_t>(t.mr) * t.mr * f.m_next, cx(0.0));
      for (int wl = 0; wl < t.ml; ++wl)
        for (int wb = 0; wb < t.ml; ++wb)
          for (int qp = 0; qp < f.m_prev; ++qp) {
            const cx vin = v[(static_cast<size_t>(wl) * mw + wb) * mq + qp];
            if (vin == cx(0.0)) continue;
            for (int j = 0; j < t.d; ++j)
              for (int qn = 0; qn < f.m_next; ++qn) {
                if (!f.at(qp, qn, j)) continue;
                for (int k = 0; k < t.b; ++k)
                  for (int wr = 0; wr < t.mr; ++wr) {
                    const cx xl = t.at(wl, j, k, wr);
                    if (xl == cx(0.0)) continue;
                    for (int wbr = 0; wbr < t.mr; ++wbr)
                      out[(static_cast<size_t>(wr) * t.mr + wbr) * f.m_next + qn] +=
                          vin * xl * std::conj(t.at(wb, j, k, wbr));
                  }
              }
          }
      v.swap(out);
      mw = t.mr;
      mq = f.m_next;
    }
    cx total = 0.0;
    for (const cx& c : v) total += c;
    return total.real() / norm_squared();
  }

  double leakage(const LinkMpo& mpo) const { return 1.0 - qbar_expectation(mpo); }

  // Dense vector over composite (j, k) site indices; mostly for tests (b=1).
  Vec to_vector() const {
    std::vector<cx> acc = {cx(1.0)};
    long long dim = 1;
    for (int x = 1; x <= length; ++x) {
      const SiteTensor& t = site[x - 1];
      const long long db = static_cast<long long>(t.d) * t.b;
      std::vector<cx> next(static_cast<size_t>(dim) * db * t.mr, cx(0.0));
      for (long long p = 0; p < dim; ++p)
        for (int wl = 0; wl < t.ml; ++wl) {
          const cx a = acc[static_cast<size_t>(p) * t.ml + wl];
          if (a == cx(0.0)) continue;
          for (int j = 0; j < t.d; ++j)
            for (int k = 0; k < t.b; ++k)
              for (int wr = 0; wr < t.mr; ++wr)
                next[(static_cast<size_t>(p) * db + (static_cast<long long>(j) * t.b + k)) * t.mr +
                     wr] += a * t.at(wl, j, k, wr);
        }
      acc.swap(next);
      dim *= db;
    }
    Vec out(dim);
    for (long long i = 0; i < dim; ++i) out(i) = acc[i];
    return out;
  }
};

// ---------------------------------------------------------------------------
// Checkpoint format (binary, little-endian):
//   magic "QLNKMPD1", u32 version, u32 L, u8 labeled, f64 log_norm,
//   f64 discarded_weight, then per site: u32 ml,d,b,mr and ml*d*b*mr complex
//   entries as (f64 re, f64 im) in index order ((wl*d+j)*b+k)*mr+wr, then per
//   bond: u32 n, i32 labels[n] (n = 0 for untracked bonds).
// ---------------------------------------------------------------------------

inline void save_checkpoint(const MpdoState& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint for writing: " + path);
  auto w32 = [&](uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
  auto wf64 = [&](double v) { f.write(reinterpret_cast<const char*>(&v), 8); };
  f.write("QLNKMPD1", 8);
  w32(1u);
  w32(static_cast<uint32_t>(s.length));
  const uint8_t lab = s.labeled() ? 1 : 0;
  f.write(reinterpret_cast<const char*>(&lab), 1);
  wf64(s.log_norm);
  wf64(s.discarded_weight);
  for (const auto& t : s.site) {
    w32(t.ml);
    w32(t.d);
    w32(t.b);
    w32(t.mr);
    for (const cx& c : t.data) {
      wf64(c.real());
      wf64(c.imag());
    }
  }
  for (const auto& q : s.bond_charge) {
    w32(static_cast<uint32_t>(q.size()));
    for (int v : q) {
      int32_t vv = v;
      f.write(reinterpret_cast<const char*>(&vv), 4);
    }
  }
  if (!f) throw IoError("checkpoint write failed: " + path);
}

inline MpdoState load_checkpoint(const ReducedBasis& basis, const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint: " + path);
  char magic[8];
  f.read(magic, 8);
  if (std::string(magic, 8) != "QLNKMPD1") throw IoError("bad checkpoint magic");
  auto r32 = [&] {
    uint32_t v;
    f.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  auto rf64 = [&] {
    double v;
    f.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  if (r32() != 1u) throw IoError("unsupported checkpoint version");
  MpdoState s;
  s.basis = &basis;
  s.length = static_cast<int>(r32());
  uint8_t lab;
  f.read(reinterpret_cast<char*>(&lab), 1);
  s.log_norm = rf64();
  s.discarded_weight = rf64();
  for (int x = 0; x < s.length; ++x) {
    const int ml = static_cast<int>(r32()), d = static_cast<int>(r32());
    const int b = static_cast<int>(r32()), mr = static_cast<int>(r32());
    SiteTensor t = SiteTensor::zeros(ml, d, b, mr);
    for (auto& c : t.data) {
      const double re = rf64(), im = rf64();
      c = cx(re, im);
    }
    s.site.push_back(std::move(t));
  }
  for (int x = 0; x + 1 < s.length; ++x) {
    const int n = static_cast<int>(r32());
    std::vector<int> q(n);
    for (int i = 0; i < n; ++i) {
      int32_t v;
      f.read(reinterpret_cast<char*>(&v), 4);
      q[i] = v;
    }
    s.bond_charge.push_back(std::move(q));
  }
  if (!f) throw IoError("checkpoint truncated: " + path);
  return s;
}

}  // namespace qlink
