#pragma once

#include <Eigen/Eigenvalues>
#include <map>
#include <unordered_map>
#include <vector>

#include "qlink/link_constraint.hpp"

namespace qlink::oracle {

// ---------------------------------------------------------------------------
// Constrained basis enumeration
// ---------------------------------------------------------------------------

struct Enumeration {
  ChainDims dims;
  std::vector<std::vector<int>> configs;  // lexicographic in (j_1, ..., j_L)
  std::unordered_map<long long, int> position;

  int size() const { return static_cast<int>(configs.size()); }
  int find(const std::vector<int>& j) const {
    auto it = position.find(dims.index(j));
    return it == position.end() ? -1 : it->second;
  }
};

// Depth-first enumeration of all reduced product states satisfying every
// interior link constraint, with link-charge pruning.
inline Enumeration enumerate_constrained(const ReducedBasis& basis, int length,
                                         long long guard = 4'000'000) {
  Enumeration e;
  e.dims = ChainDims::make(basis, length);
  std::vector<int> j(length, 0);
  const int nbar = basis.spec.nbar;

  std::function<void(int)> dfs = [&](int x) {
    if (x > length) {
      if (static_cast<long long>(e.configs.size()) >= guard)
        throw DimensionError("enumerate_constrained: size guard exceeded");
      e.position[e.dims.index(j)] = static_cast<int>(e.configs.size());
      e.configs.push_back(j);
      return;
    }
    const VertexBasis& vb = basis.vertex(x);
    for (int jx = 0; jx < vb.d(); ++jx) {
      if (x > 1 && basis.n_plus(x - 1, j[x - 2]) + vb.n_minus(jx) != nbar) continue;
      j[x - 1] = jx;
      dfs(x + 1);
    }
  };
  dfs(1);
  return e;
}

// ---------------------------------------------------------------------------
// Dense Hamiltonian on the constrained span
// ---------------------------------------------------------------------------

// Assembles sum_x h^{[r]}_{x,x+1} restricted to the enumerated basis.
// gates[x-1] is the reduced two-site gate on (x, x+1).
inline Mat dense_hamiltonian(const ReducedBasis& basis, const Enumeration& e,
                             const std::vector<Mat>& gates) {
  const int length = e.dims.sites();
  if (static_cast<int>(gates.size()) != length - 1)
    throw DimensionError("dense_hamiltonian: need one gate per interior link");
  const int n = e.size();
  Mat h = Mat::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    const auto& j = e.configs[col];
    for (int x = 1; x < length; ++x) {
      const int dl = basis.dim(x), dr = basis.dim(x + 1);
      const int in_pair = j[x - 1] * dr + j[x];
      std::vector<int> jp = j;
      for (int a = 0; a < dl; ++a)
        for (int b = 0; b < dr; ++b) {
          const cx amp = gates[x - 1](a * dr + b, in_pair);
          if (std::abs(amp) < 1e-15) continue;
          jp[x - 1] = a;
          jp[x] = b;
          const int row = e.find(jp);
          if (row >= 0) h(row, col) += amp;
        }
      jp[x - 1] = j[x - 1];
      jp[x] = j[x];
    }
  }
  return h;
}

inline std::vector<Mat> reduced_gates(const ReducedBasis& basis, int length) {
  std::vector<Mat> gates;
  for (int x = 1; x < length; ++x) gates.push_back(reduced_gate_hamiltonian(basis, x));
  return gates;
}

// ---------------------------------------------------------------------------
// Exact propagation and ground state (full eigendecomposition)
// ---------------------------------------------------------------------------

inline Vec exact_propagate(const Mat& h, const Vec& psi, double t, bool imaginary) {
  if (!is_hermitian(h, 1e-10)) throw DimensionError("exact_propagate: non-Hermitian H");
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Vec phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    const double lam = es.eigenvalues()(i);
    phases(i) = imaginary ? cx(std::exp(-lam * t), 0.0) : std::exp(cx(0.0, lam * t));
  }
  return es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().adjoint() * psi));
}

inline std::pair<double, Vec> ground_state(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

// Embed a constrained-span vector into the full reduced product space.
inline Vec embed(const Enumeration& e, const Vec& psi) {
  Vec out = Vec::Zero(e.dims.total);
  for (int k = 0; k < e.size(); ++k) out(e.dims.index(e.configs[k])) = psi(k);
  return out;
}

// ---------------------------------------------------------------------------
// Independent first-quantized route
//
// Matrix elements of the gate Hamiltonian computed by symbolic Fock algebra
// on occupation tuples (explicit sign counting), never touching the operator
// matrices. Used as the ground truth for the matrix-built gates.
// ---------------------------------------------------------------------------

namespace fock {

struct PairSpace {
  VertexSpace vertex;
  int n_modes = 0;  // 2 * vertex modes, site 0 first

  int dim_of(int mode) const { return vertex.modes[mode % vertex.n_modes()].dim; }
  bool fermionic(int mode) const { return vertex.modes[mode % vertex.n_modes()].fermionic; }

  std::vector<int> decode(int s0, int s1) const {
    std::vector<int> n(n_modes);
    for (int m = 0; m < vertex.n_modes(); ++m) n[m] = vertex.occupation(s0, m);
    for (int m = 0; m < vertex.n_modes(); ++m) n[vertex.n_modes() + m] = vertex.occupation(s1, m);
    return n;
  }
  long long encode(const std::vector<int>& n) const {
    long long idx = 0;
    for (int m = 0; m < n_modes; ++m) idx = idx * dim_of(m) + n[m];
    return idx;
  }
};

enum class Kind { Create, Annihilate };

struct ElementaryOp {
  int mode;
  Kind kind;
};

// One off-diagonal Hamiltonian term: coeff * op_1 op_2 ... op_k (operator
// order; the rightmost op acts first).
struct Term {
  cx coeff;
  std::vector<ElementaryOp> ops;
};

using State = std::map<long long, cx>;  // pair occupation index -> amplitude

inline void apply_term(const PairSpace& ps, const Term& term, const State& in, State& out) {
  for (const auto& [idx, amp0] : in) {
    std::vector<int> n(ps.n_modes);
    {
      long long rem = idx;
      for (int m = ps.n_modes - 1; m >= 0; --m) {
        n[m] = static_cast<int>(rem % ps.dim_of(m));
        rem /= ps.dim_of(m);
      }
    }
    cx amp = amp0 * term.coeff;
    bool dead = false;
    for (auto it = term.ops.rbegin(); it != term.ops.rend() && !dead; ++it) {
      const int m = it->mode;
      if (ps.fermionic(m)) {
        int string = 0;
        for (int k = 0; k < m; ++k)
          if (ps.fermionic(k)) string += n[k];
        const double sign = (string % 2 == 0) ? 1.0 : -1.0;
        if (it->kind == Kind::Annihilate) {
          if (n[m] == 0) { dead = true; break; }
          n[m] = 0;
          amp *= sign;
        } else {
          if (n[m] == 1) { dead = true; break; }
          n[m] = 1;
          amp *= sign;
        }
      } else {
        if (it->kind == Kind::Annihilate) {
          if (n[m] == 0) { dead = true; break; }
          amp *= std::sqrt(static_cast<double>(n[m]));
          n[m] -= 1;
        } else {
          if (n[m] + 1 >= ps.dim_of(m)) { dead = true; break; }
          amp *= std::sqrt(static_cast<double>(n[m] + 1));
          n[m] += 1;
        }
      }
    }
    if (!dead) out[ps.encode(n)] += amp;
  }
}

// Diagonal gate energy of one pair occupation tuple: abelian electric term,
// non-abelian Casimir term, apportioned staggered mass.
inline double diagonal_energy(const GaugeModelSpec& spec, const PairSpace& ps,
                              const std::vector<int>& n, int x) {
  const VertexSpace& vs = ps.vertex;
  const int off = vs.n_modes();
  auto total = [&](int first, int shift) {
    int t = 0;
    for (int c = 0; c < vs.colors; ++c) t += n[shift + first + c];
    return t;
  };
  const int n_plus_l = total(vs.plus_mode(0), 0);
  const int n_minus_r = total(vs.minus_mode(0), off);
  const int n_psi_l = total(vs.psi_mode(0), 0);
  const int n_psi_r = total(vs.psi_mode(0), off);

  const double e_field = 0.5 * (n_minus_r - n_plus_l);
  double energy = 0.0;
  if (spec.group == GaugeGroup::U1) {
    energy += spec.couplings.g2_abelian * e_field * e_field;
  } else {
    energy += 0.5 * spec.couplings.g2_abelian * e_field * e_field;
    // sum_nu (S^nu)^2 on a two-color fermionic mode group is n-diagonal:
    // 3/4 at single occupation, 0 otherwise.
    auto casimir = [](int occ) { return occ == 1 ? 0.75 : 0.0; };
    energy += 0.5 * spec.couplings.g2_nonabelian * (casimir(n_plus_l) + casimir(n_minus_r));
  }
  const double m = spec.couplings.mass_stag;
  if (m != 0.0) {
    const double sign_l = (x % 2 == 1) ? -1.0 : 1.0;
    const double sign_r = ((x + 1) % 2 == 1) ? -1.0 : 1.0;
    energy += m * sign_l * mass_gate_weight(x, spec.length) * n_psi_l;
    energy += m * sign_r * mass_gate_weight(x + 1, spec.length) * n_psi_r;
  }
  return energy;
}

inline std::vector<Term> hopping_terms(const GaugeModelSpec& spec, const PairSpace& ps) {
  const VertexSpace& vs = ps.vertex;
  const int off = vs.n_modes();
  std::vector<Term> terms;
  const double j = spec.couplings.hopping;
  if (j == 0.0) return terms;
  for (int a = 0; a < vs.colors; ++a)
    for (int b = 0; b < vs.colors; ++b) {
      // J psi^{a dag}_x c^{b dag}_{x+1,-} c^a_{x,+} psi^b_{x+1}
      // (matter color pairs with the same-vertex rishon color)
      Term t;
      t.coeff = cx(j);
      t.ops = {{vs.psi_mode(a), Kind::Create},
               {off + vs.minus_mode(b), Kind::Create},
               {vs.plus_mode(a), Kind::Annihilate},
               {off + vs.psi_mode(b), Kind::Annihilate}};
      terms.push_back(t);
      // Hermitian conjugate, operator order reversed.
      Term tc;
      tc.coeff = cx(j);
      tc.ops = {{off + vs.psi_mode(b), Kind::Create},
                {vs.plus_mode(a), Kind::Create},
                {off + vs.minus_mode(b), Kind::Annihilate},
                {vs.psi_mode(a), Kind::Annihilate}};
      terms.push_back(tc);
    }
  return terms;
}

}  // namespace fock

// Reduced gate matrix elements <j_out j'_out| h_{x,x+1} |j_in j'_in> via the
// Fock route.
inline Mat fock_reduced_gate(const ReducedBasis& basis, int x) {
  const GaugeModelSpec& spec = basis.spec;
  fock::PairSpace ps;
  ps.vertex = basis.ops.space;
  ps.n_modes = 2 * ps.vertex.n_modes();
  const auto terms = fock::hopping_terms(spec, ps);
  const VertexBasis& l = basis.vertex(x);
  const VertexBasis& r = basis.vertex(x + 1);
  const int dl = l.d(), dr = r.d();

  // pair amplitude support of each reduced product state
  auto pair_state = [&](int jl, int jr) {
    fock::State st;
    for (int s0 = 0; s0 < ps.vertex.dim; ++s0) {
      const cx al = l.states[jl].coeff(s0);
      if (std::abs(al) < 1e-14) continue;
      for (int s1 = 0; s1 < ps.vertex.dim; ++s1) {
        const cx ar = r.states[jr].coeff(s1);
        if (std::abs(ar) < 1e-14) continue;
        st[ps.encode(ps.decode(s0, s1))] += al * ar;
      }
    }
    return st;
  };

  std::vector<fock::State> in_states(static_cast<size_t>(dl) * dr);
  for (int jl = 0; jl < dl; ++jl)
    for (int jr = 0; jr < dr; ++jr) in_states[static_cast<size_t>(jl) * dr + jr] = pair_state(jl, jr);

  Mat h = Mat::Zero(static_cast<Eigen::Index>(dl) * dr, static_cast<Eigen::Index>(dl) * dr);
  for (int in = 0; in < dl * dr; ++in) {
    fock::State out_state;
    // diagonal part
    for (const auto& [idx, amp] : in_states[in]) {
      std::vector<int> n(ps.n_modes);
      long long rem = idx;
      for (int m = ps.n_modes - 1; m >= 0; --m) {
        n[m] = static_cast<int>(rem % ps.dim_of(m));
        rem /= ps.dim_of(m);
      }
      out_state[idx] += amp * fock::diagonal_energy(spec, ps, n, x);
    }
    for (const auto& t : terms) fock::apply_term(ps, t, in_states[in], out_state);
    for (int out = 0; out < dl * dr; ++out) {
      cx elem = 0.0;
      for (const auto& [idx, amp] : in_states[out]) {
        auto it = out_state.find(idx);
        if (it != out_state.end()) elem += std::conj(amp) * it->second;
      }
      h(out, in) = elem;
    }
  }
  return h;
}

}  // namespace qlink::oracle
