#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "qlink/hamiltonian.hpp"
#include "qlink/local_ops.hpp"

using namespace qlink;

namespace {
constexpr double EPS = 1e-12;

Mat boson_ann(int dim) { return detail::boson_annihilator(dim); }

// link-mode-space operators (modes (x,+) and (x+1,-) only)
struct LinkModes {
  Mat u, e, n_total;
  int dim;
};

LinkModes u1_link_modes(int nbar) {
  const int d = nbar + 1;
  Mat a = boson_ann(d), id = Mat::Identity(d, d);
  Mat n = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = k;
  LinkModes lm;
  lm.dim = d;
  lm.u = kron(a, a.adjoint());  // c_{x,+} c^dag_{x+1,-}
  lm.e = 0.5 * (kron(id, n) - kron(n, id));
  lm.n_total = kron(n, id) + kron(id, n);
  return lm;
}

}  // namespace

TEST_CASE("mode spaces have the declared dimensions") {
  for (int nbar : {1, 2, 4}) {
    auto ops = LocalOperatorSet::build(GaugeModelSpec::u1(nbar, 2));
    REQUIRE(ops.space.modes[ops.space.minus_mode(0)].dim == nbar + 1);
    REQUIRE(ops.space.modes[ops.space.psi_mode(0)].dim == 2);
    REQUIRE(ops.space.dim == 2 * (nbar + 1) * (nbar + 1));
  }
  auto u1f = LocalOperatorSet::build(
      GaugeModelSpec::u1(1, 2, {}, RishonStatistics::Fermionic));
  REQUIRE(u1f.space.modes[0].dim == 2);
  auto u2 = LocalOperatorSet::build(GaugeModelSpec::u2(1, 2));
  REQUIRE(u2.space.dim == 64);  // six fermionic modes
}

TEST_CASE("fermionic anticommutators and truncated-boson commutators") {
  auto ops = LocalOperatorSet::build(GaugeModelSpec::u2(2, 2));
  const int dim = ops.space.dim;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Mat anti = ops.psi_annihilate[a] * ops.psi_annihilate[b].adjoint() +
                 ops.psi_annihilate[b].adjoint() * ops.psi_annihilate[a];
      Mat expect = (a == b) ? Mat(Mat::Identity(dim, dim)) : Mat(Mat::Zero(dim, dim));
      REQUIRE(max_abs(Mat(anti - expect)) < EPS);
      // rishon modes of different ends anticommute to zero
      Mat cross = ops.minus_annihilate[a] * ops.plus_annihilate[b] +
                  ops.plus_annihilate[b] * ops.minus_annihilate[a];
      REQUIRE(max_abs(cross) < EPS);
    }
  // bosonic-truncated mode: [c, c^dag] = 1 away from the cap
  for (int nbar : {2, 4}) {
    Mat a = boson_ann(nbar + 1);
    Mat comm = a * a.adjoint() - a.adjoint() * a;
    for (int k = 0; k < nbar; ++k) REQUIRE(std::abs(comm(k, k) - 1.0) < EPS);
  }
}

TEST_CASE("Pauli generator algebra") {
  auto sigma = pauli_matrices();
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = 0; nu < 3; ++nu) {
      cx tr = (sigma[mu] * sigma[nu]).trace();
      REQUIRE(std::abs(tr - (mu == nu ? cx(2.0) : cx(0.0))) < EPS);
      Mat comm = sigma[mu] * sigma[nu] - sigma[nu] * sigma[mu];
      Mat expect = Mat::Zero(2, 2);
      for (int om = 0; om < 3; ++om) {
        // f_{mu nu om} = epsilon_{mu nu om}
        const int eps = (mu == nu || nu == om || mu == om)
                            ? 0
                            : (((nu - mu + 3) % 3 == 1) ? 1 : -1);
        if (eps) expect += cx(0.0, 2.0 * eps) * sigma[om];
      }
      REQUIRE(max_abs(Mat(comm - expect)) < EPS);
    }
}

TEST_CASE("U2 gauge generators satisfy the su(2) algebra") {
  auto ops = LocalOperatorSet::build(GaugeModelSpec::u2(1, 2));
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = 0; nu < 3; ++nu) {
      Mat comm = ops.gauge_su2[mu] * ops.gauge_su2[nu] - ops.gauge_su2[nu] * ops.gauge_su2[mu];
      Mat expect = Mat::Zero(ops.space.dim, ops.space.dim);
      for (int om = 0; om < 3; ++om) {
        const int eps =
            (mu == nu || nu == om || mu == om) ? 0 : (((nu - mu + 3) % 3 == 1) ? 1 : -1);
        if (eps) expect += cx(0.0, static_cast<double>(eps)) * ops.gauge_su2[om];
      }
      REQUIRE(max_abs(Mat(comm - expect)) < EPS);
    }
}

TEST_CASE("U1 electric field and ladder algebra on the link space") {
  SECTION("nbar=1: E takes values +-1/2 on the constrained link") {
    LinkModes lm = u1_link_modes(1);
    for (int np = 0; np <= 1; ++np) {
      const long col = np * lm.dim + (1 - np);
      REQUIRE(std::abs(lm.e(col, col).real() - 0.5 * (1 - 2 * np)) < EPS);
      REQUIRE(std::abs(lm.e(col, col).real() * lm.e(col, col).real() - 0.25) < EPS);
    }
  }
  SECTION("general nbar: ladder coefficients, [E,U] = U, [U,Udag] = 2E") {
    for (int nbar : {1, 2, 3, 5, 8}) {
      LinkModes lm = u1_link_modes(nbar);
      Mat comm_eu = lm.e * lm.u - lm.u * lm.e;
      Mat comm_uud = lm.u * lm.u.adjoint() - lm.u.adjoint() * lm.u;
      for (int np = 0; np <= nbar; ++np) {
        const int nm = nbar - np;
        const long col = static_cast<long>(np) * lm.dim + nm;
        for (int np2 = 0; np2 <= nbar; ++np2) {
          const long row = static_cast<long>(np2) * lm.dim + (nbar - np2);
          REQUIRE(std::abs(comm_eu(row, col) - lm.u(row, col)) < EPS);
          REQUIRE(std::abs(comm_uud(row, col) - 2.0 * lm.e(row, col)) < 1e-11);
        }
        // U|N,E> = sqrt(N/2 (N/2+1) - E(E+1)) |N,E+1>
        const double e_val = 0.5 * (nm - np);
        const double coeff =
            std::sqrt(std::max(0.0, 0.5 * nbar * (0.5 * nbar + 1.0) - e_val * (e_val + 1.0)));
        Vec v = Vec::Zero(static_cast<long>(lm.dim) * lm.dim);
        v(col) = 1.0;
        REQUIRE(std::abs((lm.u * v).norm() - coeff) < EPS);
      }
    }
  }
}

TEST_CASE("link charge commutes with gauge generators and gates") {
  for (auto spec : {GaugeModelSpec::u1(1, 4, {1.0, 0.5, 1.0, 0.0}),
                    GaugeModelSpec::u1(2, 4, {0.7, 0.3, 0.9, 0.0}),
                    GaugeModelSpec::u2(1, 4, {1.0, 0.5, 1.0, 0.8}),
                    GaugeModelSpec::u2(2, 4, {1.0, 0.5, 1.0, 0.8})}) {
    auto ops = LocalOperatorSet::build(spec);
    TwoSiteOp n_link = ops.link_number();

    // [N_{x,x+1}, G^nu acting on either end vertex] = 0
    if (ops.nonabelian()) {
      for (int nu = 0; nu < 3; ++nu) {
        TwoSiteOp g_left = TwoSiteOp::left_op(ops.gauge_su2[nu], ops.space.dim);
        TwoSiteOp g_right = TwoSiteOp::right_op(ops.space.dim, ops.gauge_su2[nu]);
        for (const TwoSiteOp& g : {g_left, g_right}) {
          TwoSiteOp comm = n_link * g + cx(-1.0) * (g * n_link);
          // probe on random vectors (the pair space is large for U2)
          std::mt19937_64 rng(11);
          std::normal_distribution<double> gauss;
          for (int rep = 0; rep < 4; ++rep) {
            Vec v(static_cast<long>(ops.space.dim) * ops.space.dim);
            for (long i = 0; i < v.size(); ++i) v(i) = cx(gauss(rng), gauss(rng));
            REQUIRE(comm.apply(v).norm() / v.norm() < EPS);
          }
        }
      }
    }

    // [h_{x,x+1}, N_{x,x+1}] = 0, [h, G_y] = 0 on either vertex, h Hermitian
    std::vector<TwoSiteOp> generators;
    if (ops.nonabelian()) {
      for (int nu = 0; nu < 3; ++nu) {
        generators.push_back(TwoSiteOp::left_op(ops.gauge_su2[nu], ops.space.dim));
        generators.push_back(TwoSiteOp::right_op(ops.space.dim, ops.gauge_su2[nu]));
      }
    }
    generators.push_back(TwoSiteOp::left_op(ops.n_total, ops.space.dim));
    generators.push_back(TwoSiteOp::right_op(ops.space.dim, ops.n_total));
    for (int x = 1; x < spec.length; ++x) {
      TwoSiteOp h = build_two_site_hamiltonian(ops, x);
      TwoSiteOp comm = h * n_link + cx(-1.0) * (n_link * h);
      std::mt19937_64 rng(13 + x);
      std::normal_distribution<double> gauss;
      for (int rep = 0; rep < 4; ++rep) {
        Vec v(static_cast<long>(ops.space.dim) * ops.space.dim);
        for (long i = 0; i < v.size(); ++i) v(i) = cx(gauss(rng), gauss(rng));
        REQUIRE(comm.apply(v).norm() / v.norm() < EPS);
        Vec hv = h.apply(v);
        Vec hdv = h.adjoint().apply(v);
        REQUIRE((hv - hdv).norm() / std::max(1.0, hv.norm()) < EPS);
        for (const TwoSiteOp& g : generators) {
          TwoSiteOp hg = h * g + cx(-1.0) * (g * h);
          REQUIRE(hg.apply(v).norm() / v.norm() < EPS);
        }
      }
    }
  }
}

TEST_CASE("U1 nbar=1 electric gate is diagonal with value 1/4 on the link support") {
  GaugeModelSpec spec = GaugeModelSpec::u1(1, 4, {0.0, 0.0, 1.0, 0.0});
  auto ops = LocalOperatorSet::build(spec);
  Mat h = build_two_site_hamiltonian(ops, 1).dense();
  // diagonal
  Mat off = h;
  off.diagonal().setZero();
  REQUIRE(max_abs(off) < EPS);
  // entries are E^2 = 1/4 wherever the link carries one rishon
  const VertexSpace& vs = ops.space;
  for (int s0 = 0; s0 < vs.dim; ++s0)
    for (int s1 = 0; s1 < vs.dim; ++s1) {
      const int np = vs.occupation(s0, vs.plus_mode(0));
      const int nm = vs.occupation(s1, vs.minus_mode(0));
      if (np + nm != 1) continue;
      REQUIRE(std::abs(h(s0 * vs.dim + s1, s0 * vs.dim + s1).real() - 0.25) < EPS);
    }
}

TEST_CASE("invalid model combinations are rejected") {
  GaugeModelSpec bad = GaugeModelSpec::u2(1, 4);
  bad.statistics = RishonStatistics::BosonicTruncated;
  REQUIRE_THROWS_AS(bad.validate(), ConfigError);

  GaugeModelSpec u1 = GaugeModelSpec::u1(1, 4);
  u1.couplings.g2_nonabelian = 0.3;
  REQUIRE_THROWS_AS(u1.validate(), ConfigError);

  GaugeModelSpec ferm = GaugeModelSpec::u1(1, 4, {}, RishonStatistics::Fermionic);
  ferm.nbar = 3;  // above the 2-per-link fermionic capacity for one color
  REQUIRE_THROWS_AS(ferm.validate(), ConfigError);

  GaugeModelSpec short_chain = GaugeModelSpec::u1(1, 4);
  short_chain.length = 1;
  REQUIRE_THROWS_AS(short_chain.validate(), ConfigError);

  REQUIRE_THROWS_AS(GaugeModelSpec::default_filling(GaugeGroup::U2, 3), ConfigError);
}

TEST_CASE("gate index range") {
  auto ops = LocalOperatorSet::build(GaugeModelSpec::u1(1, 4));
  REQUIRE_THROWS_AS(build_two_site_hamiltonian(ops, 0), DimensionError);
  REQUIRE_THROWS_AS(build_two_site_hamiltonian(ops, 4), DimensionError);
}
