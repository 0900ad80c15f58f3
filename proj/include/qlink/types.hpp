#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace qlink {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using IMat = Eigen::MatrixXi;
using IVec = Eigen::VectorXi;

// Default tolerance for the structural identities (projectors, isometries,
// commutators). Measured residuals are normally at the 1e-14 level.
inline constexpr double kStructuralTol = 1e-12;

inline double max_abs(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(const Vec& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline bool is_hermitian(const Mat& m, double tol = kStructuralTol) {
  return max_abs(Mat(m - m.adjoint())) <= tol;
}

// Worker cap shared by the few parallel loops (alpha scan, per-sector SVDs).
inline int& max_threads() {
  static int n = 1;
  return n;
}

// Chunked parallel map with deterministic slot writes. Falls back to the
// serial loop for small ranges or when the cap is 1.
inline void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = std::min(max_threads(), n);
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace qlink
