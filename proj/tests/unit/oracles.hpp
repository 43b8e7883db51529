#pragma once

// Brute-force reference constructions used as test oracles. They share no
// code with the library: dense Kronecker products, matrix exponentials and
// explicit Heisenberg evolution.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat id2() { return Mat::Identity(2, 2); }
inline Mat sx() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Mat sy() {
  Mat m(2, 2);
  m << 0, cd(0, -1), cd(0, 1), 0;
  return m;
}
inline Mat sz() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
// (sx + i sy)/2 and (sx - i sy)/2
inline Mat splus() { return (sx() + cd(0, 1) * sy()) / 2.0; }
inline Mat sminus() { return (sx() - cd(0, 1) * sy()) / 2.0; }

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat chain(const std::vector<Mat>& factors) {
  Mat out = Mat::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

/// `op` on site (0-based) of an n-site chain.
inline Mat site(const Mat& op, int s, int n) {
  std::vector<Mat> f(static_cast<std::size_t>(n), id2());
  f[static_cast<std::size_t>(s)] = op;
  return chain(f);
}

/// sum_i (1/4) sigma_i . sigma_{i+1} + (w_i/2) sigma^z_i, periodic.
inline Mat xxz(const std::vector<double>& w) {
  const int n = static_cast<int>(w.size());
  const auto dim = Eigen::Index{1} << n;
  Mat h = Mat::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    for (const auto& p : {sx(), sy(), sz()}) h += 0.25 * site(p, i, n) * site(p, j, n);
    h += 0.5 * w[static_cast<std::size_t>(i)] * site(sz(), i, n);
  }
  return h;
}

/// sqrt(6/N^3) sum_{i<j<k<l} J psi psi psi psi + (i/sqrt N) sum_{i<j} K psi psi, couplings in
/// lexicographic order.
inline Mat syk(const std::vector<Mat>& psi, const std::vector<double>& j4, const std::vector<double>& k2) {
  const int n = static_cast<int>(psi.size());
  Mat h = Mat::Zero(psi[0].rows(), psi[0].cols());
  std::size_t q = 0;
  const double scale = std::sqrt(6.0 / (double(n) * n * n));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d) h += scale * j4[q++] * psi[a] * psi[b] * psi[c] * psi[d];
  std::size_t p = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) h += cd(0, 1.0 / std::sqrt(double(n))) * k2[p++] * psi[a] * psi[b];
  return h;
}

inline Mat propagator(const Mat& h, double t) { return (cd(0, -t) * h).exp(); }

/// G_ij = <phi| U^dag O_i U O'_j |phi> with U = exp(-iHt).
inline Mat heisenberg_g(const Mat& h, const std::vector<Mat>& left, const std::vector<Mat>& right, const Vec& phi,
                        double t) {
  const Mat u = propagator(h, t);
  const auto n = static_cast<Eigen::Index>(left.size());
  Mat g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Mat oi_t = u.adjoint() * left[static_cast<std::size_t>(i)] * u;
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = phi.dot(oi_t * right[static_cast<std::size_t>(j)] * phi);
  }
  return g;
}

/// Eigenvalues of G^dag G, descending (squared singular values).
inline std::vector<double> gram_eigenvalues(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g.adjoint() * g);
  std::vector<double> out(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(out.rbegin(), out.rend());
  return out;
}

inline Mat random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cd(g(rng), g(rng));
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ();
}

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace oracle
