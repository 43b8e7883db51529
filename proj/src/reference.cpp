#include <cmath>
#include <random>

#include <lapacke.h>

#include "twopoint/rng.hpp"
#include "twopoint/statistics.hpp"
#include "twopoint/types.hpp"

namespace twopoint {
namespace {

// Ratios of consecutive spacings of levels [begin, end) of a sorted spectrum.
void accumulate_ratios(const Eigen::VectorXd& levels, Eigen::Index begin, Eigen::Index end, MeanAccumulator& acc) {
  for (Eigen::Index k = begin; k + 2 < end; ++k) {
    const double s1 = levels(k + 1) - levels(k);
    const double s2 = levels(k + 2) - levels(k + 1);
    const double hi = std::max(s1, s2);
    if (hi > 0.0) acc.add(std::min(s1, s2) / hi);
  }
}

Eigen::VectorXd goe_levels(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) a(r, c) = g(rng);
  }
  Eigen::MatrixXd h = 0.5 * (a + a.transpose());
  Eigen::VectorXd w(n);
  const auto info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, h.data(), n, w.data());
  if (info != 0) throw NumericalError("reference_mean_r: GOE eigensolver failed");
  return w;
}

Eigen::VectorXd gue_levels(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) a(r, c) = Complex(g(rng), g(rng));
  }
  Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
  Eigen::VectorXd w(n);
  const auto info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, reinterpret_cast<lapack_complex_double*>(h.data()),
                                   n, w.data());
  if (info != 0) throw NumericalError("reference_mean_r: GUE eigensolver failed");
  return w;
}

}  // namespace

ReferenceR reference_mean_r(ReferenceKind kind, int matrix_size, int n_samples, std::uint64_t seed) {
  if (matrix_size < 4) throw Error("reference_mean_r: matrix size must be at least 4");
  if (n_samples < 1) throw Error("reference_mean_r: need at least one sample");
  MeanAccumulator acc;
  for (int k = 0; k < n_samples; ++k) {
    Rng rng(sample_seed(seed, static_cast<std::uint64_t>(k)));
    if (kind == ReferenceKind::Poisson) {
      std::exponential_distribution<double> ex(1.0);
      double prev = ex(rng);
      for (int i = 1; i < matrix_size; ++i) {
        const double cur = ex(rng);
        acc.add(std::min(prev, cur) / std::max(prev, cur));
        prev = cur;
      }
      continue;
    }
    const Eigen::VectorXd levels = kind == ReferenceKind::GOE ? goe_levels(matrix_size, rng) : gue_levels(matrix_size, rng);
    accumulate_ratios(levels, matrix_size / 4, matrix_size - matrix_size / 4, acc);
  }
  return ReferenceR{acc.mean(), acc.stderr_of_mean(), acc.count()};
}

}  // namespace twopoint
