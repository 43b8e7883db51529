#include "twopoint/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <limits>
#include <string>

#include <lapacke.h>

namespace twopoint {

extern "C" void openblas_set_num_threads(int);

namespace {

// Per-sample parallelism lives in the harness; BLAS stays sequential so that
// results do not depend on thread scheduling.
void pin_blas_threads() {
  static const bool once = [] {
    openblas_set_num_threads(1);
    return true;
  }();
  (void)once;
}

}  // namespace

SectorBasis::SectorBasis(std::int64_t parent_dim, std::vector<std::int64_t> kept_indices, std::string label)
    : parent_dim_(parent_dim), kept_(std::move(kept_indices)), label_(std::move(label)) {
  if (parent_dim <= 0) throw Error("SectorBasis: parent dimension must be positive");
  lookup_.assign(static_cast<std::size_t>(parent_dim), -1);
  for (std::size_t p = 0; p < kept_.size(); ++p) {
    const auto idx = kept_[p];
    if (idx < 0 || idx >= parent_dim) throw Error("SectorBasis: kept index out of range");
    if (p > 0 && kept_[p - 1] >= idx) throw Error("SectorBasis: kept indices must be strictly ascending");
    lookup_[static_cast<std::size_t>(idx)] = static_cast<std::int64_t>(p);
  }
}

SectorBasis SectorBasis::full(std::int64_t parent_dim) {
  std::vector<std::int64_t> all(static_cast<std::size_t>(parent_dim));
  for (std::int64_t i = 0; i < parent_dim; ++i) all[static_cast<std::size_t>(i)] = i;
  return SectorBasis(parent_dim, std::move(all), "full");
}

std::int64_t SectorBasis::position(std::int64_t parent_index) const {
  if (parent_index < 0 || parent_index >= parent_dim_) return -1;
  return lookup_[static_cast<std::size_t>(parent_index)];
}

SectorBasis magnetization_sector(int n_site, int n_up) {
  if (n_site < 1 || n_site > 30) throw Error("magnetization_sector: unsupported chain length");
  if (n_up < 0 || n_up > n_site) throw Error("magnetization_sector: n_up out of range");
  const std::int64_t parent = std::int64_t{1} << n_site;
  std::vector<std::int64_t> kept;
  for (std::int64_t s = 0; s < parent; ++s) {
    // bit set = down spin
    if (n_site - std::popcount(static_cast<std::uint64_t>(s)) == n_up) kept.push_back(s);
  }
  const int two_sz = 2 * n_up - n_site;
  return SectorBasis(parent, std::move(kept), "2Sz=" + std::to_string(two_sz));
}

SectorBasis sz_zero_sector(int n_site) {
  if (n_site % 2 != 0) {
    throw Error("sz_zero_sector: odd chain length " + std::to_string(n_site) + " has no S_z=0 sector");
  }
  return magnetization_sector(n_site, n_site / 2);
}

OperatorMatrix project(const OperatorMatrix& op, const SectorBasis& rows, const SectorBasis& cols) {
  if (op.rows() != rows.parent_dim() || op.cols() != cols.parent_dim()) {
    throw Error("project: operator shape does not match sector parent dimensions");
  }
  OperatorMatrix out(rows.dim(), cols.dim());
  for (std::int64_t c = 0; c < cols.dim(); ++c) {
    const auto pc = cols.kept_indices()[static_cast<std::size_t>(c)];
    for (std::int64_t r = 0; r < rows.dim(); ++r) {
      out(r, c) = op(rows.kept_indices()[static_cast<std::size_t>(r)], pc);
    }
  }
  return out;
}

OperatorMatrix project(const OperatorMatrix& op, const SectorBasis& basis) { return project(op, basis, basis); }

MonomialMap project(const MonomialMap& op, const SectorBasis& rows, const SectorBasis& cols) {
  if (op.rows() != rows.parent_dim() || op.cols() != cols.parent_dim()) {
    throw Error("project: operator shape does not match sector parent dimensions");
  }
  MonomialMap out(rows.dim(), cols.dim());
  for (std::int64_t c = 0; c < cols.dim(); ++c) {
    const auto target = op.target(cols.kept_indices()[static_cast<std::size_t>(c)]);
    if (target == MonomialMap::kNone) continue;
    const auto r = rows.position(target);
    if (r >= 0) out.set(c, r, op.value(cols.kept_indices()[static_cast<std::size_t>(c)]));
  }
  return out;
}

double EigenDecomposition::norm() const {
  if (eigenvalues.size() == 0) return 0.0;
  return std::max(std::abs(eigenvalues(0)), std::abs(eigenvalues(eigenvalues.size() - 1)));
}

EigenDecomposition diagonalize(const OperatorMatrix& h, std::string sector) {
  pin_blas_threads();
  if (h.rows() != h.cols()) throw Error("diagonalize: matrix is not square");
  const auto n = static_cast<lapack_int>(h.rows());
  const double scale = std::max(1.0, max_abs(h));
  if (!h.allFinite()) throw NumericalError("diagonalize: matrix has non-finite entries");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error("diagonalize: matrix is not Hermitian");
  }
  EigenDecomposition e;
  e.sector = std::move(sector);
  e.eigenvalues.resize(n);
  if (n == 0) return e;
  const bool real = (h.imag().array() == 0.0).all();
  e.real = real;
  lapack_int info = 0;
  if (real) {
    Eigen::MatrixXd a = h.real();
    info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, e.eigenvalues.data());
    e.eigenvectors = a.cast<Complex>();
  } else {
    e.eigenvectors = h;
    info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                          reinterpret_cast<lapack_complex_double*>(e.eigenvectors.data()), n,
                          e.eigenvalues.data());
  }
  if (info != 0) throw NumericalError("diagonalize: LAPACK eigensolver failed with info=" + std::to_string(info));
  return e;
}

double min_level_gap(const EigenDecomposition& e) {
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k + 1 < e.eigenvalues.size(); ++k) {
    gap = std::min(gap, e.eigenvalues(k + 1) - e.eigenvalues(k));
  }
  return gap;
}

bool has_degeneracy(const EigenDecomposition& e, double rel_tol) {
  return min_level_gap(e) < rel_tol * e.norm();
}

std::vector<std::int64_t> select_states(const EigenDecomposition& e, const StatePolicy& policy) {
  const std::int64_t dim = e.dim();
  std::int64_t lo = 0;
  std::int64_t hi = dim;
  if (const auto* c = std::get_if<CentralFraction>(&policy)) {
    const double f = c->fraction;
    if (!(f > 0.0 && f <= 1.0)) throw Error("select_states: fraction must lie in (0, 1]");
    // The guard keeps exact products such as 100*0.9/2 from landing just below an integer.
    constexpr double guard = 1e-9;
    lo = static_cast<std::int64_t>(std::floor(static_cast<double>(dim) * (1.0 - f) / 2.0 + guard));
    hi = static_cast<std::int64_t>(std::floor(static_cast<double>(dim) * (1.0 + f) / 2.0 + guard));
    hi = std::min(hi, dim);
  }
  std::vector<std::int64_t> out;
  for (std::int64_t k = lo; k < hi; ++k) out.push_back(k);
  return out;
}

StateVector evolve(const EigenDecomposition& e, double t, const StateVector& v) {
  if (v.size() != e.dim()) throw Error("evolve: state dimension does not match the decomposition");
  Eigen::VectorXcd coeff = e.eigenvectors.adjoint() * v;
  for (Eigen::Index k = 0; k < coeff.size(); ++k) coeff(k) *= std::polar(1.0, -e.eigenvalues(k) * t);
  return e.eigenvectors * coeff;
}

std::vector<int> resolve_parity(EigenDecomposition& e, const MonomialMap& parity, double rel_tol) {
  if (parity.rows() != e.dim() || parity.cols() != e.dim()) throw Error("resolve_parity: dimension mismatch");
  const double tol = rel_tol * e.norm();
  std::vector<int> labels(static_cast<std::size_t>(e.dim()), 0);
  Eigen::Index start = 0;
  while (start < e.dim()) {
    Eigen::Index end = start + 1;
    while (end < e.dim() && e.eigenvalues(end) - e.eigenvalues(end - 1) < tol) ++end;
    const Eigen::Index width = end - start;
    Eigen::MatrixXcd block = e.eigenvectors.middleCols(start, width);
    Eigen::MatrixXcd pv = parity.apply(block);
    Eigen::MatrixXcd restricted = block.adjoint() * pv;
    restricted = (0.5 * (restricted + restricted.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> small(restricted);
    e.eigenvectors.middleCols(start, width) = block * small.eigenvectors();
    for (Eigen::Index k = 0; k < width; ++k) {
      const double p = small.eigenvalues()(k);
      if (std::abs(std::abs(p) - 1.0) > 1e-6) {
        throw NumericalError("resolve_parity: eigenstate is not a parity eigenstate (expectation " +
                             std::to_string(p) + ")");
      }
      labels[static_cast<std::size_t>(start + k)] = p > 0.0 ? 1 : -1;
    }
    start = end;
  }
  return labels;
}

}  // namespace twopoint
