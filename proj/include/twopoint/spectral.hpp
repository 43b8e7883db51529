#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "twopoint/monomial.hpp"
#include "twopoint/types.hpp"

namespace twopoint {

/// Computational-basis states kept by a symmetry sector, in ascending order.
class SectorBasis {
 public:
  SectorBasis(std::int64_t parent_dim, std::vector<std::int64_t> kept_indices, std::string label);

  /// Full space of `parent_dim` states.
  static SectorBasis full(std::int64_t parent_dim);

  std::int64_t parent_dim() const { return parent_dim_; }
  std::int64_t dim() const { return static_cast<std::int64_t>(kept_.size()); }
  const std::vector<std::int64_t>& kept_indices() const { return kept_; }
  const std::string& label() const { return label_; }

  /// Sector position of a parent index, or -1 when not kept.
  std::int64_t position(std::int64_t parent_index) const;

  bool operator==(const SectorBasis& other) const {
    return parent_dim_ == other.parent_dim_ && kept_ == other.kept_;
  }

 private:
  std::int64_t parent_dim_;
  std::vector<std::int64_t> kept_;
  std::vector<std::int64_t> lookup_;
  std::string label_;
};

/// States of an n_site chain with exactly `n_up` up spins (bit 0 = up, site 1
/// is the most significant bit).
SectorBasis magnetization_sector(int n_site, int n_up);
/// S_z = 0 block; throws for odd n_site.
SectorBasis sz_zero_sector(int n_site);

/// Submatrix on the kept indices.
OperatorMatrix project(const OperatorMatrix& op, const SectorBasis& basis);
/// Rectangular block mapping `cols` states into `rows` states.
OperatorMatrix project(const OperatorMatrix& op, const SectorBasis& rows, const SectorBasis& cols);
MonomialMap project(const MonomialMap& op, const SectorBasis& rows, const SectorBasis& cols);

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  /// Orthonormal eigenvectors as columns.
  Eigen::MatrixXcd eigenvectors;
  std::string sector = "full";
  /// True when the input was real symmetric and eigenvectors are real.
  bool real = false;

  std::int64_t dim() const { return eigenvalues.size(); }
  /// Spectral norm of the diagonalized matrix.
  double norm() const;
};

/// Throws Error when `h` is not Hermitian to 1e-10 (relative to max(1, |h|)).
EigenDecomposition diagonalize(const OperatorMatrix& h, std::string sector = "full");

/// Smallest gap between consecutive eigenvalues (infinity for dim < 2).
double min_level_gap(const EigenDecomposition& e);
/// Any consecutive gap below rel_tol * |H|.
bool has_degeneracy(const EigenDecomposition& e, double rel_tol = 1e-10);

struct AllStates {};
struct CentralFraction {
  double fraction = 0.1;
};
using StatePolicy = std::variant<AllStates, CentralFraction>;

/// Eigenstate indices in energy order. CentralFraction(f) keeps
/// floor(dim(1-f)/2) .. floor(dim(1+f)/2) - 1.
std::vector<std::int64_t> select_states(const EigenDecomposition& e, const StatePolicy& policy);

/// sum_k exp(-i E_k t) <v_k|v> v_k
StateVector evolve(const EigenDecomposition& e, double t, const StateVector& v);

/// Rotates eigenvectors inside every cluster of eigenvalues closer than
/// rel_tol*|H| so they diagonalize `parity` (which must commute with H and
/// square to one). Returns the parity eigenvalue (+1/-1) of every state.
std::vector<int> resolve_parity(EigenDecomposition& e, const MonomialMap& parity, double rel_tol = 1e-10);

}  // namespace twopoint
