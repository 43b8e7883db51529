#pragma once

#include <span>
#include <vector>

#include "twopoint/monomial.hpp"
#include "twopoint/types.hpp"

namespace twopoint {

enum class PauliKind { Identity, X, Y, Z };

/// Single-site operators available for spin chains.
enum class SiteOperator { Identity, X, Y, Z, Plus, Minus };

OperatorMatrix pauli(PauliKind kind);

/// Kronecker product of the factors, leftmost factor most significant.
OperatorMatrix kron_chain(std::span<const OperatorMatrix> factors);

/// phase * (f_1 ⊗ f_2 ⊗ ... ⊗ f_n); the first factor acts on the most
/// significant bit of the basis index.
struct PauliString {
  Complex phase{1.0, 0.0};
  std::vector<PauliKind> factors;

  std::size_t n_qubits() const { return factors.size(); }
  std::int64_t dim() const { return std::int64_t{1} << factors.size(); }

  /// True when every matrix entry is real (even number of Y factors and a real phase).
  bool is_real() const;
  PauliString operator*(const PauliString& rhs) const;
  MonomialMap monomial() const;
  OperatorMatrix dense() const;
};

/// N Majorana operators psi_i on 2^{N/2} states with {psi_i, psi_j} = delta_ij.
///
/// Operators are kept as scaled Pauli strings; dense matrices are materialized
/// on request.
class MajoranaSet {
 public:
  explicit MajoranaSet(int n_majorana);

  int n_majorana() const { return n_; }
  std::int64_t dim() const { return std::int64_t{1} << (n_ / 2); }

  /// Unit-normalized string gamma_i (gamma_i^2 = 1); psi_i = gamma_i / sqrt(2).
  const PauliString& gamma(int i) const { return gammas_.at(static_cast<std::size_t>(i)); }
  /// psi_i (0-based) as a dense matrix.
  OperatorMatrix op(int i) const;
  std::vector<OperatorMatrix> ops() const;
  /// psi_i as a monomial map.
  MonomialMap monomial(int i) const;

  /// Fermion parity Gamma = i^{N/2} gamma_1 ... gamma_N (Hermitian, squares to 1).
  PauliString parity() const;

 private:
  int n_;
  std::vector<PauliString> gammas_;
};

/// Throws for odd or non-positive N.
MajoranaSet majorana_set(int n_majorana);

/// Single-site operator at `site` (1-based) on an n_site chain, identity elsewhere.
OperatorMatrix spin_site_operator(SiteOperator kind, int site, int n_site);

}  // namespace twopoint
