#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "twopoint/monomial.hpp"
#include "twopoint/operators.hpp"
#include "twopoint/spectral.hpp"
#include "twopoint/types.hpp"

namespace twopoint {

enum class ProbeKind { SykMajorana, XxzPlusMinus, XxzZZ };

/// Probe operators for G_ij = <phi| O_i(t) O'_j(0) |phi>.
///
/// `right[j]` maps the state space into the intermediate space that carries
/// the propagation; `left[i]` maps back. For SYK and sigma_z probes both
/// spaces coincide; for sigma+/sigma- probes the intermediate space is the
/// magnetization sector one spin below the state sector.
struct ProbeSet {
  ProbeKind kind = ProbeKind::SykMajorana;
  std::vector<MonomialMap> left;
  std::vector<MonomialMap> right;

  std::size_t size() const { return left.size(); }
};

ProbeSet syk_probes(const MajoranaSet& m);
/// sigma+_i (left) and sigma-_j (right) between `state` and `lowered`, where
/// `lowered` must hold the states with one fewer up spin.
ProbeSet xxz_plus_minus_probes(int n_site, const SectorBasis& state, const SectorBasis& lowered);
ProbeSet xxz_zz_probes(int n_site, const SectorBasis& state);

/// Eigendecompositions that carry the time evolution.
class Dynamics {
 public:
  explicit Dynamics(const EigenDecomposition& both) : state_(&both), intermediate_(&both) {}
  Dynamics(const EigenDecomposition& state, const EigenDecomposition& intermediate)
      : state_(&state), intermediate_(&intermediate) {}

  const EigenDecomposition& state() const { return *state_; }
  const EigenDecomposition& intermediate() const { return *intermediate_; }

 private:
  const EigenDecomposition* state_;
  const EigenDecomposition* intermediate_;
};

struct Eigenstate {
  std::int64_t index = 0;
};
/// Computational-basis product state, one character per site: 'u' or 'd'.
struct ProductState {
  std::string pattern;
};
using ReferenceChoice = std::variant<Eigenstate, ProductState>;

/// Unit-norm reference state in the working space. Product states need the
/// working sector `basis`; a pattern outside it is an error.
StateVector reference_state(const EigenDecomposition& e, const ReferenceChoice& choice,
                            const SectorBasis* basis = nullptr);

struct CorrelationMatrix {
  double t = 0.0;
  std::string state_label;
  Eigen::MatrixXcd entries;
};

/// Singular values below this are clamped and flagged.
inline constexpr double kSingularValueFloor = 1e-150;

struct ExponentRecord {
  double t = 0.0;
  std::string state_label;
  /// ln of the singular values of G, descending.
  std::vector<double> lambdas;
  std::vector<bool> floored;
};

enum class ExponentPolicy { UpperHalf, LowerHalf, All };

/// Correlation matrices for a fixed reference state at any number of times.
///
/// Probe vectors c_i = W^dag O_i^dag |phi(t)> and b_j = W^dag O'_j |phi> are
/// formed once in the intermediate eigenbasis W; each time then costs a
/// diagonal phase and an n x dim by dim x n product. Eigenstates are detected
/// and use a global phase e^{i E t} instead of re-evolving |phi>.
class StateCorrelator {
 public:
  StateCorrelator(const Dynamics& dyn, const ProbeSet& probes, StateVector phi, std::string label = "state");

  CorrelationMatrix at(double t) const;
  bool is_eigenstate() const { return eigen_index_ >= 0; }

 private:
  Dynamics dyn_;
  std::vector<MonomialMap> left_adjoint_;
  std::string label_;
  Eigen::VectorXcd phi_coeffs_;  // phi in the state eigenbasis
  Eigen::MatrixXcd right_bank_;  // intermediate_dim x n
  Eigen::MatrixXcd left_bank_;   // eigenstate case only
  std::int64_t eigen_index_ = -1;
  double energy_ = 0.0;
};

/// Correlation matrices for many eigenstates of the state space at once.
///
/// Banks W^dag O V_S for the selected eigenvectors V_S are computed with one
/// GEMM per probe and reused for every state and time.
class EigenstateCorrelator {
 public:
  EigenstateCorrelator(const Dynamics& dyn, const ProbeSet& probes, std::vector<std::int64_t> states);

  const std::vector<std::int64_t>& states() const { return states_; }
  /// G for the state at position `pos` of states().
  CorrelationMatrix at(std::size_t pos, double t) const;

 private:
  Dynamics dyn_;
  std::vector<std::int64_t> states_;
  std::vector<Eigen::MatrixXcd> right_;  // per state: intermediate_dim x n
  std::vector<Eigen::MatrixXcd> left_;   // empty when left_i^dag == right_i
};

CorrelationMatrix correlation_matrix(const Dynamics& dyn, const ProbeSet& probes, const StateVector& phi, double t);
CorrelationMatrix correlation_matrix(const EigenDecomposition& e, const ProbeSet& probes, const StateVector& phi,
                                     double t);

/// Throws NumericalError for non-finite entries.
ExponentRecord exponent_spectrum(const CorrelationMatrix& g);

/// [begin, end) of the exponents kept by `policy` out of n sorted ones.
std::pair<std::size_t, std::size_t> exponent_range(std::size_t n, ExponentPolicy policy);
std::vector<double> exponent_subset(const ExponentRecord& rec, ExponentPolicy policy);

std::vector<ExponentRecord> correlator_series(const Dynamics& dyn, const ProbeSet& probes, const StateVector& phi,
                                              const std::vector<double>& times);

}  // namespace twopoint
