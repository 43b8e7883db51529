#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "twopoint/operators.hpp"
#include "twopoint/types.hpp"

namespace twopoint {

class SectorBasis;

/// One disorder realization of the SYK model with quadratic deformation.
struct SykCouplings {
  int n_majorana = 0;
  double k_strength = 0.0;
  /// J_{ijkl} for i<j<k<l in lexicographic order.
  std::vector<double> quartic;
  /// K_{ij} for i<j in lexicographic order.
  std::vector<double> quadratic;
  std::uint64_t seed = 0;

  /// Position of (i,j,k,l), 0-based and strictly increasing, in `quartic`.
  static std::size_t quartic_index(int n, int i, int j, int k, int l);
  static std::size_t quadratic_index(int n, int i, int j);
};

/// Random z-fields of one XXZ chain realization.
struct XxzFields {
  int n_site = 0;
  double w_strength = 0.0;
  std::vector<double> fields;
  std::uint64_t seed = 0;
};

/// Throws for N < 4 or odd N, or negative K.
SykCouplings sample_syk(int n_majorana, double k_strength, std::uint64_t seed);

/// H = sqrt(6/N^3) sum J_ijkl psi_i psi_j psi_k psi_l + (i/sqrt(N)) sum K_ij psi_i psi_j
OperatorMatrix build_syk_hamiltonian(const SykCouplings& c, const MajoranaSet& m);

XxzFields sample_xxz(int n_site, double w_strength, std::uint64_t seed);

/// Periodic Heisenberg chain with random z-field on the full 2^{n_site} space.
OperatorMatrix build_xxz_hamiltonian(const XxzFields& f);
/// Same Hamiltonian assembled directly on a magnetization sector.
OperatorMatrix build_xxz_hamiltonian(const XxzFields& f, const SectorBasis& sector);

/// Provenance records {model, params, seed, couplings}.
nlohmann::json to_json(const SykCouplings& c, bool include_couplings = true);
nlohmann::json to_json(const XxzFields& f, bool include_couplings = true);
/// Couplings missing from the record are regenerated from the seed.
SykCouplings syk_from_json(const nlohmann::json& j);
XxzFields xxz_from_json(const nlohmann::json& j);

}  // namespace twopoint
