#include "twopoint/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace twopoint {
namespace {


// Single-site raising/lowering/z operator restricted to sector blocks.
MonomialMap site_map(SiteOperator kind, int site, int n_site, const SectorBasis& rows, const SectorBasis& cols) {
  const int bit_pos = n_site - site;
  MonomialMap m(rows.dim(), cols.dim());
  for (std::int64_t c = 0; c < cols.dim(); ++c) {
    const auto s = cols.kept_indices()[static_cast<std::size_t>(c)];
    const bool down = (s >> bit_pos) & 1;
    std::int64_t image = -1;
    Complex v = 1.0;
    switch (kind) {
      case SiteOperator::Plus:
        if (down) image = s ^ (std::int64_t{1} << bit_pos);
        break;
      case SiteOperator::Minus:
        if (!down) image = s ^ (std::int64_t{1} << bit_pos);
        break;
      case SiteOperator::Z:
        image = s;
        v = down ? -1.0 : 1.0;
        break;
      default:
        throw Error("site_map: unsupported operator");
    }
    if (image < 0) continue;
    const auto r = rows.position(image);
    if (r < 0) throw Error("probe operator leaves the target sector " + rows.label());
    m.set(c, r, v);
  }
  return m;
}

Eigen::MatrixXcd phases(const Eigen::VectorXd& energies, double t) {
  Eigen::VectorXcd d(energies.size());
  for (Eigen::Index k = 0; k < energies.size(); ++k) d(k) = std::polar(1.0, -energies(k) * t);
  return d;
}

bool all_real(const Eigen::MatrixXcd& m) { return (m.imag().array() == 0.0).all(); }

// W^dag (op * block), in real arithmetic when everything is real.
Eigen::MatrixXcd to_eigenbasis(const EigenDecomposition& w, const Eigen::MatrixXd* w_real, const MonomialMap& op,
                               const Eigen::MatrixXcd& block) {
  Eigen::MatrixXcd applied = op.apply(block);
  if (w_real != nullptr && op.is_real() && all_real(block)) {
    Eigen::MatrixXd r = w_real->transpose() * applied.real();
    return r.cast<Complex>();
  }
  return w.eigenvectors.adjoint() * applied;
}

void check_probes(const Dynamics& dyn, const ProbeSet& probes) {
  if (probes.left.size() != probes.right.size() || probes.left.empty()) {
    throw Error("probe set must have equal, non-zero numbers of left and right operators");
  }
  const auto ds = dyn.state().dim();
  const auto di = dyn.intermediate().dim();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (probes.left[i].rows() != ds || probes.left[i].cols() != di || probes.right[i].rows() != di ||
        probes.right[i].cols() != ds) {
      throw Error("probe " + std::to_string(i) + " does not match the state/intermediate dimensions");
    }
  }
}

}  // namespace

ProbeSet syk_probes(const MajoranaSet& m) {
  ProbeSet p;
  p.kind = ProbeKind::SykMajorana;
  for (int i = 0; i < m.n_majorana(); ++i) {
    p.left.push_back(m.monomial(i));
    p.right.push_back(p.left.back());
  }
  return p;
}

ProbeSet xxz_plus_minus_probes(int n_site, const SectorBasis& state, const SectorBasis& lowered) {
  if (state.parent_dim() != (std::int64_t{1} << n_site) || lowered.parent_dim() != state.parent_dim()) {
    throw Error("xxz_plus_minus_probes: sectors do not belong to a " + std::to_string(n_site) + "-site chain");
  }
  ProbeSet p;
  p.kind = ProbeKind::XxzPlusMinus;
  for (int site = 1; site <= n_site; ++site) {
    p.left.push_back(site_map(SiteOperator::Plus, site, n_site, state, lowered));
    p.right.push_back(site_map(SiteOperator::Minus, site, n_site, lowered, state));
  }
  return p;
}

ProbeSet xxz_zz_probes(int n_site, const SectorBasis& state) {
  if (state.parent_dim() != (std::int64_t{1} << n_site)) {
    throw Error("xxz_zz_probes: sector does not belong to a " + std::to_string(n_site) + "-site chain");
  }
  ProbeSet p;
  p.kind = ProbeKind::XxzZZ;
  for (int site = 1; site <= n_site; ++site) {
    p.left.push_back(site_map(SiteOperator::Z, site, n_site, state, state));
    p.right.push_back(p.left.back());
  }
  return p;
}

StateVector reference_state(const EigenDecomposition& e, const ReferenceChoice& choice, const SectorBasis* basis) {
  if (const auto* eig = std::get_if<Eigenstate>(&choice)) {
    if (eig->index < 0 || eig->index >= e.dim()) {
      throw Error("reference_state: eigenstate index " + std::to_string(eig->index) + " out of range");
    }
    StateVector v = e.eigenvectors.col(eig->index);
    return v / v.norm();
  }
  const auto& pattern = std::get<ProductState>(choice).pattern;
  if (basis == nullptr) throw Error("reference_state: product states need the working sector basis");
  if ((std::int64_t{1} << pattern.size()) != basis->parent_dim()) {
    throw Error("reference_state: pattern length does not match the chain length");
  }
  std::int64_t index = 0;
  for (char ch : pattern) {
    if (ch != 'u' && ch != 'd') throw Error("reference_state: pattern characters must be 'u' or 'd'");
    index = (index << 1) | (ch == 'd' ? 1 : 0);
  }
  const auto pos = basis->position(index);
  if (pos < 0) throw Error("reference_state: product state " + pattern + " is not in sector " + basis->label());
  if (basis->dim() != e.dim()) throw Error("reference_state: sector and decomposition dimensions differ");
  StateVector v = StateVector::Zero(e.dim());
  v(pos) = 1.0;
  return v;
}

StateCorrelator::StateCorrelator(const Dynamics& dyn, const ProbeSet& probes, StateVector phi, std::string label)
    : dyn_(dyn), label_(std::move(label)) {
  check_probes(dyn, probes);
  const auto& u = dyn.state();
  const auto& w = dyn.intermediate();
  if (phi.size() != u.dim()) throw Error("StateCorrelator: state dimension does not match the decomposition");
  const std::size_t n = probes.size();
  for (const auto& l : probes.left) left_adjoint_.push_back(l.adjoint());

  phi_coeffs_ = u.eigenvectors.adjoint() * phi;
  Eigen::Index k = 0;
  const double peak = phi_coeffs_.cwiseAbs2().maxCoeff(&k);
  const double rest = phi_coeffs_.squaredNorm() - peak;
  if (rest <= 1e-24 * phi_coeffs_.squaredNorm()) {
    eigen_index_ = k;
    energy_ = u.eigenvalues(k);
  }

  Eigen::MatrixXd w_real;
  if (w.real) w_real = w.eigenvectors.real();
  const Eigen::MatrixXd* wr = w.real ? &w_real : nullptr;
  right_bank_.resize(w.dim(), static_cast<Eigen::Index>(n));
  if (is_eigenstate()) left_bank_.resize(w.dim(), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    right_bank_.col(static_cast<Eigen::Index>(j)) = to_eigenbasis(w, wr, probes.right[j], phi);
    if (is_eigenstate()) {
      left_bank_.col(static_cast<Eigen::Index>(j)) = to_eigenbasis(w, wr, left_adjoint_[j], phi);
    }
  }
}

CorrelationMatrix StateCorrelator::at(double t) const {
  const auto& w = dyn_.intermediate();
  const Eigen::VectorXcd d = phases(w.eigenvalues, t);
  CorrelationMatrix g;
  g.t = t;
  g.state_label = label_;
  Eigen::MatrixXcd propagated = d.asDiagonal() * right_bank_;
  if (is_eigenstate()) {
    g.entries = std::polar(1.0, energy_ * t) * (left_bank_.adjoint() * propagated);
  } else {
    const auto& u = dyn_.state();
    const StateVector phi_t = u.eigenvectors * (phases(u.eigenvalues, t).cwiseProduct(phi_coeffs_));
    Eigen::MatrixXcd left(w.dim(), static_cast<Eigen::Index>(left_adjoint_.size()));
    for (std::size_t i = 0; i < left_adjoint_.size(); ++i) {
      left.col(static_cast<Eigen::Index>(i)) = w.eigenvectors.adjoint() * left_adjoint_[i].apply(phi_t);
    }
    g.entries = left.adjoint() * propagated;
  }
  return g;
}

EigenstateCorrelator::EigenstateCorrelator(const Dynamics& dyn, const ProbeSet& probes,
                                           std::vector<std::int64_t> states)
    : dyn_(dyn), states_(std::move(states)) {
  check_probes(dyn, probes);
  const auto& u = dyn.state();
  const auto& w = dyn.intermediate();
  const auto n = static_cast<Eigen::Index>(probes.size());
  const auto n_states = static_cast<Eigen::Index>(states_.size());
  Eigen::MatrixXcd selected(u.dim(), n_states);
  for (Eigen::Index s = 0; s < n_states; ++s) {
    const auto k = states_[static_cast<std::size_t>(s)];
    if (k < 0 || k >= u.dim()) throw Error("EigenstateCorrelator: state index out of range");
    selected.col(s) = u.eigenvectors.col(k);
  }
  Eigen::MatrixXd w_real;
  if (w.real) w_real = w.eigenvectors.real();
  const Eigen::MatrixXd* wr = w.real ? &w_real : nullptr;

  bool shared = true;
  std::vector<MonomialMap> left_adjoint;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    left_adjoint.push_back(probes.left[i].adjoint());
    shared = shared && left_adjoint.back() == probes.right[i];
  }

  right_.assign(static_cast<std::size_t>(n_states), Eigen::MatrixXcd(w.dim(), n));
  if (!shared) left_.assign(static_cast<std::size_t>(n_states), Eigen::MatrixXcd(w.dim(), n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::MatrixXcd bank = to_eigenbasis(w, wr, probes.right[static_cast<std::size_t>(j)], selected);
    for (Eigen::Index s = 0; s < n_states; ++s) right_[static_cast<std::size_t>(s)].col(j) = bank.col(s);
    if (!shared) {
      const Eigen::MatrixXcd lbank = to_eigenbasis(w, wr, left_adjoint[static_cast<std::size_t>(j)], selected);
      for (Eigen::Index s = 0; s < n_states; ++s) left_[static_cast<std::size_t>(s)].col(j) = lbank.col(s);
    }
  }
}

CorrelationMatrix EigenstateCorrelator::at(std::size_t pos, double t) const {
  if (pos >= states_.size()) throw Error("EigenstateCorrelator::at: position out of range");
  const auto& w = dyn_.intermediate();
  const double energy = dyn_.state().eigenvalues(states_[pos]);
  const Eigen::VectorXcd d = phases(w.eigenvalues, t);
  const auto& right = right_[pos];
  const auto& left = left_.empty() ? right : left_[pos];
  CorrelationMatrix g;
  g.t = t;
  g.state_label = "eigen:" + std::to_string(states_[pos]);
  g.entries = std::polar(1.0, energy * t) * (left.adjoint() * (d.asDiagonal() * right));
  return g;
}

CorrelationMatrix correlation_matrix(const Dynamics& dyn, const ProbeSet& probes, const StateVector& phi, double t) {
  return StateCorrelator(dyn, probes, phi).at(t);
}

CorrelationMatrix correlation_matrix(const EigenDecomposition& e, const ProbeSet& probes, const StateVector& phi,
                                     double t) {
  return correlation_matrix(Dynamics(e), probes, phi, t);
}

ExponentRecord exponent_spectrum(const CorrelationMatrix& g) {
  if (!g.entries.allFinite()) throw NumericalError("exponent_spectrum: correlation matrix has non-finite entries");
  ExponentRecord rec;
  rec.t = g.t;
  rec.state_label = g.state_label;
  if (g.entries.size() == 0) return rec;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g.entries);
  const Eigen::VectorXd& sv = svd.singularValues();  // descending
  rec.lambdas.resize(static_cast<std::size_t>(sv.size()));
  rec.floored.resize(static_cast<std::size_t>(sv.size()));
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    const bool floor = !(sv(i) >= kSingularValueFloor);
    rec.floored[static_cast<std::size_t>(i)] = floor;
    rec.lambdas[static_cast<std::size_t>(i)] = std::log(floor ? kSingularValueFloor : sv(i));
  }
  return rec;
}

std::pair<std::size_t, std::size_t> exponent_range(std::size_t n, ExponentPolicy policy) {
  if (policy == ExponentPolicy::All) return {0, n};
  if (n % 2 != 0) throw Error("exponent_subset: half policies need an even number of exponents, got " + std::to_string(n));
  return policy == ExponentPolicy::UpperHalf ? std::pair{std::size_t{0}, n / 2} : std::pair{n / 2, n};
}

std::vector<double> exponent_subset(const ExponentRecord& rec, ExponentPolicy policy) {
  const auto [b, e] = exponent_range(rec.lambdas.size(), policy);
  return {rec.lambdas.begin() + static_cast<std::ptrdiff_t>(b), rec.lambdas.begin() + static_cast<std::ptrdiff_t>(e)};
}

std::vector<ExponentRecord> correlator_series(const Dynamics& dyn, const ProbeSet& probes, const StateVector& phi,
                                              const std::vector<double>& times) {
  for (double t : times) {
    if (!std::isfinite(t)) throw Error("correlator_series: times must be finite");
  }
  const StateCorrelator corr(dyn, probes, phi);
  std::vector<ExponentRecord> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(exponent_spectrum(corr.at(t)));
  return out;
}

}  // namespace twopoint
