#include "twopoint/operators.hpp"

#include <cmath>
#include <string>

namespace twopoint {
namespace {

constexpr Complex kI{0.0, 1.0};

// Product of two single-site Paulis: a * b = phase * result.
std::pair<Complex, PauliKind> multiply(PauliKind a, PauliKind b) {
  using P = PauliKind;
  if (a == P::Identity) return {1.0, b};
  if (b == P::Identity) return {1.0, a};
  if (a == b) return {1.0, P::Identity};
  if (a == P::X && b == P::Y) return {kI, P::Z};
  if (a == P::Y && b == P::Z) return {kI, P::X};
  if (a == P::Z && b == P::X) return {kI, P::Y};
  if (a == P::Y && b == P::X) return {-kI, P::Z};
  if (a == P::Z && b == P::Y) return {-kI, P::X};
  return {-kI, P::Y};  // X * Z
}

PauliString make_string(std::initializer_list<PauliKind> f) {
  return PauliString{Complex{1.0, 0.0}, std::vector<PauliKind>(f)};
}

bool anticommute(const PauliString& a, const PauliString& b) {
  int clashes = 0;
  for (std::size_t q = 0; q < a.factors.size(); ++q) {
    if (a.factors[q] != PauliKind::Identity && b.factors[q] != PauliKind::Identity &&
        a.factors[q] != b.factors[q]) {
      ++clashes;
    }
  }
  return clashes % 2 == 1;
}

// Row pattern of the real-friendly representation for N <= 8 Majoranas on
// n = N/2 qubits:
//   gamma_1       = Z 1 1 ... 1
//   gamma_2       = Y Y Y ... Y
//   gamma_{2m+1}  = Y, then on qubits 2..n: X at qubit m+1, 1 at the next
//                   qubit (cyclically within 2..n), Y elsewhere
//   gamma_{2m+2}  = same with Z in place of X
// With a single trailing qubit (N = 4) the identity slot is absent.
std::vector<PauliString> base_strings(int n_majorana) {
  using P = PauliKind;
  const int n = n_majorana / 2;
  std::vector<PauliString> out;
  if (n == 1) {
    out.push_back(make_string({P::Z}));
    out.push_back(make_string({P::Y}));
    return out;
  }
  PauliString first{Complex{1.0, 0.0}, std::vector<P>(static_cast<std::size_t>(n), P::Identity)};
  first.factors[0] = P::Z;
  out.push_back(first);
  out.push_back(PauliString{Complex{1.0, 0.0}, std::vector<P>(static_cast<std::size_t>(n), P::Y)});
  const int ring = n - 1;  // qubits 2..n (0-based 1..n-1)
  for (int m = 1; m <= n - 1; ++m) {
    for (const P active : {P::X, P::Z}) {
      PauliString s{Complex{1.0, 0.0}, std::vector<P>(static_cast<std::size_t>(n), P::Y)};
      const int pos = m;  // 0-based qubit index of X/Z
      s.factors[static_cast<std::size_t>(pos)] = active;
      // With three qubits the cyclic identity slot of the last pair would
      // make psi_3 and psi_5 commute, so that pair keeps Y there.
      const bool has_hole = ring > 2 || (ring == 2 && m == 1);
      if (has_hole) {
        const int hole = 1 + (pos - 1 + 1) % ring;
        s.factors[static_cast<std::size_t>(hole)] = P::Identity;
      }
      out.push_back(s);
    }
  }
  return out;
}

PauliString tensor(const PauliString& a, const PauliString& b) {
  PauliString out;
  out.phase = a.phase * b.phase;
  out.factors = a.factors;
  out.factors.insert(out.factors.end(), b.factors.begin(), b.factors.end());
  return out;
}

PauliString ordered_product(std::span<const PauliString> s) {
  PauliString acc = s.front();
  for (std::size_t k = 1; k < s.size(); ++k) acc = acc * s[k];
  return acc;
}

}  // namespace

OperatorMatrix pauli(PauliKind kind) {
  OperatorMatrix m = OperatorMatrix::Zero(2, 2);
  switch (kind) {
    case PauliKind::Identity:
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      break;
    case PauliKind::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case PauliKind::Y:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case PauliKind::Z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

OperatorMatrix kron_chain(std::span<const OperatorMatrix> factors) {
  if (factors.empty()) throw Error("kron_chain: empty factor list");
  for (const auto& f : factors) {
    if (f.rows() != f.cols() || f.rows() == 0) throw Error("kron_chain: factors must be square and non-empty");
  }
  OperatorMatrix acc = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) {
    const auto& f = factors[k];
    OperatorMatrix next(acc.rows() * f.rows(), acc.cols() * f.cols());
    for (Eigen::Index i = 0; i < acc.rows(); ++i) {
      for (Eigen::Index j = 0; j < acc.cols(); ++j) {
        next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = acc(i, j) * f;
      }
    }
    acc = std::move(next);
  }
  return acc;
}

bool PauliString::is_real() const {
  int n_y = 0;
  for (auto f : factors) n_y += f == PauliKind::Y ? 1 : 0;
  const Complex p = n_y % 2 == 0 ? phase : phase * kI;
  return p.imag() == 0.0;
}

PauliString PauliString::operator*(const PauliString& rhs) const {
  if (factors.size() != rhs.factors.size()) throw Error("PauliString: qubit count mismatch");
  PauliString out;
  out.phase = phase * rhs.phase;
  out.factors.resize(factors.size());
  for (std::size_t q = 0; q < factors.size(); ++q) {
    auto [ph, k] = multiply(factors[q], rhs.factors[q]);
    out.phase *= ph;
    out.factors[q] = k;
  }
  return out;
}

MonomialMap PauliString::monomial() const {
  const std::int64_t d = dim();
  const auto n = static_cast<int>(factors.size());
  MonomialMap m(d, d);
  for (std::int64_t c = 0; c < d; ++c) {
    std::int64_t r = c;
    Complex v = phase;
    for (int k = 0; k < n; ++k) {
      const int bit_pos = n - 1 - k;
      const bool down = (c >> bit_pos) & 1;
      switch (factors[static_cast<std::size_t>(k)]) {
        case PauliKind::Identity:
          break;
        case PauliKind::X:
          r ^= std::int64_t{1} << bit_pos;
          break;
        case PauliKind::Y:
          r ^= std::int64_t{1} << bit_pos;
          v *= down ? -kI : kI;
          break;
        case PauliKind::Z:
          if (down) v = -v;
          break;
      }
    }
    m.set(c, r, v);
  }
  return m;
}

OperatorMatrix PauliString::dense() const { return monomial().to_dense(); }

MajoranaSet::MajoranaSet(int n_majorana) : n_(n_majorana) {
  if (n_majorana < 2 || n_majorana % 2 != 0) {
    throw Error("majorana_set: N must be even and >= 2, got " + std::to_string(n_majorana));
  }
  const int extensions = (n_majorana - 1) / 8;
  const int base_n = n_majorana - 8 * extensions;
  gammas_ = base_strings(base_n);
  if (extensions > 0) {
    // Clifford periodicity: append blocks of 8 using the 8-Majorana set and
    // its chirality, which is real symmetric and squares to one.
    const auto block = base_strings(8);
    const PauliString chirality = ordered_product(block);
    for (int e = 0; e < extensions; ++e) {
      std::vector<PauliString> next;
      PauliString ident_prev{Complex{1.0, 0.0},
                             std::vector<PauliKind>(gammas_.front().factors.size(), PauliKind::Identity)};
      for (const auto& g : gammas_) next.push_back(tensor(g, chirality));
      for (const auto& b : block) next.push_back(tensor(ident_prev, b));
      gammas_ = std::move(next);
    }
  }
  for (std::size_t i = 0; i < gammas_.size(); ++i) {
    for (std::size_t j = i + 1; j < gammas_.size(); ++j) {
      if (!anticommute(gammas_[i], gammas_[j])) {
        throw Error("majorana_set: internal representation error at pair (" + std::to_string(i) + "," +
                    std::to_string(j) + ")");
      }
    }
  }
}

OperatorMatrix MajoranaSet::op(int i) const { return monomial(i).to_dense(); }

std::vector<OperatorMatrix> MajoranaSet::ops() const {
  std::vector<OperatorMatrix> out;
  out.reserve(gammas_.size());
  for (int i = 0; i < n_; ++i) out.push_back(op(i));
  return out;
}

MonomialMap MajoranaSet::monomial(int i) const {
  return gamma(i).monomial().scaled(1.0 / std::sqrt(2.0));
}

PauliString MajoranaSet::parity() const {
  PauliString p = ordered_product(gammas_);
  Complex ph{1.0, 0.0};
  for (int k = 0; k < n_ / 2; ++k) ph *= kI;
  p.phase *= ph;
  return p;
}

MajoranaSet majorana_set(int n_majorana) { return MajoranaSet(n_majorana); }

OperatorMatrix spin_site_operator(SiteOperator kind, int site, int n_site) {
  if (n_site < 1) throw Error("spin_site_operator: n_site must be positive");
  if (site < 1 || site > n_site) {
    throw Error("spin_site_operator: site " + std::to_string(site) + " outside 1.." + std::to_string(n_site));
  }
  OperatorMatrix local = OperatorMatrix::Zero(2, 2);
  switch (kind) {
    case SiteOperator::Identity: local = pauli(PauliKind::Identity); break;
    case SiteOperator::X: local = pauli(PauliKind::X); break;
    case SiteOperator::Y: local = pauli(PauliKind::Y); break;
    case SiteOperator::Z: local = pauli(PauliKind::Z); break;
    case SiteOperator::Plus: local(0, 1) = 1.0; break;
    case SiteOperator::Minus: local(1, 0) = 1.0; break;
  }
  std::vector<OperatorMatrix> factors(static_cast<std::size_t>(n_site), pauli(PauliKind::Identity));
  factors[static_cast<std::size_t>(site - 1)] = local;
  return kron_chain(factors);
}

}  // namespace twopoint
