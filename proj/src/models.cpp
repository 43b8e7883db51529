#include "twopoint/models.hpp"

#include <cmath>
#include <string>

#include "twopoint/rng.hpp"
#include "twopoint/spectral.hpp"

namespace twopoint {
namespace {

std::size_t choose(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

// Fills `couplings` from the seed in a fixed draw order: all J_ijkl, then K_ij.
void draw_syk(SykCouplings& c) {
  Rng rng(c.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  c.quartic.resize(choose(c.n_majorana, 4));
  for (auto& j : c.quartic) j = unit(rng);
  c.quadratic.assign(choose(c.n_majorana, 2), 0.0);
  if (c.k_strength > 0.0) {
    for (auto& k : c.quadratic) k = c.k_strength * unit(rng);
  }
}

void draw_xxz(XxzFields& f) {
  Rng rng(f.seed);
  std::uniform_real_distribution<double> uni(-f.w_strength, f.w_strength);
  f.fields.resize(static_cast<std::size_t>(f.n_site));
  for (auto& w : f.fields) w = f.w_strength > 0.0 ? uni(rng) : 0.0;
}

}  // namespace

std::size_t SykCouplings::quartic_index(int n, int i, int j, int k, int l) {
  // Rank of the combination in lexicographic order.
  std::size_t idx = 0;
  const int c[4] = {i, j, k, l};
  int prev = -1;
  for (int p = 0; p < 4; ++p) {
    for (int v = prev + 1; v < c[p]; ++v) idx += choose(n - 1 - v, 3 - p);
    prev = c[p];
  }
  return idx;
}

std::size_t SykCouplings::quadratic_index(int n, int i, int j) {
  std::size_t idx = 0;
  for (int v = 0; v < i; ++v) idx += static_cast<std::size_t>(n - 1 - v);
  return idx + static_cast<std::size_t>(j - i - 1);
}

SykCouplings sample_syk(int n_majorana, double k_strength, std::uint64_t seed) {
  if (n_majorana < 4 || n_majorana % 2 != 0) {
    throw Error("sample_syk: N must be even and >= 4, got " + std::to_string(n_majorana));
  }
  if (!(k_strength >= 0.0)) throw Error("sample_syk: K must be non-negative");
  SykCouplings c;
  c.n_majorana = n_majorana;
  c.k_strength = k_strength;
  c.seed = seed;
  draw_syk(c);
  return c;
}

OperatorMatrix build_syk_hamiltonian(const SykCouplings& c, const MajoranaSet& m) {
  const int n = c.n_majorana;
  if (m.n_majorana() != n) {
    throw Error("build_syk_hamiltonian: Majorana set has N=" + std::to_string(m.n_majorana()) +
                ", couplings have N=" + std::to_string(n));
  }
  if (c.quartic.size() != choose(n, 4) || c.quadratic.size() != choose(n, 2)) {
    throw Error("build_syk_hamiltonian: coupling arrays have wrong length");
  }
  std::vector<MonomialMap> psi;
  psi.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) psi.push_back(m.monomial(i));

  // Pair products psi_i psi_j (i<j), reused by every quartic term.
  std::vector<MonomialMap> pairs(choose(n, 2));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs[SykCouplings::quadratic_index(n, i, j)] = psi[static_cast<std::size_t>(i)].compose(psi[static_cast<std::size_t>(j)]);
  }

  const std::int64_t dim = m.dim();
  OperatorMatrix h = OperatorMatrix::Zero(dim, dim);
  const double quartic_scale = std::sqrt(6.0 / (static_cast<double>(n) * n * n));
  std::size_t q = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto& left = pairs[SykCouplings::quadratic_index(n, i, j)];
      for (int k = j + 1; k < n; ++k) {
        for (int l = k + 1; l < n; ++l, ++q) {
          left.compose(pairs[SykCouplings::quadratic_index(n, k, l)]).add_to(h, quartic_scale * c.quartic[q]);
        }
      }
    }
  }
  if (c.k_strength > 0.0) {
    const Complex quad_scale{0.0, 1.0 / std::sqrt(static_cast<double>(n))};
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      if (c.quadratic[p] != 0.0) pairs[p].add_to(h, quad_scale * c.quadratic[p]);
    }
  }
  return h;
}

XxzFields sample_xxz(int n_site, double w_strength, std::uint64_t seed) {
  if (n_site < 2) throw Error("sample_xxz: n_site must be >= 2, got " + std::to_string(n_site));
  if (!(w_strength >= 0.0)) throw Error("sample_xxz: W must be non-negative");
  XxzFields f;
  f.n_site = n_site;
  f.w_strength = w_strength;
  f.seed = seed;
  draw_xxz(f);
  return f;
}

OperatorMatrix build_xxz_hamiltonian(const XxzFields& f, const SectorBasis& sector) {
  const int n = f.n_site;
  if (n < 2) throw Error("build_xxz_hamiltonian: n_site must be >= 2");
  if (static_cast<int>(f.fields.size()) != n) throw Error("build_xxz_hamiltonian: field count mismatch");
  if (sector.parent_dim() != (std::int64_t{1} << n)) {
    throw Error("build_xxz_hamiltonian: sector does not belong to a " + std::to_string(n) + "-site chain");
  }
  const std::int64_t dim = sector.dim();
  OperatorMatrix h = OperatorMatrix::Zero(dim, dim);
  auto bit = [n](std::int64_t state, int site) { return (state >> (n - 1 - site)) & 1; };  // site 0-based
  for (std::int64_t c = 0; c < dim; ++c) {
    const std::int64_t s = sector.kept_indices()[static_cast<std::size_t>(c)];
    double diag = 0.0;
    for (int i = 0; i < n; ++i) {
      const double zi = bit(s, i) ? -1.0 : 1.0;
      diag += 0.5 * f.fields[static_cast<std::size_t>(i)] * zi;
      const int j = (i + 1) % n;
      const double zj = bit(s, j) ? -1.0 : 1.0;
      diag += 0.25 * zi * zj;
      if (zi != zj) {
        // (1/4)(XX + YY) = (1/2)(S+S- + S-S+) flips an antiparallel pair.
        const std::int64_t flipped = s ^ (std::int64_t{1} << (n - 1 - i)) ^ (std::int64_t{1} << (n - 1 - j));
        const std::int64_t r = sector.position(flipped);
        if (r < 0) throw Error("build_xxz_hamiltonian: sector is not closed under the hopping term");
        h(r, c) += 0.5;
      }
    }
    h(c, c) += diag;
  }
  return h;
}

OperatorMatrix build_xxz_hamiltonian(const XxzFields& f) {
  if (f.n_site < 2) throw Error("build_xxz_hamiltonian: n_site must be >= 2");
  return build_xxz_hamiltonian(f, SectorBasis::full(std::int64_t{1} << f.n_site));
}

nlohmann::json to_json(const SykCouplings& c, bool include_couplings) {
  nlohmann::json j;
  j["model"] = "syk";
  j["params"] = {{"N", c.n_majorana}, {"K", c.k_strength}};
  j["seed"] = c.seed;
  if (include_couplings) j["couplings"] = {{"J", c.quartic}, {"K", c.quadratic}};
  return j;
}

nlohmann::json to_json(const XxzFields& f, bool include_couplings) {
  nlohmann::json j;
  j["model"] = "xxz";
  j["params"] = {{"N_site", f.n_site}, {"W", f.w_strength}};
  j["seed"] = f.seed;
  if (include_couplings) j["couplings"] = {{"w", f.fields}};
  return j;
}

SykCouplings syk_from_json(const nlohmann::json& j) {
  if (j.at("model") != "syk") throw Error("syk_from_json: record is not an SYK realization");
  SykCouplings c = sample_syk(j.at("params").at("N").get<int>(), j.at("params").at("K").get<double>(),
                              j.at("seed").get<std::uint64_t>());
  if (j.contains("couplings")) {
    c.quartic = j["couplings"].at("J").get<std::vector<double>>();
    c.quadratic = j["couplings"].at("K").get<std::vector<double>>();
    if (c.quartic.size() != choose(c.n_majorana, 4) || c.quadratic.size() != choose(c.n_majorana, 2)) {
      throw Error("syk_from_json: coupling count does not match N");
    }
  }
  return c;
}

XxzFields xxz_from_json(const nlohmann::json& j) {
  if (j.at("model") != "xxz") throw Error("xxz_from_json: record is not an XXZ realization");
  XxzFields f = sample_xxz(j.at("params").at("N_site").get<int>(), j.at("params").at("W").get<double>(),
                           j.at("seed").get<std::uint64_t>());
  if (j.contains("couplings")) {
    f.fields = j["couplings"].at("w").get<std::vector<double>>();
    if (static_cast<int>(f.fields.size()) != f.n_site) throw Error("xxz_from_json: field count does not match N_site");
  }
  return f;
}

}  // namespace twopoint
