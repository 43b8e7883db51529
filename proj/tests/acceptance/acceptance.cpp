// End-to-end acceptance gate. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails. Optional arguments restrict the
// run to the listed criterion numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "../unit/oracles.hpp"
#include "twopoint/correlator.hpp"
#include "twopoint/harness/config.hpp"
#include "twopoint/harness/csv.hpp"
#include "twopoint/harness/experiment.hpp"
#include "twopoint/models.hpp"
#include "twopoint/operators.hpp"
#include "twopoint/spectral.hpp"
#include "twopoint/statistics.hpp"

using namespace twopoint;
using namespace twopoint::harness;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (ok ? "" : "[x] ") << what << "; ";
  }
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

int workers() { return static_cast<int>(std::max(2u, std::thread::hardware_concurrency())); }

fs::path run_dir(const std::string& name) {
  const auto p = fs::current_path() / "acceptance_runs" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Column `col` of `file` keyed by the t column, which is first.
std::map<double, double> by_time(const fs::path& file, const std::string& col) {
  const auto table = read_csv(file);
  const auto it = std::find(table.header.begin(), table.header.end(), col);
  if (it == table.header.end()) throw Error("missing column " + col + " in " + file.string());
  const auto k = static_cast<std::size_t>(it - table.header.begin());
  std::map<double, double> out;
  for (const auto& row : table.rows) out[std::stod(row[0])] = std::stod(row[k]);
  return out;
}

ExperimentConfig syk_run(int n, double k, int samples, const fs::path& out) {
  return parse_config({{"model", "syk"},
                       {"N", std::to_string(n)},
                       {"K", format_double(k)},
                       {"n_samples", std::to_string(samples)},
                       {"times", "0.1,1,10,100"},
                       {"state_policy", "all"},
                       {"exponent_policy", "upper_half"},
                       {"workers", std::to_string(workers())},
                       {"output_dir", out.string()}});
}

ExperimentConfig xxz_run(int n_site, double w, int samples, const fs::path& out) {
  return parse_config({{"model", "xxz"},
                       {"N_site", std::to_string(n_site)},
                       {"W", format_double(w)},
                       {"n_samples", std::to_string(samples)},
                       {"times", "100"},
                       {"state_policy", "central:0.1"},
                       {"exponent_policy", "upper_half"},
                       {"workers", std::to_string(workers())},
                       {"output_dir", out.string()}});
}

// Reference <r> values for the Gaussian ensembles from large random matrices.
double reference_r(ReferenceKind kind) {
  static std::map<ReferenceKind, double> cache;
  if (!cache.count(kind)) cache[kind] = reference_mean_r(kind, 400, 200, 2024).mean_r;
  return cache[kind];
}

const double kPoissonR = 2.0 * std::log(2.0) - 1.0;

// 1. Exact algebraic identities.
void algebraic_suite(Outcome& o) {
  double anti = 0.0;
  for (int n = 2; n <= 12; n += 2) {
    const MajoranaSet m(n);
    const auto psi = m.ops();
    const auto id = oracle::Mat::Identity(m.dim(), m.dim());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        anti = std::max(anti, oracle::max_abs(psi[i] * psi[j] + psi[j] * psi[i] - (i == j ? 1.0 : 0.0) * id));
  }
  o.require(anti <= 1e-10, "Majorana anticommutators " + sci(anti));

  double herm = 0.0;
  for (int n = 4; n <= 12; n += 2)
    for (double k : {0.0, 1e-4, 1.0}) {
      const auto h = build_syk_hamiltonian(sample_syk(n, k, 31 + n), MajoranaSet(n));
      herm = std::max(herm, oracle::max_abs(h - h.adjoint()));
    }
  double comm = 0.0;
  for (int n = 2; n <= 8; ++n) {
    const auto h = build_xxz_hamiltonian(sample_xxz(n, 2.0, 17 + n));
    herm = std::max(herm, oracle::max_abs(h - h.adjoint()));
    oracle::Mat sz = oracle::Mat::Zero(h.rows(), h.cols());
    for (int s = 0; s < n; ++s) sz += oracle::site(oracle::sz(), s, n);
    comm = std::max(comm, oracle::max_abs(h * sz - sz * h));
  }
  o.require(herm <= 1e-10, "Hermiticity " + sci(herm));
  o.require(comm <= 1e-10, "XXZ [H, S_z] " + sci(comm));

  double sym = 0.0;
  for (int n : {4, 6, 8}) {
    const auto f = sample_xxz(n, 0.5, 5 * n);
    const auto state = sz_zero_sector(n);
    const auto lowered = magnetization_sector(n, n / 2 - 1);
    const auto e0 = diagonalize(build_xxz_hamiltonian(f, state));
    const auto e1 = diagonalize(build_xxz_hamiltonian(f, lowered));
    const EigenstateCorrelator bank(Dynamics(e0, e1), xxz_plus_minus_probes(n, state, lowered),
                                    select_states(e0, AllStates{}));
    for (std::size_t pos = 0; pos < bank.states().size(); ++pos)
      for (double t : {0.0, 0.1, 1.0, 10.0, 100.0}) {
        const auto g = bank.at(pos, t).entries;
        sym = std::max(sym, oracle::max_abs(g - g.transpose()));
      }
  }
  o.require(sym <= 1e-10, "XXZ G = G^T " + sci(sym));

  double sum_rule = 0.0;
  for (int n = 4; n <= 12; n += 2) {
    const MajoranaSet m(n);
    const auto e = diagonalize(build_syk_hamiltonian(sample_syk(n, 0.3, 7 + n), m));
    const EigenstateCorrelator bank(Dynamics(e), syk_probes(m), select_states(e, AllStates{}));
    const auto id = oracle::Mat::Identity(n, n);
    for (std::size_t pos = 0; pos < bank.states().size(); ++pos) {
      const auto g = bank.at(pos, 0.0).entries;
      sum_rule = std::max(sum_rule, oracle::max_abs(g + g.transpose() - id));
    }
  }
  o.require(sum_rule <= 1e-10, "SYK G(0) + G(0)^T = 1 " + sci(sum_rule));
}

// 2. Every exponent equals -ln 2 at t = 0 without the quadratic term.
void degeneracy_point(Outcome& o) {
  for (int n : {8, 16}) {
    const MajoranaSet m(n);
    const auto e = diagonalize(build_syk_hamiltonian(sample_syk(n, 0.0, 99), m));
    const EigenstateCorrelator bank(Dynamics(e), syk_probes(m), select_states(e, AllStates{}));
    double worst = 0.0;
    for (std::size_t pos = 0; pos < bank.states().size(); ++pos)
      for (double l : exponent_spectrum(bank.at(pos, 0.0)).lambdas) worst = std::max(worst, std::abs(l + std::log(2.0)));
    o.require(worst <= 1e-10, "N=" + std::to_string(n) + " max |lambda + ln2| " + sci(worst));
  }
}

// 3. Agreement with explicit Heisenberg evolution and with the Gram matrix.
void brute_force_oracle(Outcome& o) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  auto random_state = [&](Eigen::Index dim) {
    oracle::Vec v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v(k) = Complex(gauss(rng), gauss(rng));
    return oracle::Vec(v.normalized());
  };
  const std::vector<double> times{0.0, 0.3, 1.0, 10.0, 100.0};
  double g_err = 0.0;
  double gram_err = 0.0;
  auto check_gram = [&](const CorrelationMatrix& g) {
    const auto rec = exponent_spectrum(g);
    const auto mu = oracle::gram_eigenvalues(g.entries);
    for (std::size_t k = 0; k < mu.size(); ++k)
      gram_err = std::max(gram_err, std::abs(std::exp(2.0 * rec.lambdas[k]) - mu[k]) / mu.front());
  };

  for (int n = 4; n <= 12; n += 2) {
    const MajoranaSet m(n);
    const auto h = build_syk_hamiltonian(sample_syk(n, 0.2, 40 + n), m);
    const auto e = diagonalize(h);
    const auto probes = syk_probes(m);
    const auto psi = m.ops();
    const EigenstateCorrelator bank(Dynamics(e), probes, {0, e.dim() / 2, e.dim() - 1});
    const auto phi = random_state(e.dim());
    for (double t : times) {
      for (std::size_t pos = 0; pos < 3; ++pos) {
        const oracle::Vec v = reference_state(e, Eigenstate{bank.states()[pos]});
        const auto g = bank.at(pos, t);
        g_err = std::max(g_err, oracle::max_abs(g.entries - oracle::heisenberg_g(h, psi, psi, v, t)));
        check_gram(g);
      }
      const auto g = correlation_matrix(e, probes, phi, t);
      g_err = std::max(g_err, oracle::max_abs(g.entries - oracle::heisenberg_g(h, psi, psi, phi, t)));
      check_gram(g);
    }
  }

  for (int n : {2, 4, 6}) {
    const auto f = sample_xxz(n, 1.0, 60 + n);
    const auto h = build_xxz_hamiltonian(f);
    const auto state = sz_zero_sector(n);
    const auto lowered = magnetization_sector(n, n / 2 - 1);
    const auto e0 = diagonalize(build_xxz_hamiltonian(f, state));
    const auto e1 = diagonalize(build_xxz_hamiltonian(f, lowered));
    const auto probes = xxz_plus_minus_probes(n, state, lowered);
    std::vector<oracle::Mat> plus, minus;
    for (int s = 0; s < n; ++s) {
      plus.push_back(oracle::site(oracle::splus(), s, n));
      minus.push_back(oracle::site(oracle::sminus(), s, n));
    }
    auto embed = [&](const oracle::Vec& v) {
      oracle::Vec out = oracle::Vec::Zero(state.parent_dim());
      for (Eigen::Index k = 0; k < v.size(); ++k) out(state.kept_indices()[std::size_t(k)]) = v(k);
      return out;
    };
    const Dynamics dyn(e0, e1);
    const EigenstateCorrelator bank(dyn, probes, select_states(e0, AllStates{}));
    for (double t : times)
      for (std::size_t pos = 0; pos < bank.states().size(); ++pos) {
        const oracle::Vec v = reference_state(e0, Eigenstate{bank.states()[pos]});
        const auto g = bank.at(pos, t);
        g_err = std::max(g_err, oracle::max_abs(g.entries - oracle::heisenberg_g(h, plus, minus, embed(v), t)));
        check_gram(g);
      }
  }
  o.require(g_err <= 1e-10, "max |G - G_oracle| " + sci(g_err));
  o.require(gram_err <= 1e-10, "max relative |s^2 - eig(G^dag G)| " + sci(gram_err));
}

void mean_r_within(Outcome& o, const fs::path& dir, const std::vector<double>& times, double target, double tol,
                   const std::string& name) {
  const auto r = by_time(dir / "gap_ratio.csv", "mean_r");
  const auto se = by_time(dir / "gap_ratio.csv", "stderr");
  for (double t : times) {
    const double v = r.at(t);
    o.require(std::abs(v - target) <= tol, "t=" + format_double(t) + " <r>=" + fmt(v) + "+-" + fmt(se.at(t)) +
                                               " vs " + name + " " + fmt(target));
  }
}

// 4. SYK N = 14 near K = 0 follows GUE.
void syk_gue(Outcome& o) {
  const auto dir = run_dir("c4_syk_n14_k1e-4");
  run_experiment(syk_run(14, 1e-4, 500, dir));
  mean_r_within(o, dir, {0.1, 1, 10, 100}, reference_r(ReferenceKind::GUE), 0.03, "GUE");
}

// 5. Large quadratic coupling gives Poisson.
void syk_poisson(Outcome& o) {
  const auto dir = run_dir("c5_syk_n14_k10");
  run_experiment(syk_run(14, 10.0, 500, dir));
  mean_r_within(o, dir, {10, 100}, kPoissonR, 0.04, "Poisson");
}

// 6. SYK N = 16 reaches GOE at late time.
void syk_goe(Outcome& o) {
  const auto dir = run_dir("c6_syk_n16_k1e-4");
  run_experiment(syk_run(16, 1e-4, 500, dir));
  mean_r_within(o, dir, {100}, reference_r(ReferenceKind::GOE), 0.03, "GOE");
  const auto l1 = by_time(dir / "distances.csv", "l1_goe");
  o.require(l1.at(0.1) > l1.at(100.0),
            "L1 to GOE t=0.1 " + fmt(l1.at(0.1)) + " > t=100 " + fmt(l1.at(100.0)));
}

// 7. Weak disorder: ergodic chain, GOE.
void xxz_ergodic(Outcome& o) {
  const auto dir = run_dir("c7_xxz_n10_w0.5");
  run_experiment(xxz_run(10, 0.5, 1000, dir));
  const auto l1 = by_time(dir / "distances.csv", "l1_goe").at(100.0);
  o.require(l1 < 0.15, "N_site=10 L1 to GOE " + fmt(l1) + " < 0.15");
  mean_r_within(o, dir, {100}, reference_r(ReferenceKind::GOE), 0.04, "GOE");
}

// 8. Strong disorder: localized chain, toward Poisson with size.
void xxz_mbl(Outcome& o) {
  std::map<int, double> r_at;
  for (int n : {8, 10, 12}) {
    const auto dir = run_dir("c8_xxz_n" + std::to_string(n) + "_w4");
    run_experiment(xxz_run(n, 4.0, 1000, dir));
    r_at[n] = by_time(dir / "gap_ratio.csv", "mean_r").at(100.0);
    if (n == 10) {
      const double goe = by_time(dir / "distances.csv", "l1_goe").at(100.0);
      const double poisson = by_time(dir / "distances.csv", "l1_poisson").at(100.0);
      o.require(r_at[n] < 0.47, "N_site=10 <r>=" + fmt(r_at[n]) + " < 0.47");
      o.require(poisson < goe, "L1 Poisson " + fmt(poisson) + " < L1 GOE " + fmt(goe));
    }
  }
  o.require(r_at[12] < r_at[8], "<r>(N_site=12) " + fmt(r_at[12]) + " < <r>(N_site=8) " + fmt(r_at[8]));
}

// 9. Statistics self-tests.
void statistics_self_tests(Outcome& o) {
  std::mt19937_64 rng(9);
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 2 + 13 * static_cast<std::size_t>(trial);
    const std::size_t cols = 1 + static_cast<std::size_t>(trial) % 12;
    SeparationTable t(rows, std::vector<double>(cols));
    for (std::size_t i = 0; i < cols; ++i) {
      const double c = scale(rng);
      for (auto& row : t) row[i] = c * e(rng);
    }
    const auto u = fixed_i_unfold(t);
    for (std::size_t i = 0; i < cols; ++i) {
      double sum = 0.0;
      for (const auto& row : u) sum += row[i];
      worst = std::max(worst, std::abs(sum / static_cast<double>(rows) - 1.0));
    }
  }
  // Floating-point summation admits a few ulps; anything above that is a bug.
  o.require(worst <= 1e-14, "unfolded per-index means |m - 1| " + sci(worst));

  const auto poisson = reference_mean_r(ReferenceKind::Poisson, 1000, 200, 11);
  o.require(std::abs(poisson.mean_r - kPoissonR) <= 0.003,
            "Poisson MC <r>=" + fmt(poisson.mean_r) + " vs " + fmt(kPoissonR));

  for (auto kind : {ReferenceKind::GOE, ReferenceKind::GUE, ReferenceKind::Poisson}) {
    // Composite Simpson rule
    const double upper = kind == ReferenceKind::Poisson ? 60.0 : 12.0;
    const int n = 20000;
    const double h = upper / n;
    double norm = 0.0;
    double mean = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      const double s = k * h;
      norm += w * spacing_density(kind, s);
      mean += w * s * spacing_density(kind, s);
    }
    norm *= h / 3.0;
    mean *= h / 3.0;
    o.require(std::abs(norm - 1.0) <= 1e-6 && std::abs(mean - 1.0) <= 1e-6,
              std::string(to_string(kind)) + " norm " + sci(norm - 1.0) + " mean " + sci(mean - 1.0));
  }
}

// 10. Byte-identical output under different worker counts. Reuses the
// multi-worker run of criterion 4 when it is present.
void determinism(Outcome& o) {
  const auto many = fs::current_path() / "acceptance_runs" / "c4_syk_n14_k1e-4";
  auto cfg = syk_run(14, 1e-4, 500, many);
  if (!fs::exists(many / "manifest.json") || slurp(many / "manifest.json").find("\"complete\"") == std::string::npos) {
    fs::remove_all(many);
    run_experiment(cfg);
  }
  const auto one = run_dir("c10_workers1");
  cfg.output_dir = one.string();
  cfg.workers = 1;
  run_experiment(cfg);
  const auto a = slurp(one / "exponents.csv");
  const auto b = slurp(many / "exponents.csv");
  o.require(!a.empty() && a == b, "exponents.csv " + std::to_string(a.size()) + " bytes, workers 1 vs " +
                                      std::to_string(workers()) + (a == b ? " identical" : " differ"));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"exact algebraic identities", algebraic_suite},
      {"all exponents -ln2 at t=0 (SYK N=8,16, K=0)", degeneracy_point},
      {"brute-force oracle equivalence (dim <= 64)", brute_force_oracle},
      {"SYK N=14 K=1e-4 <r> at GUE", syk_gue},
      {"SYK N=14 K=10 <r> at Poisson", syk_poisson},
      {"SYK N=16 K=1e-4 GOE at late time", syk_goe},
      {"XXZ W=0.5 ergodic, GOE", xxz_ergodic},
      {"XXZ W=4 localized, toward Poisson", xxz_mbl},
      {"statistics self-tests", statistics_self_tests},
      {"determinism across worker counts", determinism},
  };
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[k].second(o);
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail << "exception: " << ex.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << criteria[k].first << " | "
              << o.detail.str() << "(" << fmt(secs, 1) << " s)" << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
