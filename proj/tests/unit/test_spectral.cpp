#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "twopoint/eigen_cache.hpp"
#include "twopoint/models.hpp"
#include "twopoint/rng.hpp"
#include "twopoint/spectral.hpp"

using namespace twopoint;

namespace {

oracle::Mat random_hermitian(Eigen::Index n, std::mt19937_64& rng, bool real) {
  std::normal_distribution<double> g;
  oracle::Mat a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(g(rng), real ? 0.0 : g(rng));
  return (a + a.adjoint()) / 2.0;
}

// Mean of min/max ratios of consecutive level spacings.
double mean_r(const std::vector<double>& levels) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t k = 0; k + 2 < levels.size(); ++k) {
    const double a = levels[k + 1] - levels[k];
    const double b = levels[k + 2] - levels[k + 1];
    sum += std::min(a, b) / std::max(a, b);
    ++n;
  }
  return sum / n;
}

int binom(int n, int k) {
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("diagonalize_reconstructs_matrix") {
  std::mt19937_64 rng(1);
  for (bool real : {true, false}) {
    for (Eigen::Index n : {1, 2, 7, 40}) {
      CAPTURE(n);
      const auto h = random_hermitian(n, rng, real);
      const auto e = diagonalize(h, "test");
      if (n > 1) CHECK(e.real == real);
      CHECK(e.sector == "test");
      const auto& v = e.eigenvectors;
      CHECK(oracle::max_abs(v * e.eigenvalues.asDiagonal() * v.adjoint() - h) < 1e-12);
      CHECK(oracle::max_abs(v.adjoint() * v - oracle::Mat::Identity(n, n)) < 1e-12);
      for (Eigen::Index k = 1; k < n; ++k) CHECK(e.eigenvalues(k) >= e.eigenvalues(k - 1));
      if (real) CHECK(v.imag().cwiseAbs().maxCoeff() == 0.0);
    }
  }
  oracle::Mat not_hermitian = oracle::Mat::Zero(2, 2);
  not_hermitian(0, 1) = 1.0;
  CHECK_THROWS_AS(diagonalize(not_hermitian), Error);
  CHECK_THROWS_AS(diagonalize(oracle::Mat::Zero(2, 3)), Error);
  oracle::Mat nan = oracle::Mat::Identity(2, 2);
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(diagonalize(nan), NumericalError);
}

TEST_CASE("diagonalize_is_deterministic") {
  std::mt19937_64 rng(2);
  const auto h = random_hermitian(60, rng, false);
  const auto a = diagonalize(h);
  const auto b = diagonalize(h);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.eigenvectors == b.eigenvectors);
}

TEST_CASE("magnetization_sector_sizes") {
  CHECK(sz_zero_sector(14).dim() == 3432);
  CHECK(sz_zero_sector(10).dim() == 252);
  for (int n = 1; n <= 8; ++n)
    for (int up = 0; up <= n; ++up) CHECK(magnetization_sector(n, up).dim() == binom(n, up));
  CHECK_THROWS_AS(sz_zero_sector(9), Error);
  CHECK(sz_zero_sector(4).label() == "2Sz=0");

  // bit 1 = down; site 1 is the most significant bit
  const auto s = magnetization_sector(3, 2);
  CHECK(s.kept_indices() == std::vector<std::int64_t>{1, 2, 4});
  CHECK(s.position(2) == 1);
  CHECK(s.position(3) < 0);
  CHECK_THROWS_AS(SectorBasis(4, {2, 1}, "bad"), Error);
}

TEST_CASE("projection_matches_index_oracle") {
  std::mt19937_64 rng(3);
  for (int n : {4, 6, 8}) {
    const auto dim = Eigen::Index{1} << n;
    const auto op = random_hermitian(dim, rng, false);
    const auto rows = magnetization_sector(n, n / 2);
    const auto cols = magnetization_sector(n, n / 2 - 1);
    const auto p = project(op, rows, cols);
    REQUIRE(p.rows() == rows.dim());
    REQUIRE(p.cols() == cols.dim());
    double worst = 0.0;
    for (Eigen::Index r = 0; r < p.rows(); ++r)
      for (Eigen::Index c = 0; c < p.cols(); ++c)
        worst = std::max(worst, std::abs(p(r, c) - op(rows.kept_indices()[std::size_t(r)],
                                                      cols.kept_indices()[std::size_t(c)])));
    CHECK(worst == 0.0);
    CHECK(oracle::max_abs(project(op, rows) - project(op, rows, rows)) == 0.0);

    // The monomial overload agrees with the dense one.
    const auto minus = oracle::site(oracle::sminus(), 1, n);
    CHECK(oracle::max_abs(project(MonomialMap::from_dense(minus), cols, rows).to_dense() - project(minus, cols, rows)) ==
          0.0);
  }
  CHECK_THROWS_AS(project(oracle::Mat::Zero(4, 4), sz_zero_sector(4)), Error);
}

TEST_CASE("sector_spectra_union_equals_full_spectrum") {
  const int n = 8;
  const auto f = sample_xxz(n, 1.0, 4);
  const auto full = diagonalize(build_xxz_hamiltonian(f));
  std::vector<double> pooled;
  for (int up = 0; up <= n; ++up) {
    const auto e = diagonalize(build_xxz_hamiltonian(f, magnetization_sector(n, up)));
    pooled.insert(pooled.end(), e.eigenvalues.begin(), e.eigenvalues.end());
  }
  std::sort(pooled.begin(), pooled.end());
  REQUIRE(static_cast<Eigen::Index>(pooled.size()) == full.dim());
  for (std::size_t k = 0; k < pooled.size(); ++k) CHECK(pooled[k] == doctest::Approx(full.eigenvalues(Eigen::Index(k))).epsilon(1e-11));
}

TEST_CASE("select_states_policies") {
  EigenDecomposition e;
  e.eigenvalues = Eigen::VectorXd::LinSpaced(3432, 0.0, 1.0);
  const auto all = select_states(e, AllStates{});
  CHECK(all.size() == 3432);
  CHECK(all.front() == 0);
  const auto central = select_states(e, CentralFraction{0.1});
  // floor(3432 * 0.45) = 1544 .. floor(3432 * 0.55) - 1 = 1886
  CHECK(central.front() == 1544);
  CHECK(central.back() == 1886);
  CHECK(central.size() == 343);
  for (std::size_t k = 1; k < central.size(); ++k) CHECK(central[k] == central[k - 1] + 1);

  e.eigenvalues = Eigen::VectorXd::LinSpaced(252, 0.0, 1.0);
  const auto c252 = select_states(e, CentralFraction{0.1});
  CHECK(c252.front() == 113);
  CHECK(c252.size() == 25);
  CHECK(select_states(e, CentralFraction{1.0}).size() == 252);
  CHECK_THROWS_AS(select_states(e, CentralFraction{0.0}), Error);
  CHECK_THROWS_AS(select_states(e, CentralFraction{1.5}), Error);
}

TEST_CASE("evolve_matches_matrix_exponential") {
  std::mt19937_64 rng(5);
  const auto h = random_hermitian(16, rng, false);
  const auto e = diagonalize(h);
  oracle::Vec v = oracle::Vec::Random(16);
  v.normalize();
  for (double t : {0.0, 0.3, 5.0}) {
    const oracle::Vec ref = oracle::propagator(h, t) * v;
    CHECK((evolve(e, t, v) - ref).cwiseAbs().maxCoeff() < 1e-11);
  }
  CHECK_THROWS_AS(evolve(e, 1.0, oracle::Vec::Zero(3)), Error);
}

TEST_CASE("degeneracy_detection") {
  const MajoranaSet m12(12);
  const auto kramers = diagonalize(build_syk_hamiltonian(sample_syk(12, 0.0, 8), m12));
  CHECK(has_degeneracy(kramers));
  CHECK(min_level_gap(kramers) < 1e-12);
  const auto split = diagonalize(build_syk_hamiltonian(sample_syk(12, 1e-4, 8), m12));
  CHECK_FALSE(has_degeneracy(split));
  const auto goe = diagonalize(build_syk_hamiltonian(sample_syk(8, 0.0, 8), MajoranaSet(8)));
  CHECK_FALSE(has_degeneracy(goe));
  CHECK(split.norm() == doctest::Approx(std::max(-split.eigenvalues(0), split.eigenvalues(split.dim() - 1))));
}

TEST_CASE("parity_resolution_in_degenerate_spectrum") {
  // N = 12, K = 0: the two members of each Kramers pair carry opposite
  // parity; after resolution each eigenvector is a parity eigenvector.
  const MajoranaSet m(12);
  auto e = diagonalize(build_syk_hamiltonian(sample_syk(12, 0.0, 31), m));
  const auto parity = m.parity().monomial();
  const auto labels = resolve_parity(e, parity);
  const auto p = parity.to_dense();
  int plus = 0;
  for (Eigen::Index k = 0; k < e.dim(); ++k) {
    const oracle::Vec v = e.eigenvectors.col(k);
    CHECK((p * v - labels[std::size_t(k)] * v).cwiseAbs().maxCoeff() < 1e-9);
    plus += labels[std::size_t(k)] > 0;
  }
  CHECK(plus == e.dim() / 2);
  const auto h = build_syk_hamiltonian(sample_syk(12, 0.0, 31), m);
  CHECK(oracle::max_abs(e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.adjoint() - h) < 1e-11);
}

TEST_CASE("energy_level_statistics_per_parity_sector") {
  // Independent check of the Hamiltonian: energy levels within one parity
  // sector follow GOE for N = 16 and GUE for N = 14 (reference <r> values
  // of large random matrices, 0.5307 and 0.5996).
  struct Case {
    int n;
    double expected;
  };
  for (const auto& c : {Case{16, 0.5307}, Case{14, 0.5996}}) {
    CAPTURE(c.n);
    const MajoranaSet m(c.n);
    const auto parity = m.parity().monomial();
    double sum = 0.0;
    const int samples = 40;
    for (int s = 0; s < samples; ++s) {
      auto e = diagonalize(build_syk_hamiltonian(sample_syk(c.n, 0.0, sample_seed(77, std::uint64_t(s))), m));
      const auto labels = resolve_parity(e, parity);
      std::vector<double> sector;
      for (Eigen::Index k = 0; k < e.dim(); ++k)
        if (labels[std::size_t(k)] > 0) sector.push_back(e.eigenvalues(k));
      // Central half of the sector spectrum.
      const auto q = sector.size() / 4;
      sum += mean_r({sector.begin() + std::ptrdiff_t(q), sector.end() - std::ptrdiff_t(q)});
    }
    CHECK(sum / samples == doctest::Approx(c.expected).epsilon(0.03));
  }
}

TEST_CASE("eigen_cache_round_trip") {
  std::mt19937_64 rng(9);
  const auto e = diagonalize(random_hermitian(12, rng, false), "2Sz=0");
  const auto dir = std::filesystem::temp_directory_path() / "twopoint_cache_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / eigen_cache_key("xxz", "N_site=8,W=0.5", 123, "2Sz=0");
  save_eigendecomposition(e, path);
  const auto back = load_eigendecomposition(path);
  CHECK(back.eigenvalues == e.eigenvalues);
  CHECK(back.eigenvectors == e.eigenvectors);
  CHECK(back.sector == e.sector);
  CHECK(back.real == e.real);

  // Truncated file is rejected.
  std::filesystem::resize_file(path, std::filesystem::file_size(path) / 2);
  CHECK_THROWS_AS(load_eigendecomposition(path), Error);
  {
    std::ofstream junk(path, std::ios::binary | std::ios::trunc);
    junk << "not a cache file";
  }
  CHECK_THROWS_AS(load_eigendecomposition(path), Error);
  CHECK(eigen_cache_key("syk", "N=8,K=0", 1, "full") != eigen_cache_key("syk", "N=8,K=0", 2, "full"));
  std::filesystem::remove_all(dir);
}
