#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace twopoint {

/// Marks a separation removed before unfolding (e.g. next to a floored exponent).
inline constexpr double kDropped = std::numeric_limits<double>::quiet_NaN();

/// s_i = lambda_i - lambda_{i+1} for a descending spectrum.
std::vector<double> separations(std::span<const double> lambdas);

/// Per-sample separations (rows: samples, columns: index i). Dropped entries are NaN.
using SeparationTable = std::vector<std::vector<double>>;

/// s~_i = s_i / <s_i>, the mean taken over samples at fixed i (NaN entries
/// skipped). Throws naming the index when a mean is not positive.
SeparationTable fixed_i_unfold(const SeparationTable& samples);

/// Affine map with sum = 0 and sum of squares = n (n = input size).
std::vector<double> rescale_shift(std::span<const double> lambdas);

/// Mergeable mean/variance accumulator.
class MeanAccumulator {
 public:
  void add(double x);
  void merge(const MeanAccumulator& other);
  std::uint64_t count() const { return n_; }
  double mean() const;
  /// Standard error of the mean (sample standard deviation / sqrt(n)).
  double stderr_of_mean() const;

 private:
  std::uint64_t n_ = 0;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
};

struct GapRatioEnsemble {
  double t = 0.0;
  std::vector<double> values;
  double mean_r = 0.0;
  double stderr_r = 0.0;
  /// Pairs with both separations zero.
  std::uint64_t skipped_pairs = 0;
};

/// r_i = min(s_i, s_{i+1}) / max(s_i, s_{i+1}) pooled over all samples and indices.
GapRatioEnsemble gap_ratios(const SeparationTable& samples, double t = 0.0);

struct SpacingEnsemble {
  double t = 0.0;
  std::size_t n_exponents_used = 0;
  SeparationTable samples;
  SeparationTable unfolded;
};

struct Histogram {
  double bin_width = 0.1;
  double max_s = 4.0;
  std::vector<double> density;
  std::vector<std::uint64_t> counts;
  std::uint64_t overflow = 0;
  std::uint64_t in_range = 0;

  std::size_t n_bins() const { return density.size(); }
  double bin_left(std::size_t b) const { return bin_width * static_cast<double>(b); }
  double bin_right(std::size_t b) const { return bin_width * static_cast<double>(b + 1); }
};

/// Density histogram on [0, max_s) normalized over in-range values; values
/// >= max_s are counted in `overflow`. NaN entries are ignored.
Histogram spacing_histogram(std::span<const double> values, double bin_width = 0.1, double max_s = 4.0);

enum class ReferenceKind { GOE, GUE, Poisson };

const char* to_string(ReferenceKind kind);

/// Wigner surmises and the exponential law; unit mean and unit norm.
double spacing_density(ReferenceKind kind, double s);
/// Closed-form cumulative distribution of spacing_density.
double spacing_cdf(ReferenceKind kind, double s);

/// sum_b |h_b - P_b| * width with P_b the bin average of the reference density.
double distribution_distance(const Histogram& hist, ReferenceKind kind);
double distribution_distance(const Histogram& hist, const std::function<double(double, double)>& bin_average);

struct ReferenceR {
  double mean_r = 0.0;
  double stderr_r = 0.0;
  std::uint64_t n_values = 0;
};

/// Monte Carlo <r>: central half of random GOE/GUE spectra of the given size,
/// or i.i.d. exponential spacings (matrix_size spacings per sample) for Poisson.
ReferenceR reference_mean_r(ReferenceKind kind, int matrix_size, int n_samples, std::uint64_t seed = 1);

}  // namespace twopoint
