#include "twopoint/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "twopoint/types.hpp"

namespace twopoint {

std::vector<double> separations(std::span<const double> lambdas) {
  if (lambdas.size() < 2) throw Error("separations: need at least two exponents");
  std::vector<double> s(lambdas.size() - 1);
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
    if (!(lambdas[i] >= lambdas[i + 1])) {
      throw Error("separations: exponents are not sorted in descending order at index " + std::to_string(i));
    }
    s[i] = lambdas[i] - lambdas[i + 1];
  }
  return s;
}

SeparationTable fixed_i_unfold(const SeparationTable& samples) {
  if (samples.size() < 2) throw Error("fixed_i_unfold: need at least two samples");
  const std::size_t width = samples.front().size();
  for (const auto& row : samples) {
    if (row.size() != width) throw Error("fixed_i_unfold: samples have different numbers of separations");
  }
  std::vector<double> mean(width, 0.0);
  for (std::size_t i = 0; i < width; ++i) {
    MeanAccumulator acc;
    for (const auto& row : samples) {
      if (!std::isnan(row[i])) acc.add(row[i]);
    }
    if (acc.count() == 0 || !(acc.mean() > 0.0)) {
      throw Error("fixed_i_unfold: separation index " + std::to_string(i + 1) + " has zero mean over samples");
    }
    mean[i] = acc.mean();
  }
  SeparationTable out = samples;
  for (auto& row : out) {
    for (std::size_t i = 0; i < width; ++i) row[i] /= mean[i];
  }
  return out;
}

std::vector<double> rescale_shift(std::span<const double> lambdas) {
  const auto n = static_cast<double>(lambdas.size());
  if (lambdas.empty()) throw Error("rescale_shift: empty spectrum");
  double mean = 0.0;
  for (double x : lambdas) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : lambdas) ss += (x - mean) * (x - mean);
  if (!(ss > 0.0)) throw Error("rescale_shift: spectrum has zero variance");
  const double alpha = std::sqrt(n / ss);
  std::vector<double> out(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) out[i] = alpha * (lambdas[i] - mean);
  return out;
}

void MeanAccumulator::add(double x) {
  ++n_;
  sum_ += x;
  sum_sq_ += x * x;
}

void MeanAccumulator::merge(const MeanAccumulator& other) {
  n_ += other.n_;
  sum_ += other.sum_;
  sum_sq_ += other.sum_sq_;
}

double MeanAccumulator::mean() const {
  return n_ == 0 ? std::numeric_limits<double>::quiet_NaN() : sum_ / static_cast<double>(n_);
}

double MeanAccumulator::stderr_of_mean() const {
  if (n_ < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(n_);
  const double var = std::max(0.0, (sum_sq_ - sum_ * sum_ / n) / (n - 1.0));
  return std::sqrt(var / n);
}

GapRatioEnsemble gap_ratios(const SeparationTable& samples, double t) {
  GapRatioEnsemble g;
  g.t = t;
  MeanAccumulator acc;
  for (const auto& row : samples) {
    for (std::size_t i = 0; i + 1 < row.size(); ++i) {
      const double a = row[i];
      const double b = row[i + 1];
      if (std::isnan(a) || std::isnan(b)) continue;
      const double hi = std::max(a, b);
      if (hi == 0.0) {
        ++g.skipped_pairs;
        continue;
      }
      const double r = std::min(a, b) / hi;
      g.values.push_back(r);
      acc.add(r);
    }
  }
  g.mean_r = acc.mean();
  g.stderr_r = acc.stderr_of_mean();
  return g;
}

Histogram spacing_histogram(std::span<const double> values, double bin_width, double max_s) {
  if (!(bin_width > 0.0)) throw Error("spacing_histogram: bin width must be positive");
  if (!(max_s > 0.0)) throw Error("spacing_histogram: max_s must be positive");
  Histogram h;
  h.bin_width = bin_width;
  h.max_s = max_s;
  const auto n_bins = static_cast<std::size_t>(std::ceil(max_s / bin_width - 1e-9));
  h.counts.assign(n_bins, 0);
  h.density.assign(n_bins, 0.0);
  for (double v : values) {
    if (std::isnan(v)) continue;
    if (v >= max_s) {
      ++h.overflow;
      continue;
    }
    const auto b = std::min(n_bins - 1, static_cast<std::size_t>(std::max(0.0, std::floor(v / bin_width))));
    ++h.counts[b];
    ++h.in_range;
  }
  if (h.in_range > 0) {
    const double norm = 1.0 / (static_cast<double>(h.in_range) * bin_width);
    for (std::size_t b = 0; b < n_bins; ++b) h.density[b] = static_cast<double>(h.counts[b]) * norm;
  }
  return h;
}

const char* to_string(ReferenceKind kind) {
  switch (kind) {
    case ReferenceKind::GOE: return "goe";
    case ReferenceKind::GUE: return "gue";
    case ReferenceKind::Poisson: return "poisson";
  }
  return "?";
}

double spacing_density(ReferenceKind kind, double s) {
  using std::numbers::pi;
  if (s < 0.0) return 0.0;
  switch (kind) {
    case ReferenceKind::GOE: return pi / 2.0 * s * std::exp(-pi * s * s / 4.0);
    case ReferenceKind::GUE: return 32.0 / (pi * pi) * s * s * std::exp(-4.0 * s * s / pi);
    case ReferenceKind::Poisson: return std::exp(-s);
  }
  return 0.0;
}

double spacing_cdf(ReferenceKind kind, double s) {
  using std::numbers::pi;
  if (s <= 0.0) return 0.0;
  switch (kind) {
    case ReferenceKind::GOE: return -std::expm1(-pi * s * s / 4.0);
    case ReferenceKind::GUE: {
      const double a = 4.0 / pi;
      const double integral = std::sqrt(pi) / (4.0 * std::pow(a, 1.5)) * std::erf(std::sqrt(a) * s) -
                              s * std::exp(-a * s * s) / (2.0 * a);
      return 32.0 / (pi * pi) * integral;
    }
    case ReferenceKind::Poisson: return -std::expm1(-s);
  }
  return 0.0;
}

double distribution_distance(const Histogram& hist, const std::function<double(double, double)>& bin_average) {
  double d = 0.0;
  for (std::size_t b = 0; b < hist.n_bins(); ++b) {
    d += std::abs(hist.density[b] - bin_average(hist.bin_left(b), hist.bin_right(b))) * hist.bin_width;
  }
  return d;
}

double distribution_distance(const Histogram& hist, ReferenceKind kind) {
  return distribution_distance(
      hist, [kind](double l, double r) { return (spacing_cdf(kind, r) - spacing_cdf(kind, l)) / (r - l); });
}

}  // namespace twopoint
