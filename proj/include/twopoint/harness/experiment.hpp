#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "twopoint/harness/config.hpp"
#include "twopoint/harness/csv.hpp"
#include "twopoint/statistics.hpp"

namespace twopoint::harness {

/// More than half of the samples failed (CLI exit code 3).
class NumericalFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

std::string software_version();

struct DroppedSample {
  std::uint64_t sample_id = 0;
  std::string reason;
};

struct RunManifest {
  ExperimentConfig config;
  std::vector<std::uint64_t> sample_seeds;
  std::string version;
  double wall_seconds = 0.0;
  std::uint64_t completed_samples = 0;
  std::vector<DroppedSample> dropped;
  std::uint64_t floored_exponents = 0;
  std::uint64_t exponent_rows = 0;
  /// Size of exponents.csv after the last completed sample (resume point).
  std::uint64_t exponents_bytes = 0;
  std::uint64_t realizations_bytes = 0;
  std::string status = "running";

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

struct RunOptions {
  /// Continue a killed run in the same output directory.
  bool resume = false;
  /// Progress messages; null for silence.
  std::ostream* log = nullptr;
};

/// Runs the full pipeline and writes exponents.csv, statistics and
/// manifest.json into cfg.output_dir. Throws ConfigError when the memory
/// estimate exceeds the budget and NumericalFailure when more than half of
/// the samples fail.
RunManifest run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Statistics for one time slice.
struct TimeStatistics {
  double t = 0.0;
  std::uint64_t n_spectra = 0;
  std::uint64_t dropped_spectra = 0;
  std::uint64_t dropped_separations = 0;
  GapRatioEnsemble ratios;
  Histogram histogram;
  /// L1 distances to GOE, GUE, Poisson.
  std::array<double, 3> distances{};
  /// Non-empty when the statistics for this t could not be formed.
  std::string error;
};

/// Unfolding, gap ratios, histograms and reference distances per t, in
/// order of first appearance in `rows`.
std::vector<TimeStatistics> compute_statistics(const ExperimentConfig& cfg, const std::vector<SpectrumRow>& rows);

/// gap_ratio.csv, spacing_hist_t<t>.csv, distances.csv, reference_curves.csv.
void write_statistics(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                      const std::vector<TimeStatistics>& stats);

std::string histogram_file_name(double t);

}  // namespace twopoint::harness
