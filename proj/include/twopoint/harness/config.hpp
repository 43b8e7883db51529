#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "twopoint/correlator.hpp"
#include "twopoint/types.hpp"

namespace twopoint::harness {

/// Invalid or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Model { Syk, Xxz };

struct StateSelection {
  enum class Kind { All, Central, Product };
  Kind kind = Kind::All;
  double fraction = 0.1;
  std::string pattern;

  bool operator==(const StateSelection&) const = default;
};

enum class RatioSource { Unfolded, Raw };

inline constexpr int kMaxSykN = 26;
inline constexpr int kMaxXxzSites = 16;

struct ExperimentConfig {
  Model model = Model::Syk;
  /// N for SYK, N_site for XXZ.
  int size = 0;
  /// K for SYK, W for XXZ.
  double coupling = 0.0;
  std::uint64_t master_seed = 1;
  int n_samples = 1;
  std::vector<double> times;
  StateSelection states;
  ExponentPolicy exponents = ExponentPolicy::UpperHalf;
  bool rescale_shift = false;
  bool drop_largest = false;
  RatioSource ratio_source = RatioSource::Unfolded;
  ProbeKind probe = ProbeKind::SykMajorana;
  std::string output_dir = "out";
  int workers = 1;
  double memory_budget_mb = 4096.0;
  double hist_bin_width = 0.1;
  double hist_max_s = 4.0;
  double degeneracy_tol = 1e-10;
  std::string cache_dir;
  bool save_realizations = false;

  bool operator==(const ExperimentConfig&) const = default;
};

using KeyValues = std::map<std::string, std::string>;

/// `count` log-spaced points from `lo` to `hi` inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

/// Reads `key = value` lines; '#' starts a comment.
KeyValues read_key_values(const std::filesystem::path& path);

/// Validates and fills defaults. Throws ConfigError with a descriptive message.
ExperimentConfig parse_config(const KeyValues& kv);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Canonical key=value text; parse_config(read(serialize(c))) == c.
std::string serialize_config(const ExperimentConfig& cfg);
KeyValues to_key_values(const ExperimentConfig& cfg);

/// Number of exponents per correlation matrix.
int probe_count(const ExperimentConfig& cfg);
/// Rough peak working-set estimate for one worker, in bytes.
double estimate_memory_bytes(const ExperimentConfig& cfg);

std::string format_double(double v);
std::string model_name(Model m);

}  // namespace twopoint::harness
