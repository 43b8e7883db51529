// Command-line driver: run, sweep, reference, stats.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "twopoint/harness/config.hpp"
#include "twopoint/harness/csv.hpp"
#include "twopoint/harness/experiment.hpp"
#include "twopoint/harness/sweep.hpp"
#include "twopoint/statistics.hpp"

namespace fs = std::filesystem;
using namespace twopoint;
using namespace twopoint::harness;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

const std::vector<std::string> kConfigKeys = {
    "model",          "N",          "N_site",     "K",          "W",
    "master_seed",    "n_samples",  "times",      "state_policy", "exponent_policy",
    "rescale_shift",  "drop_largest", "ratio_source", "probe",  "output_dir",
    "workers",        "memory_budget_mb", "hist_bin_width", "hist_max_s", "degeneracy_tol",
    "cache_dir",      "save_realizations"};

/// Config file values with command-line flags layered on top.
struct ConfigSource {
  std::string path;
  std::map<std::string, std::string> flags;

  void attach(CLI::App* app) {
    app->add_option("--config", path, "key = value configuration file");
    for (const auto& key : kConfigKeys) {
      app->add_option("--" + key, flags[key], "config key '" + key + "'");
    }
  }

  KeyValues resolve() const {
    KeyValues kv;
    if (!path.empty()) kv = read_key_values(path);
    for (const auto& [k, v] : flags) {
      if (!v.empty()) kv[k] = v;
    }
    return kv;
  }
};

int run_reference(const std::string& kind_name, int matrix_size, int samples, std::uint64_t seed,
                  double bin_width, double max_s, const std::string& out_dir) {
  std::vector<ReferenceKind> kinds;
  if (kind_name == "all") {
    kinds = {ReferenceKind::GOE, ReferenceKind::GUE, ReferenceKind::Poisson};
  } else if (kind_name == "goe") {
    kinds = {ReferenceKind::GOE};
  } else if (kind_name == "gue") {
    kinds = {ReferenceKind::GUE};
  } else if (kind_name == "poisson") {
    kinds = {ReferenceKind::Poisson};
  } else {
    throw ConfigError("reference: unknown kind '" + kind_name + "' (goe | gue | poisson | all)");
  }
  if (matrix_size < 4 || samples < 1) throw ConfigError("reference: need matrix-size >= 4 and samples >= 1");
  if (!(bin_width > 0.0) || !(max_s > bin_width)) throw ConfigError("reference: need 0 < bin-width < max-s");

  CsvTable values{{"kind", "mean_r", "stderr", "n_values", "matrix_size", "samples"}, {}};
  for (auto kind : kinds) {
    const auto r = reference_mean_r(kind, matrix_size, samples, seed);
    values.rows.push_back({to_string(kind), format_double(r.mean_r), format_double(r.stderr_r),
                           std::to_string(r.n_values), std::to_string(matrix_size), std::to_string(samples)});
    std::printf("%-8s <r> = %.5f +- %.5f  (%llu ratios)\n", to_string(kind), r.mean_r, r.stderr_r,
                static_cast<unsigned long long>(r.n_values));
  }

  CsvTable curves{{"s", "goe", "gue", "poisson"}, {}};
  CsvTable binned{{"bin_left", "bin_right", "goe", "gue", "poisson"}, {}};
  const auto n_bins = static_cast<int>(std::llround(max_s / bin_width));
  for (int b = 0; b <= 10 * n_bins; ++b) {
    const double s = bin_width * b / 10.0;
    curves.rows.push_back({format_double(s), format_double(spacing_density(ReferenceKind::GOE, s)),
                           format_double(spacing_density(ReferenceKind::GUE, s)),
                           format_double(spacing_density(ReferenceKind::Poisson, s))});
  }
  for (int b = 0; b < n_bins; ++b) {
    const double lo = bin_width * b;
    const double hi = bin_width * (b + 1);
    std::vector<std::string> row{format_double(lo), format_double(hi)};
    for (auto kind : {ReferenceKind::GOE, ReferenceKind::GUE, ReferenceKind::Poisson}) {
      row.push_back(format_double((spacing_cdf(kind, hi) - spacing_cdf(kind, lo)) / bin_width));
    }
    binned.rows.push_back(std::move(row));
  }
  fs::create_directories(out_dir);
  write_csv(fs::path(out_dir) / "reference_r.csv", values);
  write_csv(fs::path(out_dir) / "reference_density.csv", curves);
  write_csv(fs::path(out_dir) / "reference_curves.csv", binned);
  return 0;
}

void print_summary(const fs::path& dir) {
  const auto table = read_csv(dir / "gap_ratio.csv");
  std::printf("%12s %10s %10s %10s\n", "t", "mean_r", "stderr", "n");
  for (const auto& row : table.rows) {
    std::printf("%12s %10.5s %10.5s %10s\n", row[0].c_str(), row[1].c_str(), row[2].c_str(), row[3].c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-point correlation exponent statistics for SYK and XXZ models"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment");
  ConfigSource run_cfg;
  run_cfg.attach(run);
  bool resume = false;
  bool quiet = false;
  run->add_flag("--resume", resume, "continue a killed run in the same output directory");
  run->add_flag("--quiet", quiet, "suppress progress output");

  auto* sweep = app.add_subcommand("sweep", "run a parameter grid and merge the gap-ratio tables");
  ConfigSource sweep_cfg;
  sweep_cfg.attach(sweep);
  std::vector<std::string> axes;
  sweep->add_option("--vary", axes, "swept key, key=v1,v2,... (repeatable)");

  auto* reference = app.add_subcommand("reference", "random-matrix reference values and curves");
  std::string ref_kind = "all";
  int ref_size = 400;
  int ref_samples = 200;
  std::uint64_t ref_seed = 1;
  double ref_width = 0.1;
  double ref_max = 4.0;
  std::string ref_out = "reference";
  reference->add_option("--kind", ref_kind, "goe | gue | poisson | all");
  reference->add_option("--matrix-size", ref_size, "matrix size (spacings per sample for poisson)");
  reference->add_option("--samples", ref_samples, "Monte Carlo samples");
  reference->add_option("--seed", ref_seed, "master seed");
  reference->add_option("--bin-width", ref_width, "histogram bin width");
  reference->add_option("--max-s", ref_max, "histogram upper edge");
  reference->add_option("--output-dir", ref_out, "output directory");

  auto* stats = app.add_subcommand("stats", "recompute statistics from an exponents.csv");
  ConfigSource stats_cfg;
  stats_cfg.attach(stats);
  std::string stats_input;
  stats->add_option("--input", stats_input, "exponents.csv (default: <output_dir>/exponents.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      const auto cfg = parse_config(run_cfg.resolve());
      RunOptions opts;
      opts.resume = resume;
      opts.log = quiet ? nullptr : &std::cerr;
      const auto m = run_experiment(cfg, opts);
      if (!quiet) {
        std::cerr << "done: " << m.completed_samples - m.dropped.size() << " samples kept, " << m.dropped.size()
                  << " dropped, " << m.floored_exponents << " floored exponents, " << m.wall_seconds << " s\n";
        print_summary(cfg.output_dir);
      }
      return 0;
    }
    if (*sweep) {
      auto kv = sweep_cfg.resolve();
      const fs::path out = kv.count("output_dir") ? kv["output_dir"] : "sweep";
      std::vector<SweepAxis> parsed;
      for (const auto& a : axes) parsed.push_back(parse_axis(a));
      RunOptions opts;
      opts.log = &std::cerr;
      const auto result = run_sweep(kv, parsed, out, opts);
      std::cerr << "sweep: " << result.points.size() << " points, " << result.table.rows.size() << " rows -> "
                << (out / "sweep.csv").string() << "\n";
      return 0;
    }
    if (*reference) {
      return run_reference(ref_kind, ref_size, ref_samples, ref_seed, ref_width, ref_max, ref_out);
    }
    if (*stats) {
      // Without a model the configuration comes from the run's manifest,
      // with any given flags on top.
      auto kv = stats_cfg.resolve();
      const fs::path manifest = fs::path(kv.count("output_dir") ? kv["output_dir"] : "out") / "manifest.json";
      if (!kv.count("model") && fs::exists(manifest)) {
        std::ifstream in(manifest);
        auto base = nlohmann::json::parse(in).at("config").get<KeyValues>();
        for (const auto& [k, v] : kv) base[k] = v;
        kv = std::move(base);
      }
      const auto cfg = parse_config(kv);
      const fs::path input = stats_input.empty() ? fs::path(cfg.output_dir) / "exponents.csv" : fs::path(stats_input);
      write_statistics(cfg.output_dir, cfg, compute_statistics(cfg, read_exponents(input)));
      print_summary(cfg.output_dir);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
