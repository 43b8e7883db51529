#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "twopoint/harness/config.hpp"
#include "twopoint/harness/csv.hpp"
#include "twopoint/harness/experiment.hpp"

namespace twopoint::harness {

/// One swept key and its values, e.g. {"N", {"8", "10", "12"}}.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// Parses "key=v1,v2,...".
SweepAxis parse_axis(const std::string& spec);

/// Cartesian product of the axes, first axis slowest. Empty when there are
/// no axes or any axis has no values.
std::vector<KeyValues> sweep_points(const std::vector<SweepAxis>& axes);

/// Subdirectory name for a grid point, e.g. "N=8_K=0.0001".
std::string point_label(const KeyValues& point, const std::vector<SweepAxis>& axes);

/// Prefixes every gap_ratio.csv row with the point's swept values. Throws
/// Error when a table's header differs from kGapRatioHeader.
CsvTable merge_gap_ratio_tables(const std::vector<SweepAxis>& axes, const std::vector<KeyValues>& points,
                                const std::vector<CsvTable>& tables);

struct SweepResult {
  std::vector<KeyValues> points;
  std::vector<RunManifest> manifests;
  CsvTable table;
};

/// Runs every grid point into output_dir/<label>/ and writes output_dir/sweep.csv.
SweepResult run_sweep(const KeyValues& base, const std::vector<SweepAxis>& axes, const std::filesystem::path& output_dir,
                      const RunOptions& opts = {});

}  // namespace twopoint::harness
