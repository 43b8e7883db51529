#include "twopoint/harness/sweep.hpp"

#include <sstream>

namespace twopoint::harness {
namespace fs = std::filesystem;

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("sweep: axis '" + spec + "' is not key=v1,v2,...");
  SweepAxis axis{spec.substr(0, eq), {}};
  std::istringstream in(spec.substr(eq + 1));
  std::string v;
  while (std::getline(in, v, ',')) {
    if (!v.empty()) axis.values.push_back(v);
  }
  return axis;
}

std::vector<KeyValues> sweep_points(const std::vector<SweepAxis>& axes) {
  if (axes.empty()) return {};
  std::vector<KeyValues> points{KeyValues{}};
  for (const auto& axis : axes) {
    std::vector<KeyValues> grown;
    for (const auto& p : points) {
      for (const auto& v : axis.values) {
        auto q = p;
        q[axis.key] = v;
        grown.push_back(std::move(q));
      }
    }
    points = std::move(grown);
  }
  return points;
}

std::string point_label(const KeyValues& point, const std::vector<SweepAxis>& axes) {
  std::string label;
  for (const auto& axis : axes) {
    if (!label.empty()) label += "_";
    std::string v = point.at(axis.key);
    for (char& ch : v) {
      if (ch == '/' || ch == ':' || ch == ',') ch = '-';
    }
    label += axis.key + "=" + v;
  }
  return label;
}

CsvTable merge_gap_ratio_tables(const std::vector<SweepAxis>& axes, const std::vector<KeyValues>& points,
                                const std::vector<CsvTable>& tables) {
  CsvTable merged;
  for (const auto& axis : axes) merged.header.push_back(axis.key);
  const std::string expected = kGapRatioHeader;
  std::istringstream in(expected);
  for (std::string col; std::getline(in, col, ',');) merged.header.push_back(col);

  for (std::size_t p = 0; p < tables.size(); ++p) {
    if (join(tables[p].header) != expected) {
      throw Error("sweep: schema mismatch at point " + point_label(points.at(p), axes) + ": header '" +
                  join(tables[p].header) + "', expected '" + expected + "'");
    }
    for (const auto& row : tables[p].rows) {
      std::vector<std::string> out;
      for (const auto& axis : axes) out.push_back(points[p].at(axis.key));
      out.insert(out.end(), row.begin(), row.end());
      merged.rows.push_back(std::move(out));
    }
  }
  return merged;
}

SweepResult run_sweep(const KeyValues& base, const std::vector<SweepAxis>& axes, const fs::path& output_dir,
                      const RunOptions& opts) {
  SweepResult result;
  result.points = sweep_points(axes);
  std::vector<CsvTable> tables;
  for (const auto& point : result.points) {
    auto kv = base;
    for (const auto& [k, v] : point) kv[k] = v;
    kv["output_dir"] = (output_dir / point_label(point, axes)).string();
    const auto cfg = parse_config(kv);
    if (opts.log) *opts.log << "sweep point " << point_label(point, axes) << "\n";
    result.manifests.push_back(run_experiment(cfg, opts));
    tables.push_back(read_csv(fs::path(cfg.output_dir) / "gap_ratio.csv"));
  }
  result.table = merge_gap_ratio_tables(axes, result.points, tables);
  fs::create_directories(output_dir);
  write_csv(output_dir / "sweep.csv", result.table);
  return result;
}

}  // namespace twopoint::harness
