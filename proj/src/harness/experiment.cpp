#include "twopoint/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "twopoint/eigen_cache.hpp"
#include "twopoint/models.hpp"
#include "twopoint/operators.hpp"
#include "twopoint/rng.hpp"

namespace twopoint::harness {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
// Probe banks for one group of eigenstates are kept below this size.
constexpr double kBankBudgetBytes = 256.0 * 1024 * 1024;

struct ModelContext {
  std::optional<MajoranaSet> majoranas;
  std::optional<SectorBasis> state_sector;
  std::optional<SectorBasis> lowered_sector;
  ProbeSet probes;
};

ModelContext make_context(const ExperimentConfig& cfg) {
  ModelContext ctx;
  if (cfg.model == Model::Syk) {
    ctx.majoranas.emplace(cfg.size);
    ctx.probes = syk_probes(*ctx.majoranas);
    return ctx;
  }
  ctx.state_sector.emplace(sz_zero_sector(cfg.size));
  if (cfg.probe == ProbeKind::XxzPlusMinus) {
    ctx.lowered_sector.emplace(magnetization_sector(cfg.size, cfg.size / 2 - 1));
    ctx.probes = xxz_plus_minus_probes(cfg.size, *ctx.state_sector, *ctx.lowered_sector);
  } else {
    ctx.probes = xxz_zz_probes(cfg.size, *ctx.state_sector);
  }
  return ctx;
}

std::string params_string(const ExperimentConfig& cfg) {
  if (cfg.model == Model::Syk) return "N=" + std::to_string(cfg.size) + ",K=" + format_double(cfg.coupling);
  return "N_site=" + std::to_string(cfg.size) + ",W=" + format_double(cfg.coupling);
}

EigenDecomposition obtain_eigen(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& sector,
                                const std::function<OperatorMatrix()>& build) {
  if (cfg.cache_dir.empty()) return diagonalize(build(), sector);
  const fs::path path = fs::path(cfg.cache_dir) / eigen_cache_key(model_name(cfg.model), params_string(cfg), seed, sector);
  if (fs::exists(path)) return load_eigendecomposition(path);
  auto e = diagonalize(build(), sector);
  save_eigendecomposition(e, path);
  return e;
}

struct SampleResult {
  std::uint64_t index = 0;
  std::string rows;
  std::string realization;
  std::uint64_t n_rows = 0;
  std::uint64_t floored = 0;
  std::string failure;
};

class SampleRunner {
 public:
  SampleRunner(const ExperimentConfig& cfg, const ModelContext& ctx) : cfg_(cfg), ctx_(ctx) {}

  SampleResult run(std::uint64_t index) const {
    SampleResult r;
    r.index = index;
    const auto seed = sample_seed(cfg_.master_seed, index);
    try {
      if (cfg_.model == Model::Syk) {
        const auto c = sample_syk(cfg_.size, cfg_.coupling, seed);
        if (cfg_.save_realizations) r.realization = to_json(c).dump();
        const auto e = obtain_eigen(cfg_, seed, "full", [&] { return build_syk_hamiltonian(c, *ctx_.majoranas); });
        emit(r, Dynamics(e), e);
      } else {
        const auto f = sample_xxz(cfg_.size, cfg_.coupling, seed);
        if (cfg_.save_realizations) r.realization = to_json(f).dump();
        const auto& sec = *ctx_.state_sector;
        const auto e0 = obtain_eigen(cfg_, seed, sec.label(), [&] { return build_xxz_hamiltonian(f, sec); });
        if (cfg_.probe == ProbeKind::XxzPlusMinus) {
          const auto& low = *ctx_.lowered_sector;
          const auto e1 = obtain_eigen(cfg_, seed, low.label(), [&] { return build_xxz_hamiltonian(f, low); });
          emit(r, Dynamics(e0, e1), e0);
        } else {
          emit(r, Dynamics(e0), e0);
        }
      }
      const std::uint64_t total = r.n_rows;
      if (total > 0 && 2 * r.floored > total) {
        throw NumericalError("underflow saturation: " + std::to_string(r.floored) + " of " + std::to_string(total) +
                             " exponents floored");
      }
    } catch (const Error& ex) {
      r.failure = ex.what();
      r.rows.clear();
      r.n_rows = 0;
      r.floored = 0;
    }
    return r;
  }

 private:
  void record(SampleResult& r, std::int64_t state, const CorrelationMatrix& g) const {
    const auto rec = exponent_spectrum(g);
    append_exponent_rows(r.rows, r.index, state, rec);
    r.n_rows += rec.lambdas.size();
    r.floored += static_cast<std::uint64_t>(std::count(rec.floored.begin(), rec.floored.end(), true));
  }

  void emit(SampleResult& r, const Dynamics& dyn, const EigenDecomposition& e) const {
    const auto& probes = ctx_.probes;
    if (cfg_.states.kind == StateSelection::Kind::Product) {
      const auto phi = reference_state(e, ProductState{cfg_.states.pattern}, &*ctx_.state_sector);
      const StateCorrelator corr(dyn, probes, phi, "product:" + cfg_.states.pattern);
      for (double t : cfg_.times) record(r, kNoStateIndex, corr.at(t));
      return;
    }
    if (has_degeneracy(e, cfg_.degeneracy_tol)) {
      throw NumericalError("degenerate spectrum: minimum level gap " + format_double(min_level_gap(e)) +
                           " below tolerance");
    }
    StatePolicy policy = AllStates{};
    if (cfg_.states.kind == StateSelection::Kind::Central) policy = CentralFraction{cfg_.states.fraction};
    const auto states = select_states(e, policy);

    const double per_state = 2.0 * 16.0 * static_cast<double>(dyn.intermediate().dim()) *
                             static_cast<double>(probes.size());
    const auto chunk = static_cast<std::size_t>(std::max(1.0, std::floor(kBankBudgetBytes / per_state)));
    for (std::size_t begin = 0; begin < states.size(); begin += chunk) {
      const auto end = std::min(states.size(), begin + chunk);
      const EigenstateCorrelator corr(dyn, probes, {states.begin() + begin, states.begin() + end});
      for (std::size_t pos = 0; pos < end - begin; ++pos) {
        for (double t : cfg_.times) record(r, corr.states()[pos], corr.at(pos, t));
      }
    }
  }

  const ExperimentConfig& cfg_;
  const ModelContext& ctx_;
};

/// Fields that change the produced numbers; used to validate a resume.
KeyValues result_keys(const ExperimentConfig& cfg) {
  auto kv = to_key_values(cfg);
  kv.erase("output_dir");
  kv.erase("workers");
  kv.erase("cache_dir");
  kv.erase("memory_budget_mb");
  return kv;
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
  write_text_atomic(dir / "manifest.json", m.to_json().dump(2) + "\n");
}

}  // namespace

std::string software_version() { return kVersion; }

json RunManifest::to_json() const {
  json j;
  j["version"] = version;
  j["status"] = status;
  j["config"] = to_key_values(config);
  j["master_seed"] = config.master_seed;
  j["sample_seeds"] = sample_seeds;
  j["wall_seconds"] = wall_seconds;
  j["completed_samples"] = completed_samples;
  j["exponent_rows"] = exponent_rows;
  j["floored_exponents"] = floored_exponents;
  j["exponents_bytes"] = exponents_bytes;
  j["realizations_bytes"] = realizations_bytes;
  json d = json::array();
  for (const auto& s : dropped) d.push_back({{"sample_id", s.sample_id}, {"reason", s.reason}});
  j["dropped_samples"] = d;
  j["dropped_count"] = dropped.size();
  return j;
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.version = j.at("version").get<std::string>();
  m.status = j.at("status").get<std::string>();
  m.config = parse_config(j.at("config").get<KeyValues>());
  m.sample_seeds = j.at("sample_seeds").get<std::vector<std::uint64_t>>();
  m.wall_seconds = j.at("wall_seconds").get<double>();
  m.completed_samples = j.at("completed_samples").get<std::uint64_t>();
  m.exponent_rows = j.at("exponent_rows").get<std::uint64_t>();
  m.floored_exponents = j.at("floored_exponents").get<std::uint64_t>();
  m.exponents_bytes = j.at("exponents_bytes").get<std::uint64_t>();
  m.realizations_bytes = j.at("realizations_bytes").get<std::uint64_t>();
  for (const auto& d : j.at("dropped_samples")) {
    m.dropped.push_back({d.at("sample_id").get<std::uint64_t>(), d.at("reason").get<std::string>()});
  }
  return m;
}

RunManifest run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const double estimate_mb = estimate_memory_bytes(cfg) / (1024.0 * 1024.0);
  if (estimate_mb > cfg.memory_budget_mb) {
    throw ConfigError("estimated peak memory " + format_double(std::ceil(estimate_mb)) + " MB exceeds memory_budget_mb = " +
                      format_double(cfg.memory_budget_mb));
  }

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  if (!cfg.cache_dir.empty()) fs::create_directories(cfg.cache_dir);
  const auto exponents_path = dir / "exponents.csv";
  const auto realizations_path = dir / "realizations.jsonl";

  RunManifest m;
  m.config = cfg;
  m.version = kVersion;
  const auto n_samples = static_cast<std::uint64_t>(cfg.n_samples);
  for (std::uint64_t k = 0; k < n_samples; ++k) m.sample_seeds.push_back(sample_seed(cfg.master_seed, k));

  double prior_seconds = 0.0;
  bool fresh = true;
  if (opts.resume && fs::exists(dir / "manifest.json") && fs::exists(exponents_path)) {
    std::ifstream in(dir / "manifest.json");
    const auto old = RunManifest::from_json(json::parse(in));
    if (result_keys(old.config) != result_keys(cfg)) {
      throw ConfigError("resume: configuration in '" + dir.string() + "' differs from the requested one");
    }
    m.completed_samples = old.completed_samples;
    m.dropped = old.dropped;
    m.floored_exponents = old.floored_exponents;
    m.exponent_rows = old.exponent_rows;
    m.exponents_bytes = old.exponents_bytes;
    m.realizations_bytes = old.realizations_bytes;
    prior_seconds = old.wall_seconds;
    fs::resize_file(exponents_path, m.exponents_bytes);
    if (cfg.save_realizations && fs::exists(realizations_path)) fs::resize_file(realizations_path, m.realizations_bytes);
    fresh = false;
    if (opts.log) *opts.log << "resuming at sample " << m.completed_samples << " of " << n_samples << "\n";
  }

  std::ofstream exponents(exponents_path, std::ios::binary | (fresh ? std::ios::trunc : std::ios::app));
  if (!exponents) throw Error("cannot write '" + exponents_path.string() + "'");
  if (fresh) {
    const std::string header = std::string(kExponentHeader) + "\n";
    exponents << header;
    m.exponents_bytes = header.size();
  }
  std::ofstream realizations;
  if (cfg.save_realizations) {
    realizations.open(realizations_path, std::ios::binary | (fresh ? std::ios::trunc : std::ios::app));
    if (!realizations) throw Error("cannot write '" + realizations_path.string() + "'");
  }

  const ModelContext ctx = make_context(cfg);
  const SampleRunner runner(cfg, ctx);

  auto elapsed = [&] {
    return prior_seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  // Workers compute samples in any order; the coordinator (this thread)
  // writes them strictly by sample index so the output is independent of
  // scheduling. The window bounds how far workers may run ahead.
  std::mutex mu;
  std::condition_variable cv;
  std::map<std::uint64_t, SampleResult> done;
  std::uint64_t next = m.completed_samples;
  std::uint64_t flushed = m.completed_samples;
  bool stop = false;
  std::exception_ptr fatal;
  const auto window = static_cast<std::uint64_t>(2 * cfg.workers);

  auto worker = [&] {
    while (true) {
      std::uint64_t idx = 0;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return stop || next >= n_samples || next < flushed + window; });
        if (stop || next >= n_samples) return;
        idx = next++;
      }
      SampleResult r;
      try {
        r = runner.run(idx);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!fatal) fatal = std::current_exception();
        stop = true;
        cv.notify_all();
        return;
      }
      std::lock_guard lock(mu);
      done.emplace(idx, std::move(r));
      cv.notify_all();
    }
  };

  std::vector<std::jthread> pool;
  const auto n_workers = std::min<std::uint64_t>(static_cast<std::uint64_t>(cfg.workers),
                                                 std::max<std::uint64_t>(1, n_samples - m.completed_samples));
  for (std::uint64_t w = 0; w < n_workers && m.completed_samples < n_samples; ++w) pool.emplace_back(worker);

  bool aborted = false;
  while (flushed < n_samples) {
    SampleResult r;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return fatal || done.count(flushed); });
      if (fatal) break;
      r = std::move(done.at(flushed));
      done.erase(flushed);
    }
    if (r.failure.empty()) {
      exponents << r.rows;
      m.exponents_bytes += r.rows.size();
      m.exponent_rows += r.n_rows;
      m.floored_exponents += r.floored;
    } else {
      m.dropped.push_back({r.index, r.failure});
      if (opts.log) *opts.log << "sample " << r.index << " dropped: " << r.failure << "\n";
    }
    if (realizations.is_open() && !r.realization.empty()) {
      realizations << r.realization << "\n";
      m.realizations_bytes += r.realization.size() + 1;
      realizations.flush();
    }
    exponents.flush();
    if (!exponents) throw Error("write failed for '" + exponents_path.string() + "'");
    m.completed_samples = r.index + 1;
    m.wall_seconds = elapsed();
    aborted = 2 * m.dropped.size() > n_samples;
    if (aborted) m.status = "numerical_failure";
    write_manifest(dir, m);
    if (opts.log && (m.completed_samples % 50 == 0 || m.completed_samples == n_samples)) {
      *opts.log << "completed " << m.completed_samples << " / " << n_samples << " samples\n";
    }
    std::lock_guard lock(mu);
    ++flushed;
    if (aborted) stop = true;
    cv.notify_all();
    if (aborted) break;
  }
  {
    std::lock_guard lock(mu);
    stop = true;
    cv.notify_all();
  }
  pool.clear();
  if (fatal) std::rethrow_exception(fatal);
  exponents.close();
  if (aborted) {
    throw NumericalFailure(std::to_string(m.dropped.size()) + " of " + std::to_string(n_samples) +
                           " samples failed; first reason: " + m.dropped.front().reason);
  }

  const auto stats = compute_statistics(cfg, read_exponents(exponents_path));
  write_statistics(dir, cfg, stats);
  m.status = "complete";
  m.wall_seconds = elapsed();
  write_manifest(dir, m);
  return m;
}

std::vector<TimeStatistics> compute_statistics(const ExperimentConfig& cfg, const std::vector<SpectrumRow>& rows) {
  std::vector<double> order;
  std::map<double, std::vector<const SpectrumRow*>> by_t;
  for (const auto& row : rows) {
    auto [it, inserted] = by_t.try_emplace(row.t);
    if (inserted) order.push_back(row.t);
    it->second.push_back(&row);
  }

  std::vector<TimeStatistics> out;
  for (double t : order) {
    TimeStatistics ts;
    ts.t = t;
    SeparationTable table;
    for (const auto* row : by_t.at(t)) {
      const auto [b, e] = exponent_range(row->lambdas.size(), cfg.exponents);
      std::vector<double> lam(row->lambdas.begin() + static_cast<std::ptrdiff_t>(b),
                              row->lambdas.begin() + static_cast<std::ptrdiff_t>(e));
      std::vector<bool> fl(row->floored.begin() + static_cast<std::ptrdiff_t>(b),
                           row->floored.begin() + static_cast<std::ptrdiff_t>(e));
      if (cfg.drop_largest && !lam.empty()) {
        lam.erase(lam.begin());
        fl.erase(fl.begin());
      }
      if (cfg.rescale_shift) {
        if (std::find(fl.begin(), fl.end(), true) != fl.end()) {
          ++ts.dropped_spectra;
          continue;
        }
        try {
          lam = rescale_shift(lam);
        } catch (const Error&) {
          ++ts.dropped_spectra;
          continue;
        }
      }
      auto s = separations(lam);
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (fl[k] || fl[k + 1]) {
          s[k] = kDropped;
          ++ts.dropped_separations;
        }
      }
      table.push_back(std::move(s));
      ++ts.n_spectra;
    }

    try {
      const auto unfolded = fixed_i_unfold(table);
      ts.ratios = gap_ratios(cfg.ratio_source == RatioSource::Unfolded ? unfolded : table, t);
      std::vector<double> flat;
      for (const auto& r : unfolded) flat.insert(flat.end(), r.begin(), r.end());
      ts.histogram = spacing_histogram(flat, cfg.hist_bin_width, cfg.hist_max_s);
      ts.distances = {distribution_distance(ts.histogram, ReferenceKind::GOE),
                      distribution_distance(ts.histogram, ReferenceKind::GUE),
                      distribution_distance(ts.histogram, ReferenceKind::Poisson)};
    } catch (const Error& ex) {
      ts.error = ex.what();
      ts.ratios = GapRatioEnsemble{};
      ts.ratios.t = t;
      ts.histogram = Histogram{};
    }
    out.push_back(std::move(ts));
  }
  return out;
}

std::string histogram_file_name(double t) { return "spacing_hist_t" + format_double(t) + ".csv"; }

void write_statistics(const fs::path& dir, const ExperimentConfig& cfg, const std::vector<TimeStatistics>& stats) {
  fs::create_directories(dir);
  const std::string nan = "nan";

  CsvTable ratio{{"t", "mean_r", "stderr", "n"}, {}};
  CsvTable dist{{"t", "l1_goe", "l1_gue", "l1_poisson", "n"}, {}};
  json summary = json::array();
  for (const auto& ts : stats) {
    const bool ok = ts.error.empty();
    ratio.rows.push_back({format_double(ts.t), ok ? format_double(ts.ratios.mean_r) : nan,
                          ok ? format_double(ts.ratios.stderr_r) : nan, std::to_string(ts.ratios.values.size())});
    dist.rows.push_back({format_double(ts.t), ok ? format_double(ts.distances[0]) : nan,
                         ok ? format_double(ts.distances[1]) : nan, ok ? format_double(ts.distances[2]) : nan,
                         std::to_string(ts.histogram.in_range)});

    CsvTable hist{{"bin_left", "bin_right", "density"}, {}};
    for (std::size_t b = 0; b < ts.histogram.n_bins(); ++b) {
      hist.rows.push_back({format_double(ts.histogram.bin_left(b)), format_double(ts.histogram.bin_right(b)),
                           format_double(ts.histogram.density[b])});
    }
    write_csv(dir / histogram_file_name(ts.t), hist);

    json s{{"t", ts.t},
           {"n_spectra", ts.n_spectra},
           {"dropped_spectra", ts.dropped_spectra},
           {"dropped_separations", ts.dropped_separations},
           {"skipped_pairs", ts.ratios.skipped_pairs},
           {"histogram_overflow", ts.histogram.overflow}};
    if (!ok) s["error"] = ts.error;
    summary.push_back(s);
  }
  write_csv(dir / "gap_ratio.csv", ratio);
  write_csv(dir / "distances.csv", dist);
  write_text_atomic(dir / "statistics.json", summary.dump(2) + "\n");

  CsvTable ref{{"bin_left", "bin_right", "goe", "gue", "poisson"}, {}};
  const auto n_bins = static_cast<std::size_t>(std::llround(cfg.hist_max_s / cfg.hist_bin_width));
  for (std::size_t b = 0; b < n_bins; ++b) {
    const double lo = cfg.hist_bin_width * static_cast<double>(b);
    const double hi = cfg.hist_bin_width * static_cast<double>(b + 1);
    std::vector<std::string> row{format_double(lo), format_double(hi)};
    for (auto kind : {ReferenceKind::GOE, ReferenceKind::GUE, ReferenceKind::Poisson}) {
      row.push_back(format_double((spacing_cdf(kind, hi) - spacing_cdf(kind, lo)) / (hi - lo)));
    }
    ref.rows.push_back(std::move(row));
  }
  write_csv(dir / "reference_curves.csv", ref);
}

}  // namespace twopoint::harness
