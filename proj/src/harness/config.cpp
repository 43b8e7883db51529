#include "twopoint/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace twopoint::harness {
namespace {

const std::set<std::string> kKnownKeys = {
    "model",       "N",          "N_site",         "size",           "K",          "W",
    "master_seed", "n_samples",  "times",          "state_policy",   "exponent_policy",
    "rescale_shift", "drop_largest", "ratio_source", "probe",        "output_dir", "workers",
    "memory_budget_mb", "hist_bin_width", "hist_max_s", "degeneracy_tol", "cache_dir", "save_realizations"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out)) {
    throw ConfigError("config: '" + key + "' expects a finite number, got '" + v + "'");
  }
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<double> parse_times(const std::string& v) {
  if (v.rfind("log:", 0) == 0) {
    const auto parts = split(v.substr(4), ':');
    if (parts.size() != 3) throw ConfigError("config: times 'log:lo:hi:count' is malformed: '" + v + "'");
    const double lo = to_double("times", parts[0]);
    const double hi = to_double("times", parts[1]);
    const auto count = to_int("times", parts[2]);
    if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw ConfigError("config: invalid log time grid '" + v + "'");
    return log_grid(lo, hi, static_cast<int>(count));
  }
  std::vector<double> out;
  for (const auto& item : split(v, ',')) {
    if (item.empty()) continue;
    out.push_back(to_double("times", item));
  }
  return out;
}

StateSelection parse_states(const std::string& v) {
  StateSelection s;
  if (v == "all") {
    s.kind = StateSelection::Kind::All;
  } else if (v.rfind("central", 0) == 0) {
    s.kind = StateSelection::Kind::Central;
    if (v.size() > 7) {
      if (v[7] != ':' && v[7] != '(') throw ConfigError("config: state_policy '" + v + "' is malformed");
      std::string f = v.substr(8);
      if (!f.empty() && f.back() == ')') f.pop_back();
      s.fraction = to_double("state_policy", f);
    }
    if (!(s.fraction > 0.0 && s.fraction <= 1.0)) throw ConfigError("config: central fraction must lie in (0, 1]");
  } else if (v.rfind("product:", 0) == 0) {
    s.kind = StateSelection::Kind::Product;
    s.pattern = v.substr(8);
  } else {
    throw ConfigError("config: unknown state_policy '" + v + "' (all | central:<f> | product:<pattern>)");
  }
  return s;
}

std::string states_to_string(const StateSelection& s) {
  switch (s.kind) {
    case StateSelection::Kind::All: return "all";
    case StateSelection::Kind::Central: return "central:" + format_double(s.fraction);
    case StateSelection::Kind::Product: return "product:" + s.pattern;
  }
  return "all";
}

ExponentPolicy parse_exponents(const std::string& v) {
  if (v == "upper_half") return ExponentPolicy::UpperHalf;
  if (v == "lower_half") return ExponentPolicy::LowerHalf;
  if (v == "all") return ExponentPolicy::All;
  throw ConfigError("config: unknown exponent_policy '" + v + "' (upper_half | lower_half | all)");
}

std::string exponents_to_string(ExponentPolicy p) {
  switch (p) {
    case ExponentPolicy::UpperHalf: return "upper_half";
    case ExponentPolicy::LowerHalf: return "lower_half";
    case ExponentPolicy::All: return "all";
  }
  return "all";
}

ProbeKind parse_probe(const std::string& v) {
  if (v == "majorana") return ProbeKind::SykMajorana;
  if (v == "plus_minus") return ProbeKind::XxzPlusMinus;
  if (v == "zz") return ProbeKind::XxzZZ;
  throw ConfigError("config: unknown probe '" + v + "' (majorana | plus_minus | zz)");
}

std::string probe_to_string(ProbeKind p) {
  switch (p) {
    case ProbeKind::SykMajorana: return "majorana";
    case ProbeKind::XxzPlusMinus: return "plus_minus";
    case ProbeKind::XxzZZ: return "zz";
  }
  return "majorana";
}

}  // namespace

std::string format_double(double v) {
  // Shortest representation that round-trips.
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return {buf, p};
}

std::string model_name(Model m) { return m == Model::Syk ? "syk" : "xxz"; }

std::vector<double> log_grid(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || !(hi >= lo)) throw Error("log_grid: invalid range");
  if (count == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(lineno) + " of '" + path.string() + "' is not key = value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

ExperimentConfig parse_config(const KeyValues& kv) {
  for (const auto& [k, v] : kv) {
    if (!kKnownKeys.count(k)) throw ConfigError("config: unknown key '" + k + "'");
  }
  auto get = [&kv](const std::string& k) -> const std::string* {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };

  ExperimentConfig c;
  const auto* model = get("model");
  if (model == nullptr) throw ConfigError("config: 'model' is required (syk | xxz)");
  if (*model == "syk") {
    c.model = Model::Syk;
  } else if (*model == "xxz") {
    c.model = Model::Xxz;
  } else {
    throw ConfigError("config: unknown model '" + *model + "'");
  }
  const bool syk = c.model == Model::Syk;

  const char* size_key = syk ? "N" : "N_site";
  const char* wrong_size_key = syk ? "N_site" : "N";
  if (get(wrong_size_key)) throw ConfigError(std::string("config: '") + wrong_size_key + "' does not apply to model " + *model);
  const auto* size = get(size_key) ? get(size_key) : get("size");
  if (size == nullptr) throw ConfigError(std::string("config: '") + size_key + "' is required");
  c.size = static_cast<int>(to_int(size_key, *size));

  const char* coupling_key = syk ? "K" : "W";
  if (get(syk ? "W" : "K")) throw ConfigError(std::string("config: '") + (syk ? "W" : "K") + "' does not apply to model " + *model);
  if (const auto* v = get(coupling_key)) {
    c.coupling = to_double(coupling_key, *v);
  } else if (syk) {
    c.coupling = 1e-4;
  } else {
    throw ConfigError("config: 'W' is required for model xxz");
  }
  if (c.coupling < 0.0) throw ConfigError(std::string("config: '") + coupling_key + "' must be non-negative");

  if (syk) {
    if (c.size % 2 != 0) throw ConfigError("config: SYK N must be even, got " + std::to_string(c.size));
    if (c.size < 4 || c.size > kMaxSykN) {
      throw ConfigError("config: SYK N must lie in [4, " + std::to_string(kMaxSykN) + "], got " + std::to_string(c.size));
    }
    if (c.size % 8 == 4 && c.coupling == 0.0) {
      throw ConfigError("config: SYK with N = 4 mod 8 has a two-fold degenerate spectrum at K = 0; use K > 0 (e.g. 1e-4)");
    }
  } else {
    if (c.size < 2 || c.size > kMaxXxzSites) {
      throw ConfigError("config: XXZ N_site must lie in [2, " + std::to_string(kMaxXxzSites) + "], got " +
                        std::to_string(c.size));
    }
    if (c.size % 2 != 0) {
      throw ConfigError("config: XXZ N_site = " + std::to_string(c.size) + " is odd; an odd chain has no S_z = 0 sector");
    }
  }

  if (const auto* v = get("master_seed")) {
    const auto s = to_int("master_seed", *v);
    if (s < 0) throw ConfigError("config: master_seed must be non-negative");
    c.master_seed = static_cast<std::uint64_t>(s);
  }
  if (const auto* v = get("n_samples")) c.n_samples = static_cast<int>(to_int("n_samples", *v));
  if (c.n_samples < 1) throw ConfigError("config: n_samples must be >= 1");

  c.times = get("times") ? parse_times(*get("times")) : log_grid(0.1, 100.0, 25);
  if (c.times.empty()) throw ConfigError("config: times must not be empty");

  if (const auto* v = get("state_policy")) {
    c.states = parse_states(*v);
  } else if (syk) {
    c.states.kind = StateSelection::Kind::All;
  } else {
    c.states.kind = StateSelection::Kind::Central;
    c.states.fraction = 0.1;
  }
  if (c.states.kind == StateSelection::Kind::Product) {
    if (syk) throw ConfigError("config: product reference states are defined for the XXZ chain only");
    const auto& p = c.states.pattern;
    if (static_cast<int>(p.size()) != c.size || p.find_first_not_of("ud") != std::string::npos) {
      throw ConfigError("config: product pattern must have N_site characters from {u, d}");
    }
    if (std::count(p.begin(), p.end(), 'u') * 2 != static_cast<long>(p.size())) {
      throw ConfigError("config: product pattern '" + p + "' is not in the S_z = 0 sector");
    }
  }

  if (const auto* v = get("exponent_policy")) c.exponents = parse_exponents(*v);
  if (const auto* v = get("rescale_shift")) c.rescale_shift = to_bool("rescale_shift", *v);
  if (const auto* v = get("drop_largest")) c.drop_largest = to_bool("drop_largest", *v);
  if (const auto* v = get("ratio_source")) {
    if (*v == "unfolded") {
      c.ratio_source = RatioSource::Unfolded;
    } else if (*v == "raw") {
      c.ratio_source = RatioSource::Raw;
    } else {
      throw ConfigError("config: unknown ratio_source '" + *v + "' (unfolded | raw)");
    }
  }

  c.probe = syk ? ProbeKind::SykMajorana : ProbeKind::XxzPlusMinus;
  if (const auto* v = get("probe")) c.probe = parse_probe(*v);
  if (syk != (c.probe == ProbeKind::SykMajorana)) {
    throw ConfigError("config: probe '" + probe_to_string(c.probe) + "' does not apply to model " + *model);
  }

  if (const auto* v = get("output_dir")) c.output_dir = *v;
  if (const auto* v = get("workers")) c.workers = static_cast<int>(to_int("workers", *v));
  if (c.workers < 1) throw ConfigError("config: workers must be >= 1");
  if (const auto* v = get("memory_budget_mb")) c.memory_budget_mb = to_double("memory_budget_mb", *v);
  if (!(c.memory_budget_mb > 0.0)) throw ConfigError("config: memory_budget_mb must be positive");
  if (const auto* v = get("hist_bin_width")) c.hist_bin_width = to_double("hist_bin_width", *v);
  if (const auto* v = get("hist_max_s")) c.hist_max_s = to_double("hist_max_s", *v);
  if (!(c.hist_bin_width > 0.0) || !(c.hist_max_s > c.hist_bin_width)) {
    throw ConfigError("config: histogram needs 0 < hist_bin_width < hist_max_s");
  }
  if (const auto* v = get("degeneracy_tol")) c.degeneracy_tol = to_double("degeneracy_tol", *v);
  if (!(c.degeneracy_tol >= 0.0)) throw ConfigError("config: degeneracy_tol must be non-negative");
  if (const auto* v = get("cache_dir")) c.cache_dir = *v;
  if (const auto* v = get("save_realizations")) c.save_realizations = to_bool("save_realizations", *v);

  const int n = probe_count(c);
  if (c.exponents != ExponentPolicy::All && n % 2 != 0) {
    throw ConfigError("config: half exponent policies need an even number of probes");
  }
  return c;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) { return parse_config(read_key_values(path)); }

KeyValues to_key_values(const ExperimentConfig& c) {
  const bool syk = c.model == Model::Syk;
  KeyValues kv;
  kv["model"] = model_name(c.model);
  kv[syk ? "N" : "N_site"] = std::to_string(c.size);
  kv[syk ? "K" : "W"] = format_double(c.coupling);
  kv["master_seed"] = std::to_string(c.master_seed);
  kv["n_samples"] = std::to_string(c.n_samples);
  std::string times;
  for (std::size_t k = 0; k < c.times.size(); ++k) times += (k ? "," : "") + format_double(c.times[k]);
  kv["times"] = times;
  kv["state_policy"] = states_to_string(c.states);
  kv["exponent_policy"] = exponents_to_string(c.exponents);
  kv["rescale_shift"] = c.rescale_shift ? "true" : "false";
  kv["drop_largest"] = c.drop_largest ? "true" : "false";
  kv["ratio_source"] = c.ratio_source == RatioSource::Unfolded ? "unfolded" : "raw";
  kv["probe"] = probe_to_string(c.probe);
  kv["output_dir"] = c.output_dir;
  kv["workers"] = std::to_string(c.workers);
  kv["memory_budget_mb"] = format_double(c.memory_budget_mb);
  kv["hist_bin_width"] = format_double(c.hist_bin_width);
  kv["hist_max_s"] = format_double(c.hist_max_s);
  kv["degeneracy_tol"] = format_double(c.degeneracy_tol);
  if (!c.cache_dir.empty()) kv["cache_dir"] = c.cache_dir;
  kv["save_realizations"] = c.save_realizations ? "true" : "false";
  return kv;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : to_key_values(cfg)) out += k + " = " + v + "\n";
  return out;
}

int probe_count(const ExperimentConfig& cfg) { return cfg.size; }

double estimate_memory_bytes(const ExperimentConfig& cfg) {
  double dim = 0.0;
  double inter = 0.0;
  if (cfg.model == Model::Syk) {
    dim = std::ldexp(1.0, cfg.size / 2);
    inter = dim;
  } else {
    auto binom = [](int n, int k) {
      double r = 1.0;
      for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
      return r;
    };
    dim = binom(cfg.size, cfg.size / 2);
    inter = cfg.probe == ProbeKind::XxzPlusMinus ? binom(cfg.size, cfg.size / 2 - 1) : dim;
  }
  double n_states = dim;
  if (cfg.states.kind == StateSelection::Kind::Central) n_states = std::ceil(dim * cfg.states.fraction);
  if (cfg.states.kind == StateSelection::Kind::Product) n_states = 1.0;
  constexpr double complex_bytes = 16.0;
  // Hamiltonian, eigenvectors and solver workspace for both blocks, plus
  // probe banks (left and right) for every selected state.
  const double per_worker = complex_bytes * (4.0 * dim * dim + 4.0 * inter * inter) +
                            2.0 * complex_bytes * n_states * inter * cfg.size;
  return per_worker * cfg.workers;
}

}  // namespace twopoint::harness
