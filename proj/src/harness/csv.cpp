#include "twopoint/harness/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <limits>

namespace twopoint::harness {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_field(const std::string& s, const std::string& where) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error("csv: malformed field '" + s + "' at " + where);
  return v;
}

double parse_double(const std::string& s, const std::string& where) {
  // from_chars rejects "nan"/"inf" spellings produced by printf on some platforms
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return parse_field<double>(s, where);
}

}  // namespace

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += sep;
    out += items[k];
  }
  return out;
}

void append_exponent_rows(std::string& out, std::uint64_t sample_id, std::int64_t state_index,
                          const ExponentRecord& rec) {
  char buf[160];
  for (std::size_t i = 0; i < rec.lambdas.size(); ++i) {
    const int len = std::snprintf(buf, sizeof buf, "%llu,%lld,%.17g,%zu,%.17g,%d\n",
                                  static_cast<unsigned long long>(sample_id), static_cast<long long>(state_index),
                                  rec.t, i + 1, rec.lambdas[i], rec.floored[i] ? 1 : 0);
    out.append(buf, static_cast<std::size_t>(len));
  }
}

std::vector<SpectrumRow> read_exponents(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("csv: cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kExponentHeader) {
    throw Error("csv: '" + path.string() + "' does not start with header " + kExponentHeader);
  }
  std::vector<SpectrumRow> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto where = path.filename().string() + ":" + std::to_string(lineno);
    const auto f = split_line(line);
    if (f.size() != 6) throw Error("csv: expected 6 fields at " + where);
    const auto sample = parse_field<std::uint64_t>(f[0], where);
    const auto state = parse_field<std::int64_t>(f[1], where);
    const double t = parse_double(f[2], where);
    const auto i = parse_field<std::size_t>(f[3], where);
    const double lambda = parse_double(f[4], where);
    const auto floored = parse_field<int>(f[5], where);

    if (i == 1) {
      out.push_back(SpectrumRow{sample, state, t, {}, {}});
    } else if (out.empty() || out.back().sample_id != sample || out.back().state_index != state ||
               out.back().t != t || out.back().lambdas.size() + 1 != i) {
      throw Error("csv: exponent index out of sequence at " + where);
    }
    out.back().lambdas.push_back(lambda);
    out.back().floored.push_back(floored != 0);
  }
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("csv: cannot open '" + path.string() + "'");
  CsvTable t;
  std::string line;
  if (std::getline(in, line)) t.header = split_line(line);
  while (std::getline(in, line)) {
    if (!line.empty()) t.rows.push_back(split_line(line));
  }
  return t;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::string text = join(table.header) + "\n";
  for (const auto& row : table.rows) text += join(row) + "\n";
  write_text_atomic(path, text);
}

}  // namespace twopoint::harness
