#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "twopoint/correlator.hpp"

namespace twopoint::harness {

inline constexpr const char* kExponentHeader = "sample_id,state_index,t,i,lambda,floored";
inline constexpr const char* kGapRatioHeader = "t,mean_r,stderr,n";

/// Product reference states have no eigenstate index.
inline constexpr std::int64_t kNoStateIndex = -1;

/// One exponent spectrum read back from exponents.csv.
struct SpectrumRow {
  std::uint64_t sample_id = 0;
  std::int64_t state_index = 0;
  double t = 0.0;
  std::vector<double> lambdas;
  std::vector<bool> floored;
};

/// Appends the rows of one record (i is 1-based) to `out`.
void append_exponent_rows(std::string& out, std::uint64_t sample_id, std::int64_t state_index,
                          const ExponentRecord& rec);

/// Groups consecutive rows with equal (sample_id, state_index, t). Throws
/// Error on a wrong header, malformed line or out-of-order index i.
std::vector<SpectrumRow> read_exponents(const std::filesystem::path& path);

/// Header plus rows of a simple comma-separated table.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
/// Writes to a temporary file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

std::string join(const std::vector<std::string>& items, char sep = ',');

}  // namespace twopoint::harness
