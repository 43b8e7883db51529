#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "twopoint/spectral.hpp"

namespace twopoint {

/// Binary eigendecomposition cache, little-endian:
///   "C2PT" | u32 version | u64 dim | f64[dim] eigenvalues |
///   (f64 re, f64 im)[dim*dim] eigenvectors, column-major.
inline constexpr std::uint32_t kEigenCacheVersion = 1;

void save_eigendecomposition(const EigenDecomposition& e, const std::filesystem::path& path);
/// Throws Error on a malformed or truncated file.
EigenDecomposition load_eigendecomposition(const std::filesystem::path& path);

/// File name for a cache entry keyed by (model, params, seed, sector).
std::string eigen_cache_key(const std::string& model, const std::string& params, std::uint64_t seed,
                            const std::string& sector);

}  // namespace twopoint
