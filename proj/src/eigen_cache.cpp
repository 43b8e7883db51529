#include "twopoint/eigen_cache.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace twopoint {
namespace {

template <class T>
void put_le(std::vector<unsigned char>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const auto bits = std::bit_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(U); ++b) out.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xff));
}

template <class T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) bits |= static_cast<U>(p[b]) << (8 * b);
  return std::bit_cast<T>(bits);
}

constexpr std::array<char, 4> kMagic{'C', '2', 'P', 'T'};

}  // namespace

void save_eigendecomposition(const EigenDecomposition& e, const std::filesystem::path& path) {
  const auto dim = static_cast<std::uint64_t>(e.dim());
  std::vector<unsigned char> buf;
  buf.reserve(24 + e.sector.size() + 8 * dim + 16 * dim * dim);
  buf.insert(buf.end(), kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(buf, kEigenCacheVersion);
  put_le<std::uint64_t>(buf, dim);
  put_le<std::uint32_t>(buf, e.real ? 1u : 0u);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(e.sector.size()));
  buf.insert(buf.end(), e.sector.begin(), e.sector.end());
  for (Eigen::Index k = 0; k < e.eigenvalues.size(); ++k) put_le<double>(buf, e.eigenvalues(k));
  for (Eigen::Index c = 0; c < e.eigenvectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < e.eigenvectors.rows(); ++r) {
      put_le<double>(buf, e.eigenvectors(r, c).real());
      put_le<double>(buf, e.eigenvectors(r, c).imag());
    }
  }
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("save_eigendecomposition: cannot open " + tmp);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("save_eigendecomposition: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

EigenDecomposition load_eigendecomposition(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_eigendecomposition: cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 16 || std::memcmp(buf.data(), kMagic.data(), 4) != 0) {
    throw Error("load_eigendecomposition: bad magic in " + path.string());
  }
  const auto version = get_le<std::uint32_t>(buf.data() + 4);
  if (version != kEigenCacheVersion) {
    throw Error("load_eigendecomposition: unsupported version " + std::to_string(version));
  }
  if (buf.size() < 24) throw Error("load_eigendecomposition: truncated header in " + path.string());
  const auto dim = get_le<std::uint64_t>(buf.data() + 8);
  const auto real_flag = get_le<std::uint32_t>(buf.data() + 16);
  const auto label_len = get_le<std::uint32_t>(buf.data() + 20);
  const std::uint64_t header = 24 + std::uint64_t{label_len};
  if (dim > (std::uint64_t{1} << 20) || label_len > 4096 || buf.size() != header + 8 * dim + 16 * dim * dim) {
    throw Error("load_eigendecomposition: size does not match header in " + path.string());
  }
  EigenDecomposition e;
  e.sector.assign(reinterpret_cast<const char*>(buf.data() + 24), label_len);
  e.real = real_flag != 0;
  const auto n = static_cast<Eigen::Index>(dim);
  e.eigenvalues.resize(n);
  e.eigenvectors.resize(n, n);
  const unsigned char* p = buf.data() + header;
  for (Eigen::Index k = 0; k < n; ++k, p += 8) e.eigenvalues(k) = get_le<double>(p);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r, p += 16) e.eigenvectors(r, c) = Complex(get_le<double>(p), get_le<double>(p + 8));
  }
  return e;
}

std::string eigen_cache_key(const std::string& model, const std::string& params, std::uint64_t seed,
                            const std::string& sector) {
  std::string key = model + "_" + params + "_" + std::to_string(seed) + "_" + sector + ".c2pt";
  for (auto& ch : key) {
    if (ch == '/' || ch == ' ' || ch == '=' || ch == ',') ch = '-';
  }
  return key;
}

}  // namespace twopoint
