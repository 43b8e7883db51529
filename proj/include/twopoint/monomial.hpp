#pragma once

#include <cstdint>
#include <vector>

#include "twopoint/types.hpp"

namespace twopoint {

/// Linear map with at most one nonzero entry per column.
///
/// Pauli strings, Majorana operators and single-site spin operators restricted
/// to magnetization sectors all have this shape, so products and actions on
/// dense blocks cost O(rows * cols_of_block) instead of a full GEMM.
class MonomialMap {
 public:
  static constexpr std::int64_t kNone = -1;

  MonomialMap() = default;
  MonomialMap(std::int64_t rows, std::int64_t cols);

  /// Identity on `dim`.
  static MonomialMap identity(std::int64_t dim);

  /// Extracts the map from a dense matrix. Throws if a column has more than
  /// one entry with magnitude above `tol`.
  static MonomialMap from_dense(const OperatorMatrix& m, double tol = 0.0);

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }

  /// Row hit by column `c`, or kNone when the column is zero.
  std::int64_t target(std::int64_t c) const { return target_[static_cast<std::size_t>(c)]; }
  Complex value(std::int64_t c) const { return value_[static_cast<std::size_t>(c)]; }
  void set(std::int64_t c, std::int64_t row, Complex v);

  /// Zero-column entries are stored as kNone; values are kept as-is.
  bool is_injective() const;
  bool is_real() const;

  OperatorMatrix to_dense() const;
  MonomialMap adjoint() const;

  /// this * rhs
  MonomialMap compose(const MonomialMap& rhs) const;
  MonomialMap scaled(Complex s) const;

  StateVector apply(const StateVector& v) const;
  /// this * block for a dense block with rows() == cols().
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& block) const;
  /// Adds s * this into a dense accumulator of matching shape.
  void add_to(OperatorMatrix& acc, Complex s) const;

  bool operator==(const MonomialMap& other) const = default;

 private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<std::int64_t> target_;
  std::vector<Complex> value_;
};

}  // namespace twopoint
