#include "twopoint/monomial.hpp"

#include <string>

namespace twopoint {

MonomialMap::MonomialMap(std::int64_t rows, std::int64_t cols)
    : rows_(rows),
      cols_(cols),
      target_(static_cast<std::size_t>(cols), kNone),
      value_(static_cast<std::size_t>(cols), Complex{0.0, 0.0}) {
  if (rows < 0 || cols < 0) throw Error("MonomialMap: negative shape");
}

MonomialMap MonomialMap::identity(std::int64_t dim) {
  MonomialMap m(dim, dim);
  for (std::int64_t c = 0; c < dim; ++c) m.set(c, c, 1.0);
  return m;
}

MonomialMap MonomialMap::from_dense(const OperatorMatrix& d, double tol) {
  MonomialMap m(d.rows(), d.cols());
  for (Eigen::Index c = 0; c < d.cols(); ++c) {
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
      if (std::abs(d(r, c)) <= tol) continue;
      if (m.target(c) != kNone) {
        throw Error("MonomialMap::from_dense: column " + std::to_string(c) +
                    " has more than one nonzero entry");
      }
      m.set(c, r, d(r, c));
    }
  }
  return m;
}

void MonomialMap::set(std::int64_t c, std::int64_t row, Complex v) {
  if (c < 0 || c >= cols_) throw Error("MonomialMap::set: column out of range");
  if (row != kNone && (row < 0 || row >= rows_)) throw Error("MonomialMap::set: row out of range");
  target_[static_cast<std::size_t>(c)] = row;
  value_[static_cast<std::size_t>(c)] = row == kNone ? Complex{0.0, 0.0} : v;
}

bool MonomialMap::is_injective() const {
  std::vector<char> hit(static_cast<std::size_t>(rows_), 0);
  for (std::int64_t c = 0; c < cols_; ++c) {
    const auto r = target(c);
    if (r == kNone) continue;
    if (hit[static_cast<std::size_t>(r)]) return false;
    hit[static_cast<std::size_t>(r)] = 1;
  }
  return true;
}

bool MonomialMap::is_real() const {
  for (const auto& v : value_) {
    if (v.imag() != 0.0) return false;
  }
  return true;
}

OperatorMatrix MonomialMap::to_dense() const {
  OperatorMatrix d = OperatorMatrix::Zero(rows_, cols_);
  for (std::int64_t c = 0; c < cols_; ++c) {
    if (target(c) != kNone) d(target(c), c) = value(c);
  }
  return d;
}

MonomialMap MonomialMap::adjoint() const {
  if (!is_injective()) throw Error("MonomialMap::adjoint: map is not injective");
  MonomialMap a(cols_, rows_);
  for (std::int64_t c = 0; c < cols_; ++c) {
    if (target(c) != kNone) a.set(target(c), c, std::conj(value(c)));
  }
  return a;
}

MonomialMap MonomialMap::compose(const MonomialMap& rhs) const {
  if (cols_ != rhs.rows_) throw Error("MonomialMap::compose: shape mismatch");
  MonomialMap out(rows_, rhs.cols_);
  for (std::int64_t c = 0; c < rhs.cols_; ++c) {
    const auto mid = rhs.target(c);
    if (mid == kNone) continue;
    const auto r = target(mid);
    if (r == kNone) continue;
    out.set(c, r, value(mid) * rhs.value(c));
  }
  return out;
}

MonomialMap MonomialMap::scaled(Complex s) const {
  MonomialMap out = *this;
  for (auto& v : out.value_) v *= s;
  return out;
}

StateVector MonomialMap::apply(const StateVector& v) const {
  if (v.size() != cols_) throw Error("MonomialMap::apply: dimension mismatch");
  StateVector out = StateVector::Zero(rows_);
  for (std::int64_t c = 0; c < cols_; ++c) {
    if (target(c) != kNone) out(target(c)) += value(c) * v(c);
  }
  return out;
}

Eigen::MatrixXcd MonomialMap::apply(const Eigen::MatrixXcd& block) const {
  if (block.rows() != cols_) throw Error("MonomialMap::apply: dimension mismatch");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows_, block.cols());
  for (std::int64_t c = 0; c < cols_; ++c) {
    if (target(c) != kNone) out.row(target(c)) += value(c) * block.row(c);
  }
  return out;
}

void MonomialMap::add_to(OperatorMatrix& acc, Complex s) const {
  if (acc.rows() != rows_ || acc.cols() != cols_) throw Error("MonomialMap::add_to: shape mismatch");
  for (std::int64_t c = 0; c < cols_; ++c) {
    if (target(c) != kNone) acc(target(c), c) += s * value(c);
  }
}

}  // namespace twopoint
