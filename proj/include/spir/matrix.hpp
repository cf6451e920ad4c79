// Copyright 2026 The Staircase-PIR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spir/error.hpp"
#include "spir/field.hpp"

namespace spir {

/// Dense row-major matrix over a prime field.
class FieldMatrix {
 public:
  FieldMatrix(PrimeField field, std::size_t rows, std::size_t cols)
      : field_(field), rows_(rows), cols_(cols), entries_(rows * cols, field.zero()) {
    if (rows == 0 || cols == 0) {
      throw Error(ErrorCode::kDimensionMismatch, "matrix dimensions must be positive");
    }
  }

  /// Builds a matrix from nested integer rows; entries are reduced mod q.
  static FieldMatrix from_rows(PrimeField field,
                               std::initializer_list<std::initializer_list<std::uint64_t>> rows) {
    std::vector<std::vector<std::uint64_t>> tmp;
    for (const auto& r : rows) tmp.emplace_back(r);
    return from_rows(field, tmp);
  }

  static FieldMatrix from_rows(PrimeField field, const std::vector<std::vector<std::uint64_t>>& rows) {
    if (rows.empty() || rows.front().empty()) {
      throw Error(ErrorCode::kDimensionMismatch, "empty matrix");
    }
    FieldMatrix m(field, rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != m.cols_) {
        throw Error(ErrorCode::kDimensionMismatch, "ragged rows");
      }
      for (std::size_t c = 0; c < m.cols_; ++c) m.at(r, c) = field.element(rows[r][c]);
    }
    return m;
  }

  static FieldMatrix identity(PrimeField field, std::size_t n) {
    FieldMatrix m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = field.one();
    return m;
  }

  const PrimeField& field() const noexcept { return field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  FieldElement& at(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const FieldElement& at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<const FieldElement> row(std::size_t r) const {
    return {entries_.data() + r * cols_, cols_};
  }

  /// Rows `row_ids` crossed with columns `col_ids`, in the given orders.
  FieldMatrix submatrix(std::span<const std::size_t> row_ids, std::span<const std::size_t> col_ids) const {
    FieldMatrix out(field_, row_ids.size(), col_ids.size());
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
      for (std::size_t j = 0; j < col_ids.size(); ++j) {
        if (row_ids[i] >= rows_ || col_ids[j] >= cols_) {
          throw Error(ErrorCode::kOutOfRange, "submatrix index out of range");
        }
        out.at(i, j) = at(row_ids[i], col_ids[j]);
      }
    }
    return out;
  }

  /// Rows `row_ids` crossed with the leading `ncols` columns.
  FieldMatrix leading_columns(std::span<const std::size_t> row_ids, std::size_t ncols) const {
    std::vector<std::size_t> cols(ncols);
    for (std::size_t c = 0; c < ncols; ++c) cols[c] = c;
    return submatrix(row_ids, cols);
  }

  std::vector<std::uint64_t> values() const { return to_values(entries_); }

  friend bool operator==(const FieldMatrix&, const FieldMatrix&) = default;

  friend std::ostream& operator<<(std::ostream& os, const FieldMatrix& m) {
    for (std::size_t r = 0; r < m.rows_; ++r) {
      os << '[';
      for (std::size_t c = 0; c < m.cols_; ++c) os << (c ? " " : "") << m.at(r, c);
      os << "]\n";
    }
    return os;
  }

 private:
  PrimeField field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<FieldElement> entries_;
};

inline FieldMatrix matrix_mul(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.cols() != b.rows() || a.field() != b.field()) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix_mul shape/field mismatch");
  }
  FieldMatrix out(a.field(), a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const FieldElement s = a.at(i, l);
      if (s.is_zero()) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, j) += s * b.at(l, j);
    }
  }
  return out;
}

namespace detail {

/// In-place reduction to row echelon form with first-nonzero pivoting.
/// Returns the pivot column of each pivot row.
inline std::vector<std::size_t> row_reduce(FieldMatrix& m, std::size_t pivot_cols, bool reduced) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < pivot_cols && row < m.rows(); ++col) {
    std::size_t p = row;
    while (p < m.rows() && m.at(p, col).is_zero()) ++p;
    if (p == m.rows()) continue;
    if (p != row) {
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m.at(p, c), m.at(row, c));
    }
    const FieldElement inv = m.at(row, col).inverse();
    for (std::size_t c = col; c < m.cols(); ++c) m.at(row, c) *= inv;
    for (std::size_t r = reduced ? 0 : row + 1; r < m.rows(); ++r) {
      if (r == row) continue;
      const FieldElement f = m.at(r, col);
      if (f.is_zero()) continue;
      for (std::size_t c = col; c < m.cols(); ++c) m.at(r, c) -= f * m.at(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace detail

inline std::size_t matrix_rank(FieldMatrix m) {
  return detail::row_reduce(m, m.cols(), false).size();
}

/// Solves A X = B for square A. Throws Singular when A is not invertible.
inline FieldMatrix matrix_solve(const FieldMatrix& a, const FieldMatrix& b) {
  if (!a.is_square()) throw Error(ErrorCode::kDimensionMismatch, "matrix_solve needs square A");
  if (a.rows() != b.rows() || a.field() != b.field()) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix_solve shape/field mismatch");
  }
  const std::size_t n = a.rows();
  FieldMatrix aug(a.field(), n, n + b.cols());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug.at(r, c) = a.at(r, c);
    for (std::size_t c = 0; c < b.cols(); ++c) aug.at(r, n + c) = b.at(r, c);
  }
  if (detail::row_reduce(aug, n, true).size() != n) {
    throw Error(ErrorCode::kSingular, "matrix is singular");
  }
  FieldMatrix x(a.field(), n, b.cols());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < b.cols(); ++c) x.at(r, c) = aug.at(r, n + c);
  }
  return x;
}

inline FieldMatrix matrix_inverse(const FieldMatrix& a) {
  return matrix_solve(a, FieldMatrix::identity(a.field(), a.rows()));
}

inline bool is_invertible(const FieldMatrix& a) {
  return a.is_square() && matrix_rank(a) == a.rows();
}

/// Power-form Vandermonde: entry (l, c) = points[l]^c.
inline FieldMatrix vandermonde(const std::vector<FieldElement>& points, std::size_t cols) {
  if (points.empty() || cols == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "vandermonde needs points and columns");
  }
  const PrimeField field(points.front().modulus());
  if (cols > field.modulus() - 1) {
    throw Error(ErrorCode::kDimensionMismatch, "more columns than nonzero field elements");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].is_zero()) throw Error(ErrorCode::kZeroPoint, "zero evaluation point");
    for (std::size_t j = 0; j < i; ++j) {
      if (points[i] == points[j]) {
        throw Error(ErrorCode::kDuplicatePoint, "point " + std::to_string(points[i].value()) + " repeated");
      }
    }
  }
  FieldMatrix v(field, points.size(), cols);
  for (std::size_t l = 0; l < points.size(); ++l) {
    FieldElement p = field.one();
    for (std::size_t c = 0; c < cols; ++c) {
      v.at(l, c) = p;
      p *= points[l];
    }
  }
  return v;
}

/// n x n Vandermonde on the default points 1, 2, ..., n.
inline FieldMatrix default_vandermonde(const PrimeField& field, std::size_t n) {
  std::vector<FieldElement> pts;
  for (std::size_t i = 1; i <= n; ++i) pts.push_back(field.element(i));
  return vandermonde(pts, n);
}

/// Calls fn(subset) for every size-`size` subset of {0..n-1}, in
/// lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t size, Fn&& fn) {
  if (size > n) return;
  std::vector<std::size_t> idx(size);
  for (std::size_t i = 0; i < size; ++i) idx[i] = i;
  while (true) {
    fn(std::as_const(idx));
    if (size == 0) return;
    std::size_t i = size;
    while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace spir
