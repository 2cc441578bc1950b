#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace clc {

using Label = int;

// Dense row-major matrix of doubles. A default-constructed Matrix is the
// empty 0x0 value (used for empty subsets); every sized instance has at
// least one row and one column.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Rows of `m` at `indices`, in the given order. Empty index list gives the
// empty matrix.
Matrix gather_rows(const Matrix& m, std::span<const std::size_t> indices);

// One-hot encoding; throws InvalidInput on labels outside [0, classes).
Matrix one_hot(std::span<const Label> labels, std::size_t classes);

// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
// transpose(a) * b
Matrix matmul_at_b(const Matrix& a, const Matrix& b);
// a * transpose(b)
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);

bool all_finite(const Matrix& m);

}  // namespace clc
