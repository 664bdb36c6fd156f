// Copyright 2026 The imufs Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense row-major matrix of doubles and the handful of products the solver
// needs. All inner loops go through imufs::kernels.

#include <cstddef>
#include <span>
#include <vector>

namespace imufs {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& storage() const { return data_; }

  void fill(double v);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix transpose(const Matrix& a);

// a * b
Matrix multiply(const Matrix& a, const Matrix& b);
// a^T * b
Matrix multiply_tn(const Matrix& a, const Matrix& b);
// a * b^T
Matrix multiply_nt(const Matrix& a, const Matrix& b);

double frobenius_sq(const Matrix& a);
// sum_ij a_ij * b_ij
double inner(const Matrix& a, const Matrix& b);
// Euclidean norm of every row.
std::vector<double> row_norms(const Matrix& a);
// ||a - b||_inf over entries; shapes must match.
double max_abs_diff(const Matrix& a, const Matrix& b);

// Copies the listed columns of a, in order.
Matrix select_columns(const Matrix& a, std::span<const std::size_t> cols);

}  // namespace imufs
