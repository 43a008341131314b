#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "annplan/error.hpp"

namespace annplan {

// Row-major dense matrix of doubles; just enough surface for the learners.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m;
    for (const auto& r : rows) m.push_row(r);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_.data() + i * cols_, cols_);
  }
  std::span<double> row_mut(std::size_t i) {
    return std::span<double>(data_.data() + i * cols_, cols_);
  }
  double& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  void push_row(std::span<const double> r) {
    if (rows_ == 0) {
      cols_ = r.size();
    } else if (r.size() != cols_) {
      throw InputError("matrix row arity mismatch");
    }
    data_.insert(data_.end(), r.begin(), r.end());
    ++rows_;
  }
  void push_row(std::initializer_list<double> r) {
    push_row(std::span<const double>(r.begin(), r.size()));
  }

  Matrix select(const std::vector<std::size_t>& ids) const {
    Matrix out;
    for (std::size_t i : ids) out.push_row(row(i));
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace annplan
