#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace priorcheck {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const double> flat() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Cascade summation in index order; blocks of 8 are summed left to right.
double pairwise_sum(std::span<const double> xs);

// Sum that does not depend on the order of `xs`: values are sorted first and
// then pairwise summed, so any permutation gives a bit-identical result.
double stable_sum(std::span<const double> xs);

// Sorted copy of xs.
std::vector<double> sorted(std::span<const double> xs);

// 17 significant digits; integral values keep a trailing ".0" so the output is
// always read back as a floating-point number.
std::string format_real(double x);

}  // namespace priorcheck
