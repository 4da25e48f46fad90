#pragma once
// Dense row-major containers for small integer-indexed data (site x period
// tables, shipping cost cubes). Bounds are asserted in debug builds only.

#include <cassert>
#include <cstddef>
#include <vector>

namespace resplan {

class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  double& operator()(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

class Cube {
 public:
  Cube() = default;
  Cube(int d0, int d1, int d2, double fill = 0.0)
      : d0_(d0), d1_(d1), d2_(d2),
        data_(static_cast<std::size_t>(d0) * d1 * d2, fill) {}

  double& operator()(int a, int b, int c) {
    assert(a >= 0 && a < d0_ && b >= 0 && b < d1_ && c >= 0 && c < d2_);
    return data_[(static_cast<std::size_t>(a) * d1_ + b) * d2_ + c];
  }
  double operator()(int a, int b, int c) const {
    assert(a >= 0 && a < d0_ && b >= 0 && b < d1_ && c >= 0 && c < d2_);
    return data_[(static_cast<std::size_t>(a) * d1_ + b) * d2_ + c];
  }

  int dim0() const { return d0_; }
  int dim1() const { return d1_; }
  int dim2() const { return d2_; }
  bool empty() const { return data_.empty(); }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Cube&) const = default;

 private:
  int d0_ = 0;
  int d1_ = 0;
  int d2_ = 0;
  std::vector<double> data_;
};

class Tensor4 {
 public:
  Tensor4() = default;
  Tensor4(int d0, int d1, int d2, int d3, double fill = 0.0)
      : d0_(d0), d1_(d1), d2_(d2), d3_(d3),
        data_(static_cast<std::size_t>(d0) * d1 * d2 * d3, fill) {}

  double& operator()(int a, int b, int c, int d) {
    assert(a >= 0 && a < d0_ && b >= 0 && b < d1_ && c >= 0 && c < d2_ && d >= 0 && d < d3_);
    return data_[((static_cast<std::size_t>(a) * d1_ + b) * d2_ + c) * d3_ + d];
  }
  double operator()(int a, int b, int c, int d) const {
    assert(a >= 0 && a < d0_ && b >= 0 && b < d1_ && c >= 0 && c < d2_ && d >= 0 && d < d3_);
    return data_[((static_cast<std::size_t>(a) * d1_ + b) * d2_ + c) * d3_ + d];
  }

  int dim0() const { return d0_; }
  int dim1() const { return d1_; }
  int dim2() const { return d2_; }
  int dim3() const { return d3_; }
  bool empty() const { return data_.empty(); }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Tensor4&) const = default;

 private:
  int d0_ = 0;
  int d1_ = 0;
  int d2_ = 0;
  int d3_ = 0;
  std::vector<double> data_;
};

}  // namespace resplan
