#pragma once

#include <Eigen/Core>

#include <cassert>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

namespace docqual::nn {

using Array = Eigen::ArrayXd;
using MatrixMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstMatrixMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// Dense double tensor, row-major, with shared storage. Copies are shallow;
// use clone() for an independent buffer. Double precision keeps gradient
// checks meaningful on the production code path.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape)
      : shape_(std::move(shape)), data_(std::make_shared<Array>(count(shape_))) {
    data_->setZero();
  }

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<int> shape, double v) {
    Tensor t(std::move(shape));
    t.array().setConstant(v);
    return t;
  }

  static Tensor scalar(double v) { return full({1}, v); }

  static Tensor from(std::vector<int> shape, std::vector<double> values) {
    Tensor t(std::move(shape));
    assert(static_cast<std::size_t>(t.size()) == values.size());
    for (std::size_t i = 0; i < values.size(); ++i) (*t.data_)[static_cast<long>(i)] = values[i];
    return t;
  }

  bool empty() const { return !data_; }
  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  long size() const { return data_ ? data_->size() : 0; }

  double* data() { return data_->data(); }
  const double* data() const { return data_->data(); }
  Array& array() { return *data_; }
  const Array& array() const { return *data_; }

  double& operator[](long i) { return (*data_)[i]; }
  double operator[](long i) const { return (*data_)[i]; }

  double& at(int i, int j) { return (*data_)[static_cast<long>(i) * dim(1) + j]; }
  double at(int i, int j) const { return (*data_)[static_cast<long>(i) * dim(1) + j]; }

  // [H,W,C] indexing
  double& at3(int i, int j, int k) {
    return (*data_)[(static_cast<long>(i) * dim(1) + j) * dim(2) + k];
  }
  double at3(int i, int j, int k) const {
    return (*data_)[(static_cast<long>(i) * dim(1) + j) * dim(2) + k];
  }

  MatrixMap mat(int rows, int cols) { return MatrixMap(data(), rows, cols); }
  ConstMatrixMap mat(int rows, int cols) const { return ConstMatrixMap(data(), rows, cols); }

  // 2-D view using the tensor's own shape.
  MatrixMap mat2d() { return mat(dim(0), dim(1)); }
  ConstMatrixMap mat2d() const { return mat(dim(0), dim(1)); }

  Tensor clone() const {
    Tensor t;
    t.shape_ = shape_;
    t.data_ = std::make_shared<Array>(*data_);
    return t;
  }

  // Shares storage under a new shape (element count must match).
  Tensor reshaped(std::vector<int> shape) const {
    assert(count(shape) == size());
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = data_;
    return t;
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  std::string shape_str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i)
      s += (i ? "," : "") + std::to_string(shape_[i]);
    return s + "]";
  }

  static long count(const std::vector<int>& shape) {
    long n = 1;
    for (int d : shape) n *= d;
    return n;
  }

 private:
  std::vector<int> shape_;
  std::shared_ptr<Array> data_;
};

}  // namespace docqual::nn
