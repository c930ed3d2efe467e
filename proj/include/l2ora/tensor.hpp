// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

namespace l2ora {

using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense real tensor: a shape plus row-major 64-bit data. The payload is
// shared and immutable, so copying a Tensor (e.g. registering model
// parameters on a fresh tape every forward pass) is O(1).
class Tensor {
 public:
  Tensor() = default;

  static Tensor scalar(double v);
  static Tensor zeros(std::vector<int> shape);
  static Tensor from_array(std::vector<int> shape, Eigen::ArrayXd data);
  static Tensor from_vector(const Eigen::VectorXd& v);
  // Column vector shaped {n, 1}.
  static Tensor column(const Eigen::VectorXd& v);
  // Row-major copy of an Eigen matrix, shaped {rows, cols}.
  static Tensor from_matrix(const Eigen::MatrixXd& m);

  const std::vector<int>& shape() const { return shape_; }
  Eigen::Index size() const { return data_ ? data_->size() : 0; }
  bool is_scalar() const { return size() == 1; }

  const Eigen::ArrayXd& array() const { return *data_; }
  double value() const { return (*data_)(0); }

  int rows() const { return shape_.size() == 2 ? shape_[0] : 1; }
  int cols() const { return shape_.size() == 2 ? shape_[1] : static_cast<int>(size()); }

  Eigen::Map<const RowMatrixXd> as_matrix() const {
    return {data_->data(), rows(), cols()};
  }
  Eigen::Map<const Eigen::VectorXd> as_vector() const {
    return {data_->data(), size()};
  }

  // Copy back into a column-major Eigen matrix.
  Eigen::MatrixXd to_matrix() const { return as_matrix(); }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  std::string shape_str() const;

 private:
  Tensor(std::vector<int> shape, std::shared_ptr<const Eigen::ArrayXd> data)
      : shape_(std::move(shape)), data_(std::move(data)) {}

  std::vector<int> shape_;
  std::shared_ptr<const Eigen::ArrayXd> data_;
};

inline Eigen::Index shape_product(const std::vector<int>& shape) {
  Eigen::Index p = 1;
  for (int d : shape) p *= d;
  return p;
}

}  // namespace l2ora
