// SPDX-License-Identifier: Apache-2.0
#include "l2ora/tensor.hpp"

#include <sstream>
#include <stdexcept>

namespace l2ora {

Tensor Tensor::scalar(double v) {
  Eigen::ArrayXd d(1);
  d(0) = v;
  return from_array({1}, std::move(d));
}

Tensor Tensor::zeros(std::vector<int> shape) {
  return from_array(std::move(shape), Eigen::ArrayXd());
}

Tensor Tensor::from_array(std::vector<int> shape, Eigen::ArrayXd data) {
  const Eigen::Index n = shape_product(shape);
  if (data.size() == 0 && n > 0) data = Eigen::ArrayXd::Zero(n);
  if (data.size() != n) {
    throw std::invalid_argument("tensor: data length does not match shape");
  }
  return Tensor(std::move(shape),
                std::make_shared<const Eigen::ArrayXd>(std::move(data)));
}

Tensor Tensor::from_vector(const Eigen::VectorXd& v) {
  return from_array({static_cast<int>(v.size())}, v.array());
}

Tensor Tensor::column(const Eigen::VectorXd& v) {
  return from_array({static_cast<int>(v.size()), 1}, v.array());
}

Tensor Tensor::from_matrix(const Eigen::MatrixXd& m) {
  RowMatrixXd rm = m;
  return from_array({static_cast<int>(m.rows()), static_cast<int>(m.cols())},
                    Eigen::Map<const Eigen::ArrayXd>(rm.data(), rm.size()));
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) os << 'x';
    os << shape_[i];
  }
  os << ')';
  return os.str();
}

}  // namespace l2ora
