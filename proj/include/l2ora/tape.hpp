// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode autodiff over dense real tensors. A Tape is an append-only
// computation graph: every op caches its forward value at construction, and
// backward() walks the nodes once in reverse to accumulate adjoints.
// Complex arithmetic is never first-class; callers expand complex equations
// into real/imaginary pairs (see complex_hermitian_dot).
#pragma once

#include <Eigen/Cholesky>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "l2ora/tensor.hpp"

namespace l2ora {

enum class OpKind {
  kConstant,
  kParameter,
  kAdd,
  kSub,
  kMul,       // elementwise; either side may be a scalar (broadcast)
  kDiv,       // elementwise; divisor may be a scalar (broadcast)
  kMatMul,
  kTranspose,
  kReduceSum, // full reduction to a scalar
  kRelu,
  kSigmoid,
  kTanh,
  kLog,
  kExp,
  kSqrt,
  kSquare,
  kSin,
  kCos,
  kSoftplus,
  kScalarMul, // multiply by a compile-time constant
  kConcat,    // 1-D concatenation
  kSlice,     // contiguous row-major range, reshaped
  kReshape,
  kSpdSolve,  // X = A^-1 B for symmetric positive definite A
};

using NodeId = int;

struct Node {
  OpKind kind;
  Tensor value;
  std::vector<NodeId> inputs;
  double scalar = 0.0;    // kScalarMul factor
  Eigen::Index offset = 0;  // kSlice start
  std::shared_ptr<const Eigen::LLT<Eigen::MatrixXd>> llt;  // kSpdSolve factor
};

class Tape {
 public:
  NodeId constant(Tensor value);
  NodeId constant_scalar(double v) { return constant(Tensor::scalar(v)); }
  // Registers a trainable leaf; backward() reports a gradient for it.
  NodeId parameter(Tensor value);

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId div(NodeId a, NodeId b);
  NodeId matmul(NodeId a, NodeId b);
  NodeId transpose(NodeId a);
  NodeId reduce_sum(NodeId a);
  NodeId relu(NodeId a);
  NodeId sigmoid(NodeId a);
  NodeId tanh(NodeId a);
  NodeId log(NodeId a);
  NodeId exp(NodeId a);
  NodeId sqrt(NodeId a);
  NodeId square(NodeId a);
  NodeId sin(NodeId a);
  NodeId cos(NodeId a);
  NodeId softplus(NodeId a);
  NodeId scalar_mul(NodeId a, double c);
  NodeId concat(std::span<const NodeId> parts);
  NodeId concat(std::initializer_list<NodeId> parts) {
    return concat(std::span<const NodeId>(parts.begin(), parts.size()));
  }
  NodeId slice(NodeId a, Eigen::Index offset, Eigen::Index len,
               std::vector<int> out_shape = {});
  NodeId reshape(NodeId a, std::vector<int> shape);
  NodeId spd_solve(NodeId a, NodeId b);

  const Tensor& value(NodeId id) const { return nodes_[id].value; }
  double scalar_value(NodeId id) const { return nodes_[id].value.value(); }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<NodeId>& parameters() const { return params_; }

  // Adjoints of `root` (a scalar node) with respect to every registered
  // parameter; parameters the root does not depend on get zero gradients.
  std::map<NodeId, Tensor> backward(NodeId root) const;

 private:
  NodeId push(Node n);
  NodeId unary(OpKind kind, NodeId a, const std::function<Eigen::ArrayXd(const Eigen::ArrayXd&)>& f);
  NodeId binary_elementwise(OpKind kind, NodeId a, NodeId b);
  const Tensor& in(NodeId id) const;

  std::vector<Node> nodes_;
  std::vector<NodeId> params_;
};

// Differentiable hermitian inner product sum_i conj(a_i) * b_i of two complex
// vectors given as real/imaginary node pairs; returns (re, im) scalar nodes.
std::pair<NodeId, NodeId> complex_hermitian_dot(Tape& tape, NodeId a_re,
                                                NodeId a_im, NodeId b_re,
                                                NodeId b_im);

// Builds f on a fresh tape per evaluation and returns the maximum over
// coordinates of |autodiff - central difference| / (|central difference| +
// 1e-12). Throws std::domain_error if f(x) is not finite.
using ScalarGraphFn = std::function<NodeId(Tape&, NodeId)>;
double finite_difference_check(const ScalarGraphFn& f, const Tensor& x,
                               double eps);

}  // namespace l2ora
