// SPDX-License-Identifier: Apache-2.0
#include "l2ora/tape.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace l2ora {
namespace {

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  std::ostringstream os;
  os << op << ": shape mismatch " << a.shape_str() << " vs " << b.shape_str();
  throw std::invalid_argument(os.str());
}

[[noreturn]] void shape_error(const char* op, const Tensor& a) {
  std::ostringstream os;
  os << op << ": unsupported shape " << a.shape_str();
  throw std::invalid_argument(os.str());
}

bool broadcastable(const Tensor& a, const Tensor& b) {
  return a.same_shape(b) || a.is_scalar() || b.is_scalar();
}

// Adjoint helper for scalar broadcast: collapse a full-shape gradient onto a
// scalar operand when needed.
Eigen::ArrayXd collapse(const Eigen::ArrayXd& grad, const Tensor& operand) {
  if (operand.size() == grad.size()) return grad;
  Eigen::ArrayXd g(1);
  g(0) = grad.sum();
  return g;
}

}  // namespace

const Tensor& Tape::in(NodeId id) const { return nodes_[id].value; }

NodeId Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::constant(Tensor value) {
  return push({OpKind::kConstant, std::move(value), {}});
}

NodeId Tape::parameter(Tensor value) {
  NodeId id = push({OpKind::kParameter, std::move(value), {}});
  params_.push_back(id);
  return id;
}

NodeId Tape::binary_elementwise(OpKind kind, NodeId a, NodeId b) {
  const Tensor& ta = in(a);
  const Tensor& tb = in(b);
  const char* name = kind == OpKind::kAdd   ? "add"
                     : kind == OpKind::kSub ? "sub"
                     : kind == OpKind::kMul ? "mul"
                                            : "div";
  if (!broadcastable(ta, tb)) shape_error(name, ta, tb);
  const Tensor& big = ta.is_scalar() ? tb : ta;
  auto lhs = [&](Eigen::Index i) { return ta.array()(ta.is_scalar() ? 0 : i); };
  auto rhs = [&](Eigen::Index i) { return tb.array()(tb.is_scalar() ? 0 : i); };
  Eigen::ArrayXd out(big.size());
  switch (kind) {
    case OpKind::kAdd:
      for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = lhs(i) + rhs(i);
      break;
    case OpKind::kSub:
      for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = lhs(i) - rhs(i);
      break;
    case OpKind::kMul:
      for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = lhs(i) * rhs(i);
      break;
    case OpKind::kDiv:
      if ((tb.array() == 0.0).any()) {
        throw std::domain_error("div: zero divisor");
      }
      for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = lhs(i) / rhs(i);
      break;
    default:
      shape_error(name, ta, tb);
  }
  return push({kind, Tensor::from_array(big.shape(), std::move(out)), {a, b}});
}

NodeId Tape::add(NodeId a, NodeId b) { return binary_elementwise(OpKind::kAdd, a, b); }
NodeId Tape::sub(NodeId a, NodeId b) { return binary_elementwise(OpKind::kSub, a, b); }
NodeId Tape::mul(NodeId a, NodeId b) { return binary_elementwise(OpKind::kMul, a, b); }
NodeId Tape::div(NodeId a, NodeId b) { return binary_elementwise(OpKind::kDiv, a, b); }

NodeId Tape::matmul(NodeId a, NodeId b) {
  const Tensor& ta = in(a);
  const Tensor& tb = in(b);
  if (ta.shape().size() != 2 || tb.shape().size() != 2 ||
      ta.shape()[1] != tb.shape()[0]) {
    shape_error("matmul", ta, tb);
  }
  RowMatrixXd out = ta.as_matrix() * tb.as_matrix();
  return push({OpKind::kMatMul,
               Tensor::from_array({ta.shape()[0], tb.shape()[1]},
                                  Eigen::Map<const Eigen::ArrayXd>(out.data(), out.size())),
               {a, b}});
}

NodeId Tape::transpose(NodeId a) {
  const Tensor& ta = in(a);
  if (ta.shape().size() != 2) shape_error("transpose", ta);
  RowMatrixXd out = ta.as_matrix().transpose();
  return push({OpKind::kTranspose,
               Tensor::from_array({ta.shape()[1], ta.shape()[0]},
                                  Eigen::Map<const Eigen::ArrayXd>(out.data(), out.size())),
               {a}});
}

NodeId Tape::reduce_sum(NodeId a) {
  return push({OpKind::kReduceSum, Tensor::scalar(in(a).array().sum()), {a}});
}

NodeId Tape::unary(OpKind kind, NodeId a,
                   const std::function<Eigen::ArrayXd(const Eigen::ArrayXd&)>& f) {
  const Tensor& ta = in(a);
  return push({kind, Tensor::from_array(ta.shape(), f(ta.array())), {a}});
}

NodeId Tape::relu(NodeId a) {
  return unary(OpKind::kRelu, a, [](const Eigen::ArrayXd& x) {
    return x.max(0.0).eval();
  });
}

NodeId Tape::sigmoid(NodeId a) {
  return unary(OpKind::kSigmoid, a, [](const Eigen::ArrayXd& x) {
    return (0.5 * (0.5 * x).tanh() + 0.5).eval();
  });
}

NodeId Tape::tanh(NodeId a) {
  return unary(OpKind::kTanh, a, [](const Eigen::ArrayXd& x) { return x.tanh().eval(); });
}

NodeId Tape::log(NodeId a) {
  if ((in(a).array() <= 0.0).any()) {
    throw std::domain_error("log: non-positive input");
  }
  return unary(OpKind::kLog, a, [](const Eigen::ArrayXd& x) { return x.log().eval(); });
}

NodeId Tape::exp(NodeId a) {
  return unary(OpKind::kExp, a, [](const Eigen::ArrayXd& x) { return x.exp().eval(); });
}

NodeId Tape::sqrt(NodeId a) {
  if ((in(a).array() < 0.0).any()) {
    throw std::domain_error("sqrt: negative input");
  }
  return unary(OpKind::kSqrt, a, [](const Eigen::ArrayXd& x) { return x.sqrt().eval(); });
}

NodeId Tape::square(NodeId a) {
  return unary(OpKind::kSquare, a, [](const Eigen::ArrayXd& x) { return x.square().eval(); });
}

NodeId Tape::sin(NodeId a) {
  return unary(OpKind::kSin, a, [](const Eigen::ArrayXd& x) { return x.sin().eval(); });
}

NodeId Tape::cos(NodeId a) {
  return unary(OpKind::kCos, a, [](const Eigen::ArrayXd& x) { return x.cos().eval(); });
}

NodeId Tape::softplus(NodeId a) {
  return unary(OpKind::kSoftplus, a, [](const Eigen::ArrayXd& x) {
    // max(x, 0) + log1p(exp(-|x|)): overflow-safe for large |x|.
    Eigen::ArrayXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      out(i) = std::max(x(i), 0.0) + std::log1p(std::exp(-std::abs(x(i))));
    }
    return out;
  });
}

NodeId Tape::scalar_mul(NodeId a, double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("scalar_mul: non-finite factor");
  const Tensor& ta = in(a);
  Node n{OpKind::kScalarMul, Tensor::from_array(ta.shape(), (ta.array() * c).eval()), {a}};
  n.scalar = c;
  return push(std::move(n));
}

NodeId Tape::concat(std::span<const NodeId> parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no inputs");
  Eigen::Index total = 0;
  for (NodeId p : parts) total += in(p).size();
  Eigen::ArrayXd out(total);
  Eigen::Index at = 0;
  std::vector<NodeId> inputs;
  inputs.reserve(parts.size());
  for (NodeId p : parts) {
    out.segment(at, in(p).size()) = in(p).array();
    at += in(p).size();
    inputs.push_back(p);
  }
  return push({OpKind::kConcat,
               Tensor::from_array({static_cast<int>(total)}, std::move(out)),
               std::move(inputs)});
}

NodeId Tape::slice(NodeId a, Eigen::Index offset, Eigen::Index len,
                   std::vector<int> out_shape) {
  const Tensor& ta = in(a);
  if (offset < 0 || len < 0 || offset + len > ta.size()) {
    throw std::invalid_argument("slice: range out of bounds");
  }
  if (out_shape.empty()) out_shape = {static_cast<int>(len)};
  if (shape_product(out_shape) != len) {
    throw std::invalid_argument("slice: output shape does not match length");
  }
  Node n{OpKind::kSlice,
         Tensor::from_array(std::move(out_shape), ta.array().segment(offset, len).eval()),
         {a}};
  n.offset = offset;
  return push(std::move(n));
}

NodeId Tape::reshape(NodeId a, std::vector<int> shape) {
  const Tensor& ta = in(a);
  if (shape_product(shape) != ta.size()) {
    throw std::invalid_argument("reshape: element count mismatch");
  }
  return push({OpKind::kReshape, Tensor::from_array(std::move(shape), ta.array()), {a}});
}

NodeId Tape::spd_solve(NodeId a, NodeId b) {
  const Tensor& ta = in(a);
  const Tensor& tb = in(b);
  if (ta.shape().size() != 2 || ta.shape()[0] != ta.shape()[1] ||
      tb.shape().size() != 2 || tb.shape()[0] != ta.shape()[0]) {
    shape_error("spd_solve", ta, tb);
  }
  Eigen::MatrixXd A = ta.as_matrix();
  auto llt = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>(A);
  if (llt->info() != Eigen::Success) {
    throw std::runtime_error(
        "spd_solve: Cholesky factorization failed (matrix not positive "
        "definite; diag min " +
        std::to_string(A.diagonal().minCoeff()) + ")");
  }
  Eigen::MatrixXd X = llt->solve(Eigen::MatrixXd(tb.as_matrix()));
  RowMatrixXd rx = X;
  Node n{OpKind::kSpdSolve,
         Tensor::from_array({tb.shape()[0], tb.shape()[1]},
                            Eigen::Map<const Eigen::ArrayXd>(rx.data(), rx.size())),
         {a, b}};
  n.llt = std::move(llt);
  return push(std::move(n));
}

std::map<NodeId, Tensor> Tape::backward(NodeId root) const {
  if (root < 0 || root >= static_cast<NodeId>(nodes_.size())) {
    throw std::invalid_argument("backward: bad root id");
  }
  if (!nodes_[root].value.is_scalar()) {
    throw std::invalid_argument("backward: root must be a scalar");
  }
  std::vector<Eigen::ArrayXd> grads(nodes_.size());
  auto grad_of = [&](NodeId id) -> Eigen::ArrayXd& {
    if (grads[id].size() == 0) {
      grads[id] = Eigen::ArrayXd::Zero(nodes_[id].value.size());
    }
    return grads[id];
  };
  grad_of(root)(0) = 1.0;

  for (NodeId id = root; id >= 0; --id) {
    const Node& n = nodes_[id];
    if (grads[id].size() == 0) continue;  // not on any path to root
    const Eigen::ArrayXd& g = grads[id];
    switch (n.kind) {
      case OpKind::kConstant:
      case OpKind::kParameter:
        break;
      case OpKind::kAdd: {
        grad_of(n.inputs[0]) += collapse(g, in(n.inputs[0]));
        grad_of(n.inputs[1]) += collapse(g, in(n.inputs[1]));
        break;
      }
      case OpKind::kSub: {
        grad_of(n.inputs[0]) += collapse(g, in(n.inputs[0]));
        grad_of(n.inputs[1]) -= collapse(g, in(n.inputs[1]));
        break;
      }
      case OpKind::kMul: {
        const Tensor& a = in(n.inputs[0]);
        const Tensor& b = in(n.inputs[1]);
        auto av = [&](Eigen::Index i) { return a.array()(a.is_scalar() ? 0 : i); };
        auto bv = [&](Eigen::Index i) { return b.array()(b.is_scalar() ? 0 : i); };
        Eigen::ArrayXd ga(g.size()), gb(g.size());
        for (Eigen::Index i = 0; i < g.size(); ++i) {
          ga(i) = g(i) * bv(i);
          gb(i) = g(i) * av(i);
        }
        grad_of(n.inputs[0]) += collapse(ga, a);
        grad_of(n.inputs[1]) += collapse(gb, b);
        break;
      }
      case OpKind::kDiv: {
        const Tensor& a = in(n.inputs[0]);
        const Tensor& b = in(n.inputs[1]);
        auto av = [&](Eigen::Index i) { return a.array()(a.is_scalar() ? 0 : i); };
        auto bv = [&](Eigen::Index i) { return b.array()(b.is_scalar() ? 0 : i); };
        Eigen::ArrayXd ga(g.size()), gb(g.size());
        for (Eigen::Index i = 0; i < g.size(); ++i) {
          ga(i) = g(i) / bv(i);
          gb(i) = -g(i) * av(i) / (bv(i) * bv(i));
        }
        grad_of(n.inputs[0]) += collapse(ga, a);
        grad_of(n.inputs[1]) += collapse(gb, b);
        break;
      }
      case OpKind::kMatMul: {
        const Tensor& a = in(n.inputs[0]);
        const Tensor& b = in(n.inputs[1]);
        Eigen::Map<const RowMatrixXd> G(g.data(), a.shape()[0], b.shape()[1]);
        RowMatrixXd ga = G * b.as_matrix().transpose();
        RowMatrixXd gb = a.as_matrix().transpose() * G;
        grad_of(n.inputs[0]) += Eigen::Map<const Eigen::ArrayXd>(ga.data(), ga.size());
        grad_of(n.inputs[1]) += Eigen::Map<const Eigen::ArrayXd>(gb.data(), gb.size());
        break;
      }
      case OpKind::kTranspose: {
        const Tensor& a = in(n.inputs[0]);
        Eigen::Map<const RowMatrixXd> G(g.data(), n.value.rows(), n.value.cols());
        RowMatrixXd ga = G.transpose();
        (void)a;
        grad_of(n.inputs[0]) += Eigen::Map<const Eigen::ArrayXd>(ga.data(), ga.size());
        break;
      }
      case OpKind::kReduceSum: {
        grad_of(n.inputs[0]) += g(0);
        break;
      }
      case OpKind::kRelu: {
        const Eigen::ArrayXd& x = in(n.inputs[0]).array();
        // subgradient at exactly 0 is 0
        grad_of(n.inputs[0]) += g * (x > 0.0).cast<double>();
        break;
      }
      case OpKind::kSigmoid: {
        const Eigen::ArrayXd& s = n.value.array();
        grad_of(n.inputs[0]) += g * s * (1.0 - s);
        break;
      }
      case OpKind::kTanh: {
        const Eigen::ArrayXd& t = n.value.array();
        grad_of(n.inputs[0]) += g * (1.0 - t.square());
        break;
      }
      case OpKind::kLog: {
        grad_of(n.inputs[0]) += g / in(n.inputs[0]).array();
        break;
      }
      case OpKind::kExp: {
        grad_of(n.inputs[0]) += g * n.value.array();
        break;
      }
      case OpKind::kSqrt: {
        grad_of(n.inputs[0]) += g / (2.0 * n.value.array());
        break;
      }
      case OpKind::kSquare: {
        grad_of(n.inputs[0]) += g * 2.0 * in(n.inputs[0]).array();
        break;
      }
      case OpKind::kSin: {
        grad_of(n.inputs[0]) += g * in(n.inputs[0]).array().cos();
        break;
      }
      case OpKind::kCos: {
        grad_of(n.inputs[0]) -= g * in(n.inputs[0]).array().sin();
        break;
      }
      case OpKind::kSoftplus: {
        const Eigen::ArrayXd& x = in(n.inputs[0]).array();
        grad_of(n.inputs[0]) += g * (0.5 * (0.5 * x).tanh() + 0.5);
        break;
      }
      case OpKind::kScalarMul: {
        grad_of(n.inputs[0]) += g * n.scalar;
        break;
      }
      case OpKind::kConcat: {
        Eigen::Index at = 0;
        for (NodeId p : n.inputs) {
          grad_of(p) += g.segment(at, in(p).size());
          at += in(p).size();
        }
        break;
      }
      case OpKind::kSlice: {
        grad_of(n.inputs[0]).segment(n.offset, n.value.size()) += g;
        break;
      }
      case OpKind::kReshape: {
        grad_of(n.inputs[0]) += g;
        break;
      }
      case OpKind::kSpdSolve: {
        const Tensor& x = n.value;
        Eigen::Map<const RowMatrixXd> G(g.data(), x.rows(), x.cols());
        // X = A^-1 B with A symmetric: dB = A^-1 G, dA = -(A^-1 G) X^T.
        Eigen::MatrixXd gB = n.llt->solve(Eigen::MatrixXd(G));
        Eigen::MatrixXd gA = -gB * x.as_matrix().transpose();
        RowMatrixXd gA_r = gA;
        RowMatrixXd gB_r = gB;
        grad_of(n.inputs[0]) += Eigen::Map<const Eigen::ArrayXd>(gA_r.data(), gA_r.size());
        grad_of(n.inputs[1]) += Eigen::Map<const Eigen::ArrayXd>(gB_r.data(), gB_r.size());
        break;
      }
    }
  }

  std::map<NodeId, Tensor> out;
  for (NodeId p : params_) {
    if (grads[p].size() == 0) {
      out.emplace(p, Tensor::zeros(nodes_[p].value.shape()));
    } else {
      out.emplace(p, Tensor::from_array(nodes_[p].value.shape(), std::move(grads[p])));
    }
  }
  return out;
}

std::pair<NodeId, NodeId> complex_hermitian_dot(Tape& t, NodeId a_re, NodeId a_im,
                                                NodeId b_re, NodeId b_im) {
  const Eigen::Index n = t.value(a_re).size();
  if (t.value(a_im).size() != n || t.value(b_re).size() != n ||
      t.value(b_im).size() != n) {
    throw std::invalid_argument("complex_hermitian_dot: length mismatch");
  }
  // conj(a).b = (a_re.b_re + a_im.b_im) + i (a_re.b_im - a_im.b_re)
  NodeId re = t.reduce_sum(t.add(t.mul(a_re, b_re), t.mul(a_im, b_im)));
  NodeId im = t.reduce_sum(t.sub(t.mul(a_re, b_im), t.mul(a_im, b_re)));
  return {re, im};
}

double finite_difference_check(const ScalarGraphFn& f, const Tensor& x,
                               double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite_difference_check: eps must be positive");
  Tape tape;
  NodeId xid = tape.parameter(x);
  NodeId root = f(tape, xid);
  if (!std::isfinite(tape.scalar_value(root))) {
    throw std::domain_error("finite_difference_check: f(x) is not finite");
  }
  const Tensor grad = tape.backward(root).at(xid);

  auto eval_at = [&](const Eigen::ArrayXd& pt) {
    Tape t2;
    NodeId id = t2.parameter(Tensor::from_array(x.shape(), pt));
    return t2.scalar_value(f(t2, id));
  };

  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::ArrayXd hi = x.array();
    Eigen::ArrayXd lo = x.array();
    hi(i) += eps;
    lo(i) -= eps;
    const double fd = (eval_at(hi) - eval_at(lo)) / (2.0 * eps);
    const double err = std::abs(grad.array()(i) - fd) / (std::abs(fd) + 1e-12);
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace l2ora
