// SPDX-License-Identifier: Apache-2.0
#include "l2ora/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace l2ora {

void ProblemInstance::validate() const {
  if (!(p_max > p_circuit) || !(p_circuit > 0.0)) {
    throw std::invalid_argument("instance: requires p_max > p_circuit > 0");
  }
  if (alpha.size() != users() || gamma.size() != users()) {
    throw std::invalid_argument("instance: alpha/gamma must have K entries");
  }
  if ((alpha.array() <= 0).any() || (gamma.array() <= 0).any()) {
    throw std::invalid_argument("instance: alpha and gamma must be positive");
  }
  if (!(channel.sigma2 > 0.0)) {
    throw std::invalid_argument("instance: sigma2 must be positive");
  }
}

ProblemInstance make_instance(const ChannelSample& sample, const GenConfig& cfg) {
  ProblemInstance inst;
  inst.channel = sample;
  inst.alpha = cfg.alpha;
  inst.gamma = cfg.gamma;
  inst.p_max = cfg.p_max;
  inst.p_circuit = cfg.p_circuit;
  inst.validate();
  return inst;
}

Eigen::VectorXd flatten(const Beamformer& v) {
  const Eigen::Index nk = v.V_re.size();
  Eigen::VectorXd x(2 * nk);
  x.head(nk) = Eigen::Map<const Eigen::VectorXd>(v.V_re.data(), nk);
  x.tail(nk) = Eigen::Map<const Eigen::VectorXd>(v.V_im.data(), nk);
  return x;
}

Beamformer unflatten(const Eigen::VectorXd& x, int N, int K) {
  if (x.size() != 2ll * N * K) {
    throw std::invalid_argument("unflatten: expected length 2*N*K");
  }
  Beamformer v;
  v.V_re = Eigen::Map<const Eigen::MatrixXd>(x.data(), N, K);
  v.V_im = Eigen::Map<const Eigen::MatrixXd>(x.data() + N * K, N, K);
  return v;
}

Eigen::VectorXd sinr(const ProblemInstance& inst, const Beamformer& v) {
  const int K = inst.users();
  const Eigen::MatrixXcd H = inst.channel.H_re + std::complex<double>(0, 1) * inst.channel.H_im;
  const Eigen::MatrixXcd D = H * v.complex();  // D(k, j) = h_k^H v_j
  Eigen::VectorXd out(K);
  for (int k = 0; k < K; ++k) {
    double interference = inst.channel.sigma2;
    for (int j = 0; j < K; ++j) {
      if (j != k) interference += std::norm(D(k, j));
    }
    out(k) = std::norm(D(k, k)) / interference;
  }
  return out;
}

double wsr(const ProblemInstance& inst, const Beamformer& v) {
  const Eigen::VectorXd s = sinr(inst, v);
  double total = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    total += inst.alpha(k) * std::log2(1.0 + s(k));
  }
  return total;
}

Eigen::VectorXd constraint_values(const ProblemInstance& inst, const Beamformer& v) {
  const int K = inst.users();
  Eigen::VectorXd g(K + 1);
  g(0) = (v.power() - inst.p_budget()) / inst.p_budget();
  const Eigen::VectorXd s = sinr(inst, v);
  for (int k = 0; k < K; ++k) {
    g(k + 1) = (inst.gamma(k) - s(k)) / inst.gamma(k);
  }
  return g;
}

ViolationReport violation_report(const ProblemInstance& inst, const Beamformer& v,
                                 double tol) {
  if (tol < 0.0) throw std::invalid_argument("violation_report: tol must be >= 0");
  ViolationReport r;
  r.g = constraint_values(inst, v);
  r.worst = r.g.maxCoeff();
  r.tol = tol;
  r.feasible = r.worst <= tol;
  return r;
}

}  // namespace l2ora
