// SPDX-License-Identifier: Apache-2.0
//
// QoS-aware weighted-sum-rate beamforming problem: SINR, WSR, and the
// canonical g(x) <= 0 constraint vector (normalized power budget + per-user
// SINR thresholds), plus violation metrics.
#pragma once

#include <Eigen/Dense>

#include "l2ora/channel.hpp"

namespace l2ora {

struct ProblemInstance {
  ChannelSample channel;
  Eigen::VectorXd alpha;  // K user weights, > 0
  Eigen::VectorXd gamma;  // K linear SINR thresholds, > 0
  double p_max = 1.1;
  double p_circuit = 0.1;

  int users() const { return channel.users(); }
  int antennas() const { return channel.antennas(); }
  double p_budget() const { return p_max - p_circuit; }
  void validate() const;
};

ProblemInstance make_instance(const ChannelSample& sample, const GenConfig& cfg);

// N x K complex precoding matrix stored as real/imaginary planes; column k is
// user k's precoder.
struct Beamformer {
  Eigen::MatrixXd V_re;
  Eigen::MatrixXd V_im;

  static Beamformer zero(int N, int K) {
    return {Eigen::MatrixXd::Zero(N, K), Eigen::MatrixXd::Zero(N, K)};
  }
  int antennas() const { return static_cast<int>(V_re.rows()); }
  int users() const { return static_cast<int>(V_re.cols()); }
  double power() const { return V_re.squaredNorm() + V_im.squaredNorm(); }
  Eigen::MatrixXcd complex() const {
    return V_re + std::complex<double>(0, 1) * V_im;
  }
};

// Flattening convention shared by models and the HoP mapping: the first N*K
// entries are V_re with each user's column contiguous (user-major), the next
// N*K entries are V_im in the same order. flat[0] is V_re(0, 0).
Eigen::VectorXd flatten(const Beamformer& v);
Beamformer unflatten(const Eigen::VectorXd& x, int N, int K);

struct ViolationReport {
  Eigen::VectorXd g;  // K+1 normalized constraint values
  double worst = 0.0;
  bool feasible = false;
  double tol = 0.0;
};

constexpr double kDefaultFeasTol = 1e-6;

// SINR_k = |h_k^H v_k|^2 / (sum_{j != k} |h_k^H v_j|^2 + sigma^2).
Eigen::VectorXd sinr(const ProblemInstance& inst, const Beamformer& v);

// sum_k alpha_k log2(1 + SINR_k), bits/s/Hz.
double wsr(const ProblemInstance& inst, const Beamformer& v);

// g0 = (sum_k ||v_k||^2 - p_budget)/p_budget, g_k = (gamma_k - SINR_k)/gamma_k.
Eigen::VectorXd constraint_values(const ProblemInstance& inst, const Beamformer& v);

ViolationReport violation_report(const ProblemInstance& inst, const Beamformer& v,
                                 double tol = kDefaultFeasTol);

}  // namespace l2ora
