// SPDX-License-Identifier: Apache-2.0
#include "l2ora/problem_graph.hpp"

#include <cmath>

namespace l2ora {
namespace {

Tensor tape_layout(const Beamformer& v) {
  // K x N row-major with row k = user k's precoder.
  return Tensor::from_matrix(v.V_re.transpose()), Tensor::from_matrix(v.V_im.transpose());
}

}  // namespace

BeamformerNodes beamformer_nodes(Tape& t, const Beamformer& v, bool as_parameter) {
  Tensor re = Tensor::from_matrix(v.V_re.transpose());
  Tensor im = Tensor::from_matrix(v.V_im.transpose());
  if (as_parameter) {
    return {t.parameter(std::move(re)), t.parameter(std::move(im))};
  }
  return {t.constant(std::move(re)), t.constant(std::move(im))};
}

BeamformerNodes beamformer_nodes_from_raw(Tape& t, NodeId raw, int N, int K) {
  if (t.value(raw).size() != 2ll * N * K) {
    throw std::invalid_argument("beamformer_nodes_from_raw: expected length 2*N*K");
  }
  // User-major re block then im block; each block is row-major K x N.
  return {t.slice(raw, 0, static_cast<Eigen::Index>(N) * K, {K, N}),
          t.slice(raw, static_cast<Eigen::Index>(N) * K,
                  static_cast<Eigen::Index>(N) * K, {K, N})};
}

NodeId flatten_nodes(Tape& t, BeamformerNodes v) {
  const int nk = static_cast<int>(t.value(v.re).size());
  NodeId re = t.reshape(v.re, {nk});
  NodeId im = t.reshape(v.im, {nk});
  return t.concat({re, im});
}

Beamformer beamformer_from_nodes(const Tape& t, BeamformerNodes v) {
  const Tensor& re = t.value(v.re);
  const Tensor& im = t.value(v.im);
  Beamformer out;
  out.V_re = re.as_matrix().transpose();
  out.V_im = im.as_matrix().transpose();
  return out;
}

SinrGraph build_sinr_graph(Tape& t, const ProblemInstance& inst, BeamformerNodes v) {
  const int K = inst.users();
  const int N = inst.antennas();
  SinrGraph sg;
  sg.v = v;
  sg.v_re_rows.reserve(K);
  sg.v_im_rows.reserve(K);
  for (int k = 0; k < K; ++k) {
    sg.v_re_rows.push_back(t.slice(v.re, static_cast<Eigen::Index>(k) * N, N));
    sg.v_im_rows.push_back(t.slice(v.im, static_cast<Eigen::Index>(k) * N, N));
  }

  sg.d_re.assign(K, std::vector<NodeId>(K));
  sg.d_im.assign(K, std::vector<NodeId>(K));
  for (int k = 0; k < K; ++k) {
    // h_k is the conjugate of the stored channel row h_k^H.
    NodeId h_re = t.constant(Tensor::from_vector(inst.channel.H_re.row(k)));
    NodeId h_im = t.constant(Tensor::from_vector(-inst.channel.H_im.row(k)));
    for (int j = 0; j < K; ++j) {
      auto [re, im] = complex_hermitian_dot(t, h_re, h_im, sg.v_re_rows[j], sg.v_im_rows[j]);
      sg.d_re[k][j] = re;
      sg.d_im[k][j] = im;
    }
  }

  NodeId sigma2 = t.constant_scalar(inst.channel.sigma2);
  for (int k = 0; k < K; ++k) {
    sg.num.push_back(t.add(t.square(sg.d_re[k][k]), t.square(sg.d_im[k][k])));
    NodeId den = sigma2;
    for (int j = 0; j < K; ++j) {
      if (j == k) continue;
      den = t.add(den, t.add(t.square(sg.d_re[k][j]), t.square(sg.d_im[k][j])));
    }
    sg.den.push_back(den);
    sg.sinr.push_back(t.div(sg.num[k], den));
  }

  sg.power = t.add(t.reduce_sum(t.square(v.re)), t.reduce_sum(t.square(v.im)));
  const double pb = inst.p_budget();
  sg.g0 = t.scalar_mul(t.sub(sg.power, t.constant_scalar(pb)), 1.0 / pb);
  std::vector<NodeId> parts{sg.g0};
  for (int k = 0; k < K; ++k) {
    sg.g_qos.push_back(t.scalar_mul(
        t.sub(t.constant_scalar(inst.gamma(k)), sg.sinr[k]), 1.0 / inst.gamma(k)));
    parts.push_back(sg.g_qos.back());
  }
  sg.g = t.concat(std::span<const NodeId>(parts.data(), parts.size()));
  return sg;
}

NodeId wsr_node(Tape& t, const ProblemInstance& inst, const SinrGraph& sg) {
  NodeId one = t.constant_scalar(1.0);
  NodeId total = -1;
  for (int k = 0; k < inst.users(); ++k) {
    NodeId rate = t.scalar_mul(t.log(t.add(one, sg.sinr[k])),
                               inst.alpha(k) / std::log(2.0));
    total = (total < 0) ? rate : t.add(total, rate);
  }
  return total;
}

NodeId wsr_node(Tape& t, const ProblemInstance& inst, BeamformerNodes v) {
  SinrGraph sg = build_sinr_graph(t, inst, v);
  return wsr_node(t, inst, sg);
}

NodeId constraint_node(Tape& t, const ProblemInstance& inst, BeamformerNodes v) {
  return build_sinr_graph(t, inst, v).g;
}

NodeId phi_node(Tape& t, const SinrGraph& sg) {
  return t.reduce_sum(t.square(t.relu(sg.g)));
}

NodeId phi_node(Tape& t, const ProblemInstance& inst, BeamformerNodes v) {
  SinrGraph sg = build_sinr_graph(t, inst, v);
  return phi_node(t, sg);
}

BeamformerNodes phi_grad_nodes(Tape& t, const ProblemInstance& inst,
                               const SinrGraph& sg) {
  const int K = inst.users();
  const double pb = inst.p_budget();

  // Power term: d(relu(g0)^2)/dV = (4 relu(g0)/pb) * V.
  NodeId coef0 = t.scalar_mul(t.relu(sg.g0), 4.0 / pb);
  NodeId g_re = t.mul(coef0, sg.v.re);
  NodeId g_im = t.mul(coef0, sg.v.im);

  // QoS terms: d(relu(g_k)^2)/dv_j = -(2 relu(g_k)/gamma_k) dSINR_k/dv_j.
  // With d = h_k^H v_j and h the true channel vector of user k:
  //   dnum/dv_re = 2 (d_re h_re - d_im h_im),
  //   dnum/dv_im = 2 (d_re h_im + d_im h_re).
  std::vector<std::vector<NodeId>> row_re(K), row_im(K);
  for (int k = 0; k < K; ++k) {
    NodeId c_k = t.scalar_mul(t.relu(sg.g_qos[k]), -2.0 / inst.gamma(k));
    NodeId h_re = t.constant(Tensor::from_vector(inst.channel.H_re.row(k)));
    NodeId h_im = t.constant(Tensor::from_vector(-inst.channel.H_im.row(k)));
    NodeId inv_den = t.div(t.constant_scalar(1.0), sg.den[k]);
    // own-signal part (j = k): dSINR/dv_k = (1/den) dnum/dv_k
    {
      NodeId s_re = t.scalar_mul(t.mul(c_k, t.mul(inv_den, sg.d_re[k][k])), 2.0);
      NodeId s_im = t.scalar_mul(t.mul(c_k, t.mul(inv_den, sg.d_im[k][k])), 2.0);
      row_re[k].push_back(t.sub(t.mul(s_re, h_re), t.mul(s_im, h_im)));
      row_im[k].push_back(t.add(t.mul(s_re, h_im), t.mul(s_im, h_re)));
    }
    // interference part (j != k): dSINR/dv_j = -(num/den^2) d|d_kj|^2/dv_j
    NodeId neg_ratio = t.scalar_mul(t.mul(t.div(sg.num[k], t.square(sg.den[k])), c_k), -2.0);
    for (int j = 0; j < K; ++j) {
      if (j == k) continue;
      NodeId s_re = t.mul(neg_ratio, sg.d_re[k][j]);
      NodeId s_im = t.mul(neg_ratio, sg.d_im[k][j]);
      row_re[j].push_back(t.sub(t.mul(s_re, h_re), t.mul(s_im, h_im)));
      row_im[j].push_back(t.add(t.mul(s_re, h_im), t.mul(s_im, h_re)));
    }
  }

  const int N = inst.antennas();
  std::vector<NodeId> rows_re, rows_im;
  for (int j = 0; j < K; ++j) {
    NodeId acc_re = row_re[j][0];
    NodeId acc_im = row_im[j][0];
    for (std::size_t i = 1; i < row_re[j].size(); ++i) {
      acc_re = t.add(acc_re, row_re[j][i]);
      acc_im = t.add(acc_im, row_im[j][i]);
    }
    rows_re.push_back(acc_re);
    rows_im.push_back(acc_im);
  }
  NodeId qos_re = t.reshape(t.concat(std::span<const NodeId>(rows_re.data(), rows_re.size())), {K, N});
  NodeId qos_im = t.reshape(t.concat(std::span<const NodeId>(rows_im.data(), rows_im.size())), {K, N});
  return {t.add(g_re, qos_re), t.add(g_im, qos_im)};
}

}  // namespace l2ora
