// SPDX-License-Identifier: Apache-2.0
//
// Tape-graph versions of the problem functions. Complex channel math is
// expanded into real/imaginary pairs via complex_hermitian_dot so every
// quantity is differentiable end to end.
#pragma once

#include "l2ora/problem.hpp"
#include "l2ora/tape.hpp"

namespace l2ora {

// On the tape a beamformer is a pair of K x N tensors whose row k holds user
// k's precoder (the transpose of Beamformer's N x K planes); row-major rows
// match the user-major flattening convention of problem.hpp.
struct BeamformerNodes {
  NodeId re = -1;
  NodeId im = -1;
};

BeamformerNodes beamformer_nodes(Tape& t, const Beamformer& v,
                                 bool as_parameter = false);
// raw: 1-D node of length 2*N*K in the flatten() ordering.
BeamformerNodes beamformer_nodes_from_raw(Tape& t, NodeId raw, int N, int K);
NodeId flatten_nodes(Tape& t, BeamformerNodes v);
Beamformer beamformer_from_nodes(const Tape& t, BeamformerNodes v);

// Intermediate nodes of the SINR/constraint computation, shared by the loss
// builders and DC3's analytic gradient.
struct SinrGraph {
  BeamformerNodes v;
  std::vector<NodeId> v_re_rows, v_im_rows;       // per-user slices, length N
  std::vector<std::vector<NodeId>> d_re, d_im;    // d[k][j] = h_k^H v_j
  std::vector<NodeId> num;                        // |d_kk|^2
  std::vector<NodeId> den;                        // interference + sigma2
  std::vector<NodeId> sinr;                       // K scalars
  NodeId power = -1;
  NodeId g0 = -1;
  std::vector<NodeId> g_qos;                      // K scalars
  NodeId g = -1;                                  // (K+1) vector [g0, g_1..g_K]
};

SinrGraph build_sinr_graph(Tape& t, const ProblemInstance& inst, BeamformerNodes v);

NodeId wsr_node(Tape& t, const ProblemInstance& inst, const SinrGraph& sg);
NodeId wsr_node(Tape& t, const ProblemInstance& inst, BeamformerNodes v);
NodeId constraint_node(Tape& t, const ProblemInstance& inst, BeamformerNodes v);

// phi = sum_i relu(g_i)^2
NodeId phi_node(Tape& t, const SinrGraph& sg);
NodeId phi_node(Tape& t, const ProblemInstance& inst, BeamformerNodes v);

// Analytic gradient of phi with respect to the beamformer planes, expressed
// as forward ops so corrections can be unrolled with gradients flowing
// through them. Matches Tape::backward of phi_node (tested).
BeamformerNodes phi_grad_nodes(Tape& t, const ProblemInstance& inst,
                               const SinrGraph& sg);

}  // namespace l2ora
