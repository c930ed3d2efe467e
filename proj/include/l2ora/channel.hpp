// SPDX-License-Identifier: Apache-2.0
//
// Composite-fading MU-MISO channel generation (Nakagami-m small scale,
// SNR-parameterized noise) and reproducible dataset persistence.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "l2ora/rng.hpp"

namespace l2ora {

// One realization of the K x N downlink channel. Rows of H_re + i*H_im are
// the conjugated user channels h_k^H, so (H V)(k, j) = h_k^H v_j.
struct ChannelSample {
  Eigen::MatrixXd H_re;  // K x N
  Eigen::MatrixXd H_im;  // K x N
  double sigma2 = 0.0;   // noise power, watts
  double m = 1.0;        // Nakagami shape
  double snr_db = 0.0;
  std::uint64_t sample_seed = 0;

  int users() const { return static_cast<int>(H_re.rows()); }
  int antennas() const { return static_cast<int>(H_re.cols()); }
};

struct GenConfig {
  int K = 3;
  int N = 20;
  double m = 3.0;
  double snr_db = 10.0;
  double p_max = 1.1;
  double p_circuit = 0.1;
  Eigen::VectorXd gamma;  // K linear SINR thresholds (default 1.0 each)
  Eigen::VectorXd alpha;  // K user weights (default 1.0 each)
  int count = 1000;
  double split_ratio = 0.7;
  std::uint64_t master_seed = 1;

  double p_budget() const { return p_max - p_circuit; }
  void fill_defaults();  // sizes gamma/alpha to K when empty
  void validate() const;
};

struct Dataset {
  std::uint64_t fingerprint = 0;
  GenConfig config;
  std::vector<ChannelSample> samples;
  int split_index = 0;
  int discards = 0;

  int train_count() const { return split_index; }
  int test_count() const { return static_cast<int>(samples.size()) - split_index; }
};

double sample_gamma(double shape, double scale, RandomStream& rng);
std::pair<double, double> sample_nakagami_entry(double m, double omega,
                                                RandomStream& rng);

ChannelSample generate_channel(int K, int N, double m, double snr_db,
                               double p_budget, RandomStream& rng);
// Seeded variant; records the seed so the sample can be regenerated
// bit-exactly.
ChannelSample generate_channel_seeded(int K, int N, double m, double snr_db,
                                      double p_budget, std::uint64_t seed);

// Returns true when the sample admits a feasible beamformer for the QoS
// configuration it was generated under (supplied by the wmmse module).
using FeasibilityScreen = std::function<bool(const ChannelSample&)>;

// Generates `count` screened samples with per-candidate seeds
// mix_seed(master_seed, candidate_index); infeasible candidates are discarded
// and replaced. Aborts when consecutive discards exceed max(25, count/2).
Dataset build_dataset(const GenConfig& cfg, const FeasibilityScreen& screen = {},
                      int jobs = 1);

std::uint64_t config_fingerprint(const GenConfig& cfg);

// UTF-8 JSON lines: header object first, then one sample object per line.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace l2ora
