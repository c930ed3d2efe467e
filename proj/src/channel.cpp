// SPDX-License-Identifier: Apache-2.0
#include "l2ora/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace l2ora {
namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::vector<double>> matrix_rows(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> rows(m.rows());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows[r].assign(m.cols(), 0.0);
    for (Eigen::Index c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c);
  }
  return rows;
}

Eigen::MatrixXd rows_to_matrix(const ordered_json& j, int K, int N,
                               const char* name) {
  if (!j.is_array() || static_cast<int>(j.size()) != K) {
    throw std::runtime_error(std::string("dataset: bad ") + name + " row count");
  }
  Eigen::MatrixXd m(K, N);
  for (int r = 0; r < K; ++r) {
    if (static_cast<int>(j[r].size()) != N) {
      throw std::runtime_error(std::string("dataset: bad ") + name + " column count");
    }
    for (int c = 0; c < N; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Eigen::VectorXd json_to_vector(const ordered_json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

ordered_json vector_to_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

void GenConfig::fill_defaults() {
  if (gamma.size() == 0) gamma = Eigen::VectorXd::Ones(K);
  if (alpha.size() == 0) alpha = Eigen::VectorXd::Ones(K);
}

void GenConfig::validate() const {
  if (K < 1 || N < 1) throw std::invalid_argument("gen config: K and N must be >= 1");
  if (m < 0.5) throw std::invalid_argument("gen config: Nakagami m must be >= 0.5");
  if (!(p_max > p_circuit) || !(p_circuit > 0.0)) {
    throw std::invalid_argument("gen config: requires p_max > p_circuit > 0");
  }
  if (count < 0) throw std::invalid_argument("gen config: count must be >= 0");
  if (!(split_ratio > 0.0) || split_ratio > 1.0) {
    throw std::invalid_argument("gen config: split_ratio must be in (0, 1]");
  }
  if (gamma.size() != K || alpha.size() != K) {
    throw std::invalid_argument("gen config: gamma/alpha must have K entries");
  }
  if ((gamma.array() <= 0).any() || (alpha.array() <= 0).any()) {
    throw std::invalid_argument("gen config: gamma and alpha must be positive");
  }
}

double sample_gamma(double shape, double scale, RandomStream& rng) {
  return rng.gamma(shape, scale);
}

std::pair<double, double> sample_nakagami_entry(double m, double omega,
                                                RandomStream& rng) {
  return rng.nakagami_entry(m, omega);
}

ChannelSample generate_channel(int K, int N, double m, double snr_db,
                               double p_budget, RandomStream& rng) {
  if (K < 1 || N < 1) throw std::invalid_argument("generate_channel: K, N must be >= 1");
  if (!(p_budget > 0.0)) throw std::invalid_argument("generate_channel: p_budget must be positive");
  ChannelSample s;
  s.H_re.resize(K, N);
  s.H_im.resize(K, N);
  for (int k = 0; k < K; ++k) {
    for (int n = 0; n < N; ++n) {
      auto [re, im] = rng.nakagami_entry(m, 1.0);
      s.H_re(k, n) = re;
      s.H_im(k, n) = im;
    }
  }
  s.sigma2 = p_budget * std::pow(10.0, -snr_db / 10.0);
  s.m = m;
  s.snr_db = snr_db;
  return s;
}

ChannelSample generate_channel_seeded(int K, int N, double m, double snr_db,
                                      double p_budget, std::uint64_t seed) {
  RandomStream rng(seed);
  ChannelSample s = generate_channel(K, N, m, snr_db, p_budget, rng);
  s.sample_seed = seed;
  return s;
}

Dataset build_dataset(const GenConfig& cfg_in, const FeasibilityScreen& screen,
                      int jobs) {
  GenConfig cfg = cfg_in;
  cfg.fill_defaults();
  cfg.validate();
  if (jobs < 1) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;

  Dataset ds;
  ds.config = cfg;
  ds.fingerprint = config_fingerprint(cfg);
  ds.split_index = static_cast<int>(std::ceil(cfg.split_ratio * cfg.count));
  ds.samples.reserve(cfg.count);

  const int abort_after = std::max(25, cfg.count / 2);
  int consecutive_discards = 0;
  std::uint64_t candidate = 0;

  // Candidates are screened in parallel windows but consumed strictly in
  // candidate order, so the result is independent of `jobs`.
  while (static_cast<int>(ds.samples.size()) < cfg.count) {
    const int window = std::min(4 * jobs, 64);
    std::vector<ChannelSample> cand(window);
    std::vector<char> ok(window, 1);
    auto work = [&](int t) {
      for (int i = t; i < window; i += jobs) {
        cand[i] = generate_channel_seeded(cfg.K, cfg.N, cfg.m, cfg.snr_db,
                                          cfg.p_budget(),
                                          mix_seed(cfg.master_seed, candidate + i));
        if (screen) ok[i] = screen(cand[i]) ? 1 : 0;
      }
    };
    if (jobs == 1 || window == 1) {
      work(0);
    } else {
      std::vector<std::thread> threads;
      for (int t = 0; t < jobs; ++t) threads.emplace_back(work, t);
      for (auto& th : threads) th.join();
    }
    for (int i = 0; i < window && static_cast<int>(ds.samples.size()) < cfg.count; ++i) {
      if (ok[i]) {
        ds.samples.push_back(std::move(cand[i]));
        consecutive_discards = 0;
      } else {
        ++ds.discards;
        if (++consecutive_discards > abort_after) {
          throw std::runtime_error(
              "build_dataset: QoS thresholds too aggressive for this SNR/m");
        }
      }
    }
    candidate += window;
  }
  return ds;
}

std::uint64_t config_fingerprint(const GenConfig& cfg) {
  std::ostringstream os;
  os << "K=" << cfg.K << ";N=" << cfg.N << ";m=" << fmt_double(cfg.m)
     << ";snr_db=" << fmt_double(cfg.snr_db) << ";p_max=" << fmt_double(cfg.p_max)
     << ";p_circuit=" << fmt_double(cfg.p_circuit) << ";gamma=";
  for (Eigen::Index i = 0; i < cfg.gamma.size(); ++i) os << fmt_double(cfg.gamma(i)) << ',';
  os << ";alpha=";
  for (Eigen::Index i = 0; i < cfg.alpha.size(); ++i) os << fmt_double(cfg.alpha(i)) << ',';
  os << ";count=" << cfg.count << ";split=" << fmt_double(cfg.split_ratio)
     << ";seed=" << cfg.master_seed;
  return fnv1a(os.str());
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
  ordered_json header;
  header["version"] = 1;
  header["K"] = ds.config.K;
  header["N"] = ds.config.N;
  header["m"] = ds.config.m;
  header["snr_db"] = ds.config.snr_db;
  header["p_max"] = ds.config.p_max;
  header["p_circuit"] = ds.config.p_circuit;
  header["gamma"] = vector_to_json(ds.config.gamma);
  header["alpha"] = vector_to_json(ds.config.alpha);
  header["count"] = static_cast<int>(ds.samples.size());
  header["split_index"] = ds.split_index;
  header["master_seed"] = ds.config.master_seed;
  header["discards"] = ds.discards;
  out << header.dump() << '\n';
  for (const ChannelSample& s : ds.samples) {
    ordered_json line;
    line["seed"] = s.sample_seed;
    line["sigma2"] = s.sigma2;
    line["H_re"] = matrix_rows(s.H_re);
    line["H_im"] = matrix_rows(s.H_im);
    out << line.dump() << '\n';
  }
  if (!out) throw std::runtime_error("save_dataset: write failed for " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + path);

  Dataset ds;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const std::exception& e) {
      throw std::runtime_error("load_dataset: malformed line " +
                               std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (!have_header) {
        GenConfig& c = ds.config;
        c.K = j.at("K").get<int>();
        c.N = j.at("N").get<int>();
        c.m = j.at("m").get<double>();
        c.snr_db = j.at("snr_db").get<double>();
        c.p_max = j.at("p_max").get<double>();
        c.p_circuit = j.at("p_circuit").get<double>();
        c.gamma = json_to_vector(j.at("gamma"));
        c.alpha = json_to_vector(j.at("alpha"));
        c.count = j.at("count").get<int>();
        c.master_seed = j.at("master_seed").get<std::uint64_t>();
        ds.split_index = j.at("split_index").get<int>();
        ds.discards = j.at("discards").get<int>();
        if (c.count > 0) {
          c.split_ratio = static_cast<double>(ds.split_index) / c.count;
        }
        ds.fingerprint = config_fingerprint(c);
        ds.samples.reserve(c.count);
        have_header = true;
      } else {
        ChannelSample s;
        s.sample_seed = j.at("seed").get<std::uint64_t>();
        s.sigma2 = j.at("sigma2").get<double>();
        s.H_re = rows_to_matrix(j.at("H_re"), ds.config.K, ds.config.N, "H_re");
        s.H_im = rows_to_matrix(j.at("H_im"), ds.config.K, ds.config.N, "H_im");
        s.m = ds.config.m;
        s.snr_db = ds.config.snr_db;
        ds.samples.push_back(std::move(s));
      }
    } catch (const ordered_json::exception& e) {
      throw std::runtime_error("load_dataset: malformed line " +
                               std::to_string(line_no) + ": " + e.what());
    }
  }
  return ds;
}

}  // namespace l2ora
