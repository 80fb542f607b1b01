#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qkla/bayesnet.hpp"
#include "qkla/bench/result.hpp"

namespace qkla::bench {

inline constexpr std::uint64_t kDefaultSeed = 11;

/// Gate-level QAE on one 2x2 joint against the product of its margins.
struct Exp1Config {
  std::uint64_t seed = kDefaultSeed;
  std::vector<double> joint{0.4, 0.1, 0.1, 0.4};  // row-major 2x2
  double L = 2.0;
  int bits = 6;
  std::size_t t_min = 3;
  std::size_t t_max = 8;
  std::size_t t_detail = 5;   // t whose full phase distribution is emitted
  std::size_t shots = 5;      // shots per median estimate
  std::size_t trials = 2001;  // median estimates per t
  double percentile = 0.8;
  unsigned threads = 1;
};

/// Classical plug-in MI vs oracle-model QKLA on K random 2x2 joints.
struct Exp2Config {
  std::uint64_t seed = kDefaultSeed;
  std::size_t instances = 20;
  std::size_t trials = 120;
  std::size_t shots = 5;
  double L = 3.0;
  double mi_lo = 0.030;
  double mi_hi = 0.323;
  double n_min = 50.0;
  double n_max = 5e5;
  std::size_t n_points = 30;
  std::size_t t_min = 3;  // quantum grid M = 2^t_min .. 2^t_max
  std::size_t t_max = 13;
  double quantile = 0.9;
  std::vector<double> tau_grid{0.1, 0.05, 0.02, 0.01, 0.005, 0.003, 0.002, 0.001};
  unsigned threads = 1;
};

/// PC skeleton recovery with classical and quantum CI tests.
struct Exp3Config {
  std::uint64_t seed = kDefaultSeed;
  std::size_t trials = 20;
  std::vector<double> tau_grid{0.05, 0.03, 0.02, 0.014, 0.01, 0.007, 0.005, 0.003, 0.002, 0.001};
  double L = 3.0;
  std::size_t shots = 5;
  std::size_t max_depth = 3;
  std::optional<double> threshold;  // defaults to tau
  bool include_asia = true;
  bool include_synthetic = true;
  std::size_t synthetic_nodes = 12;
  double synthetic_edge_prob = 0.22;
  std::uint64_t synthetic_seed = 11;
  std::optional<std::string> synthetic_net_path;  // pinned network JSON
  unsigned threads = 1;
};

void to_json(nlohmann::json& j, const Exp1Config& c);
void from_json(const nlohmann::json& j, Exp1Config& c);
void to_json(nlohmann::json& j, const Exp2Config& c);
void from_json(const nlohmann::json& j, Exp2Config& c);
void to_json(nlohmann::json& j, const Exp3Config& c);
void from_json(const nlohmann::json& j, Exp3Config& c);

/// Tables: exp1_phase (t_detail distribution), exp1_error (per t).
ExperimentResult run_exp1(const Exp1Config& config);

/// Tables: exp2_classical, exp2_quantum (error curves), exp2_instances,
/// exp2_queries (minimum budget per tau, ratio, theory ratio).
ExperimentResult run_exp2(const Exp2Config& config);

/// Repeats run_exp2 on `replicates` independent instance draws, each with a
/// master seed derived from config.seed and the replicate index. Table
/// exp2_replicates holds per-draw slopes, crossover and C/Q ratios; metrics
/// hold their medians.
ExperimentResult run_exp2_replicates(const Exp2Config& config, std::size_t replicates);

/// Tables: exp3_cells (one row per network, tau, method), exp3_summary
/// (classical and quantum side by side with the query ratio).
ExperimentResult run_exp3(const Exp3Config& config);

/// Log-spaced integer budgets, rounded to nearest.
std::vector<std::int64_t> log_spaced_budgets(double lo, double hi, std::size_t points);

/// Log-log interpolated tau at which the C/Q ratio crosses 1, from rows of
/// (tau, ratio) sorted by descending tau. Empty if there is no crossing.
std::optional<double> crossover_tau(const std::vector<std::pair<double, double>>& tau_ratio);

/// The Synthetic-12 network for the given config (pinned JSON or seeded draw).
bn::BayesNet synthetic_network(const Exp3Config& config);

}  // namespace qkla::bench
