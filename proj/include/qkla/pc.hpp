#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "qkla/bayesnet.hpp"
#include "qkla/distributions.hpp"
#include "qkla/qae_model.hpp"
#include "qkla/rng.hpp"

// PC skeleton search with pluggable conditional-independence tests.
namespace qkla::pc {

using qae::Method;
using qae::QueryLedger;

struct PcConfig {
  std::size_t max_depth = 3;
  double tau = 0.01;
  /// Decision threshold on |estimate|; defaults to tau.
  std::optional<double> threshold;
  Method method = Method::quantum;
  double L = 3.0;
  std::size_t n_shots = 5;
  std::uint64_t seed = 0;

  double decision_threshold() const { return threshold.value_or(tau); }
};

struct CiDecision {
  double estimate = 0.0;
  bool independent = false;
  std::uint64_t queries = 0;
  Method method = Method::quantum;
};

/// ceil(2 / tau^2), with a relative slack so 2/0.05^2 stays 800.
std::uint64_t classical_sample_size(double tau);

/// Plug-in CMI on N = classical_sample_size(tau) fresh draws from the exact
/// (X, Y, Z) marginal. The draw is a multinomial count vector, which has the
/// same law as tabulating N ancestral samples.
CiDecision classical_ci_test(const dist::JointTable& joint, std::size_t x, std::size_t y,
                             std::span<const std::size_t> z, const PcConfig& config, Rng& rng,
                             QueryLedger& ledger, std::uint64_t test_id);

/// Plug-in CMI on explicit sample rows (full assignments indexed by node).
CiDecision classical_ci_from_samples(const std::vector<std::vector<std::size_t>>& rows,
                                     std::span<const std::size_t> cards, std::size_t x,
                                     std::size_t y, std::span<const std::size_t> z,
                                     double threshold);

/// QCMIE with the empirical schedule (M from tau and L, k = n_shots) and exact
/// stratum weights.
CiDecision quantum_ci_test(const dist::JointTable& joint, std::size_t x, std::size_t y,
                           std::span<const std::size_t> z, const PcConfig& config, Rng& rng,
                           QueryLedger& ledger, std::uint64_t test_id);

/// Exact CMI against the threshold; no queries.
CiDecision exact_ci_test(const dist::JointTable& joint, std::size_t x, std::size_t y,
                         std::span<const std::size_t> z, double threshold);

/// CI oracle used by the search: (x, y, z, test_id) -> decision.
using CiOracle = std::function<CiDecision(std::size_t, std::size_t, std::span<const std::size_t>,
                                          std::uint64_t)>;

struct PcResult {
  bn::Skeleton skeleton;
  std::map<bn::Edge, std::vector<std::size_t>> sepsets;  // keyed with u < v
  QueryLedger ledger;
  std::uint64_t num_tests = 0;
};

/// Original-order PC: start from the complete graph; for depth 0..max_depth
/// visit ordered adjacent pairs (x, y) by ascending index, try subsets of
/// adj(x) \ {y} of that size in lexicographic order and delete the edge at
/// the first independence. Adjacencies are re-read after every deletion.
PcResult pc_skeleton(std::size_t num_nodes, std::size_t max_depth, const CiOracle& oracle);

/// PC driven by classical_ci_test or quantum_ci_test per config.method.
/// Test i draws from make_rng(config.seed, {i}).
PcResult pc_skeleton(const dist::JointTable& joint, const PcConfig& config);

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Empty predicted set: precision 1 if the truth is empty too, else 0.
F1Score skeleton_f1(const bn::Skeleton& predicted, const bn::Skeleton& truth);

/// n^2 * sum_{k <= d} C(n, k): a ceiling on the number of CI tests.
std::uint64_t max_tests_bound(std::size_t n, std::size_t d);

}  // namespace qkla::pc
