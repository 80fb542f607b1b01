#include "qkla/pc.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace qkla::pc {

std::uint64_t classical_sample_size(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const double n = 2.0 / (tau * tau);
  return static_cast<std::uint64_t>(std::ceil(n - 1e-9 * n));
}

namespace {

CiDecision decide(double estimate, std::uint64_t queries, Method method, double threshold) {
  return CiDecision{estimate, std::abs(estimate) <= threshold, queries, method};
}

}  // namespace

CiDecision classical_ci_test(const dist::JointTable& joint, std::size_t x, std::size_t y,
                             std::span<const std::size_t> z, const PcConfig& config, Rng& rng,
                             QueryLedger& ledger, std::uint64_t test_id) {
  const dist::JointTable xyz = bn::xyz_marginal(joint, x, y, z);
  const std::uint64_t n = classical_sample_size(config.tau);
  const std::vector<std::size_t> cards(xyz.cards().begin(), xyz.cards().end());
  const dist::CountTable counts(cards, dist::multinomial_counts(xyz.probs(), n, rng));
  ledger.add(Method::classical, test_id, 0, n);
  return decide(dist::plugin_cmi_from_counts(counts), n, Method::classical, config.decision_threshold());
}

CiDecision classical_ci_from_samples(const std::vector<std::vector<std::size_t>>& rows,
                                     std::span<const std::size_t> cards, std::size_t x,
                                     std::size_t y, std::span<const std::size_t> z,
                                     double threshold) {
  std::vector<std::size_t> zs(z.begin(), z.end());
  std::sort(zs.begin(), zs.end());
  std::size_t nz = 1;
  for (std::size_t v : zs) nz *= cards[v];
  dist::CountTable counts({cards[x], cards[y], nz});
  for (const auto& row : rows) {
    std::size_t zi = 0;
    for (std::size_t v : zs) zi = zi * cards[v] + row[v];
    const std::array<std::size_t, 3> cell{row[x], row[y], zi};
    counts.add(cell);
  }
  return decide(dist::plugin_cmi_from_counts(counts), rows.size(), Method::classical, threshold);
}

CiDecision quantum_ci_test(const dist::JointTable& joint, std::size_t x, std::size_t y,
                           std::span<const std::size_t> z, const PcConfig& config, Rng& rng,
                           QueryLedger& ledger, std::uint64_t test_id) {
  const dist::JointTable xyz = bn::xyz_marginal(joint, x, y, z);
  const qae::QaeSchedule schedule = qae::empirical_schedule(config.tau, config.L, config.n_shots);
  const std::uint64_t before = ledger.total(Method::quantum);
  const double estimate = qae::qcmie_estimate(xyz, schedule, rng, ledger, test_id);
  return decide(estimate, ledger.total(Method::quantum) - before, Method::quantum,
                config.decision_threshold());
}

CiDecision exact_ci_test(const dist::JointTable& joint, std::size_t x, std::size_t y,
                         std::span<const std::size_t> z, double threshold) {
  const double cmi = dist::conditional_mutual_information(bn::xyz_marginal(joint, x, y, z));
  return decide(cmi, 0, Method::classical, threshold);
}

// ---------------------------------------------------------------------------

namespace {

// Advances a sorted index combination; false once exhausted.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

PcResult pc_skeleton(std::size_t num_nodes, std::size_t max_depth, const CiOracle& oracle) {
  PcResult result;
  result.skeleton = bn::Skeleton::complete(num_nodes);
  bn::Skeleton& g = result.skeleton;

  for (std::size_t depth = 0; depth <= max_depth; ++depth) {
    bool any_candidate = false;
    for (std::size_t x = 0; x < num_nodes; ++x) {
      for (std::size_t y = 0; y < num_nodes; ++y) {
        if (x == y || !g.has(x, y)) continue;
        std::vector<std::size_t> adj = g.neighbors(x);
        adj.erase(std::find(adj.begin(), adj.end(), y));
        if (adj.size() < depth) continue;
        any_candidate = true;

        std::vector<std::size_t> idx(depth);
        for (std::size_t i = 0; i < depth; ++i) idx[i] = i;
        do {
          std::vector<std::size_t> z(depth);
          for (std::size_t i = 0; i < depth; ++i) z[i] = adj[idx[i]];
          const CiDecision d = oracle(x, y, z, result.num_tests++);
          if (d.independent) {
            g.remove(x, y);
            result.sepsets[{std::min(x, y), std::max(x, y)}] = z;
            break;
          }
        } while (next_combination(idx, adj.size()));
      }
    }
    if (!any_candidate) break;
  }
  return result;
}

PcResult pc_skeleton(const dist::JointTable& joint, const PcConfig& config) {
  QueryLedger ledger;
  auto oracle = [&](std::size_t x, std::size_t y, std::span<const std::size_t> z,
                    std::uint64_t test_id) {
    Rng rng = make_rng(config.seed, {test_id});
    return config.method == Method::classical
               ? classical_ci_test(joint, x, y, z, config, rng, ledger, test_id)
               : quantum_ci_test(joint, x, y, z, config, rng, ledger, test_id);
  };
  PcResult result = pc_skeleton(joint.num_vars(), config.max_depth, oracle);
  result.ledger = std::move(ledger);
  return result;
}

F1Score skeleton_f1(const bn::Skeleton& predicted, const bn::Skeleton& truth) {
  if (predicted.num_nodes() != truth.num_nodes()) throw bn::NetError("skeletons differ in node count");
  const auto pred = predicted.edges();
  const auto real = truth.edges();
  std::size_t hits = 0;
  for (const auto& [u, v] : pred) {
    if (truth.has(u, v)) ++hits;
  }
  F1Score s;
  if (pred.empty()) {
    s.precision = real.empty() ? 1.0 : 0.0;
  } else {
    s.precision = static_cast<double>(hits) / static_cast<double>(pred.size());
  }
  if (real.empty()) {
    s.recall = pred.empty() ? 1.0 : 0.0;
  } else {
    s.recall = static_cast<double>(hits) / static_cast<double>(real.size());
  }
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

std::uint64_t max_tests_bound(std::size_t n, std::size_t d) {
  std::uint64_t binom = 1;
  std::uint64_t sum = 0;
  for (std::size_t k = 0; k <= d && k <= n; ++k) {
    sum += binom;
    binom = binom * (n - k) / (k + 1);
  }
  return static_cast<std::uint64_t>(n) * n * sum;
}

}  // namespace qkla::pc
