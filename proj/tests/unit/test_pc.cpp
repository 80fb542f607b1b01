#include <array>
#include <cmath>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "qkla/bayesnet.hpp"
#include "qkla/pc.hpp"

using namespace qkla;
using namespace qkla::pc;

namespace {

// 0 -> 1 -> 2 with noisy copies.
dist::JointTable chain_joint() {
  const bn::Dag dag(3, {{0, 1}, {1, 2}});
  const auto net = bn::make_net(dag, {2, 2, 2}, {{0.5, 0.5}, {0.9, 0.1, 0.2, 0.8}, {0.85, 0.15, 0.1, 0.9}});
  return bn::exact_joint(net);
}

bn::Skeleton from_edges(std::size_t n, std::vector<bn::Edge> edges) {
  bn::Skeleton s(n);
  for (const auto& [u, v] : edges) s.add(u, v);
  return s;
}

}  // namespace

TEST_CASE("sample sizes and schedules") {
  CHECK(classical_sample_size(0.05) == 800);
  CHECK(classical_sample_size(0.005) == 80000);
  CHECK(classical_sample_size(0.001) == 2000000);
  CHECK(classical_sample_size(0.03) == 2223);
  CHECK(qae::empirical_schedule(0.05, 3.0, 5).queries() == 512 * 5);
  CHECK(qae::empirical_schedule(0.005, 3.0, 5).M == 4096);
}

TEST_CASE("scripted oracle: visit order and chain recovery") {
  std::vector<std::tuple<std::size_t, std::size_t, std::vector<std::size_t>>> calls;
  const CiOracle chain = [&](std::size_t x, std::size_t y, std::span<const std::size_t> z, std::uint64_t) {
    calls.emplace_back(x, y, std::vector<std::size_t>(z.begin(), z.end()));
    CiDecision d;
    d.independent = ((x == 0 && y == 2) || (x == 2 && y == 0)) && z.size() == 1 && z[0] == 1;
    return d;
  };
  const PcResult r = pc_skeleton(3, 3, chain);
  CHECK(r.skeleton == from_edges(3, {{0, 1}, {1, 2}}));
  REQUIRE(r.sepsets.count({0, 2}) == 1);
  CHECK(r.sepsets.at({0, 2}) == std::vector<std::size_t>{1});
  REQUIRE(calls.size() >= 4);
  CHECK(std::get<0>(calls[0]) == 0);
  CHECK(std::get<1>(calls[0]) == 1);
  CHECK(std::get<2>(calls[0]).empty());
  CHECK(std::get<1>(calls[1]) == 2);
  CHECK(r.num_tests == calls.size());

  calls.clear();
  const CiOracle all_indep = [&](std::size_t x, std::size_t y, std::span<const std::size_t> z, std::uint64_t) {
    calls.emplace_back(x, y, std::vector<std::size_t>(z.begin(), z.end()));
    return CiDecision{0.0, true, 0, Method::quantum};
  };
  const PcResult e = pc_skeleton(3, 3, all_indep);
  CHECK(e.skeleton.num_edges() == 0);
  CHECK(e.num_tests == 3);
  CHECK(calls[2] == std::make_tuple(std::size_t{1}, std::size_t{2}, std::vector<std::size_t>{}));
}

TEST_CASE("exact oracle on a chain and on independent nodes") {
  const auto joint = chain_joint();
  const CiOracle exact = [&](std::size_t x, std::size_t y, std::span<const std::size_t> z, std::uint64_t) {
    return exact_ci_test(joint, x, y, z, 1e-10);
  };
  CHECK(pc_skeleton(3, 3, exact).skeleton == from_edges(3, {{0, 1}, {1, 2}}));

  const auto indep = bn::exact_joint(bn::random_cpts(bn::Dag(4, {}), 3));
  const CiOracle exact2 = [&](std::size_t x, std::size_t y, std::span<const std::size_t> z, std::uint64_t) {
    return exact_ci_test(indep, x, y, z, 1e-10);
  };
  const auto r = pc_skeleton(4, 3, exact2);
  CHECK(r.skeleton.num_edges() == 0);
  CHECK(r.num_tests == 6);
}

TEST_CASE("exact oracle recovers random faithful networks") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const bn::Dag dag = bn::random_dag(7, 0.3, seed);
    const auto joint = bn::exact_joint(bn::random_cpts(dag, seed));
    const CiOracle exact = [&](std::size_t x, std::size_t y, std::span<const std::size_t> z, std::uint64_t) {
      return exact_ci_test(joint, x, y, z, 1e-10);
    };
    const auto r = pc_skeleton(7, 6, exact);
    CHECK(skeleton_f1(r.skeleton, bn::true_skeleton(dag)).f1 == 1.0);
  }
}

TEST_CASE("CI tests charge the ledger") {
  const auto joint = chain_joint();
  PcConfig cfg;
  cfg.tau = 0.05;
  Rng rng(1);
  QueryLedger ledger;
  const std::array<std::size_t, 1> z{1};
  const auto q = quantum_ci_test(joint, 0, 2, z, cfg, rng, ledger, 4);
  CHECK(q.queries == 2 * 512 * 5);
  CHECK(ledger.total(Method::quantum) == 2 * 512 * 5);
  CHECK(ledger.num_tests(Method::quantum) == 1);
  const auto c = classical_ci_test(joint, 0, 1, {}, cfg, rng, ledger, 5);
  CHECK(c.queries == 800);
  CHECK(ledger.total(Method::classical) == 800);
  CHECK_FALSE(c.independent);
  CHECK(c.method == Method::classical);

  // Explicit samples: perfectly correlated copies.
  std::vector<std::vector<std::size_t>> rows;
  for (int i = 0; i < 100; ++i) rows.push_back({std::size_t(i % 2), std::size_t(i % 2), 0});
  const std::array<std::size_t, 3> cards{2, 2, 2};
  const auto d = classical_ci_from_samples(rows, cards, 0, 1, {}, 0.01);
  CHECK(d.estimate == doctest::Approx(1.0));
  CHECK_FALSE(d.independent);
}

TEST_CASE("seeded PC runs are deterministic and within the test bound") {
  const bn::BayesNet net = bn::asia_network();
  const auto joint = bn::exact_joint(net);
  for (Method m : {Method::classical, Method::quantum}) {
    PcConfig cfg;
    cfg.tau = 0.01;
    cfg.method = m;
    cfg.seed = 77;
    const auto a = pc_skeleton(joint, cfg);
    const auto b = pc_skeleton(joint, cfg);
    CHECK(a.skeleton == b.skeleton);
    CHECK(a.ledger.entries() == b.ledger.entries());
    CHECK(a.num_tests <= max_tests_bound(8, 3));
    CHECK(a.ledger.num_tests(m) == a.num_tests);
    if (m == Method::classical) CHECK(a.ledger.total() == a.num_tests * classical_sample_size(0.01));
  }
}

TEST_CASE("skeleton F1") {
  const auto truth = from_edges(3, {{0, 1}, {0, 2}});
  const auto s = skeleton_f1(from_edges(3, {{0, 1}, {1, 2}}), truth);
  CHECK(s.precision == 0.5);
  CHECK(s.recall == 0.5);
  CHECK(s.f1 == 0.5);
  CHECK(skeleton_f1(truth, truth).f1 == 1.0);
  CHECK(skeleton_f1(bn::Skeleton(3), truth).f1 == 0.0);
  CHECK(skeleton_f1(bn::Skeleton(3), bn::Skeleton(3)).f1 == 1.0);
  const auto t = skeleton_f1(from_edges(3, {{0, 1}}), truth);
  CHECK(t.precision == 1.0);
  CHECK(t.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(max_tests_bound(3, 1) == 36);
  CHECK(max_tests_bound(8, 0) == 64);
}
