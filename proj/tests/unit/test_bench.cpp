#include <cmath>
#include <vector>

#include "doctest.h"
#include "qkla/bench/experiments.hpp"
#include "qkla/bench/result.hpp"
#include "qkla/bench/slopes.hpp"

using namespace qkla::bench;

TEST_CASE("slope fits recover exact power laws") {
  for (double slope : {-0.5, -1.0, -1.38, 0.7}) {
    std::vector<Point> pts;
    for (int i = 0; i < 12; ++i) {
      const double b = std::pow(2.0, 3 + i);
      pts.push_back({b, 3.7 * std::pow(b, slope)});
    }
    CHECK(fit_loglog_slope_all(pts) == doctest::Approx(slope).epsilon(1e-12));
    CHECK(fit_loglog_slope(pts) == doctest::Approx(slope).epsilon(1e-12));
  }
}

TEST_CASE("tail fit ignores the pre-asymptotic head") {
  std::vector<Point> pts;
  for (int t = 3; t <= 13; ++t) {
    const double b = std::pow(2.0, t);
    pts.push_back({b, t < 8 ? 0.5 : 20.0 / b});
  }
  CHECK(tail_cutoff(pts) == doctest::Approx(256.0));
  CHECK(fit_loglog_slope(pts) == doctest::Approx(-1.0).epsilon(1e-12));
  const std::vector<Point> short_tail{{1, 1}, {10, 0.1}, {100, 0.01}};
  CHECK_THROWS_AS(fit_loglog_slope(short_tail), FitError);
  const std::vector<Point> bad{{1, 1}, {10, 0.0}};
  CHECK_THROWS_AS(fit_loglog_slope_all(bad), FitError);
}

TEST_CASE("quantiles") {
  CHECK(quantile_linear({1, 2, 3, 4, 5}, 0.5) == 3.0);
  CHECK(quantile_linear({1, 2, 3, 4}, 0.9) == doctest::Approx(3.7));
  CHECK(quantile_linear({5, 1}, 0.0) == 1.0);
  CHECK(quantile_linear({5, 1}, 1.0) == 5.0);
  CHECK_THROWS_AS(quantile_linear({}, 0.5), FitError);
  const std::vector<double> v{0.3, 0.1, 0.2}, w{0.5, 0.2, 0.3};
  CHECK(weighted_quantile(v, w, 0.2) == 0.1);
  CHECK(weighted_quantile(v, w, 0.5) == 0.2);
  CHECK(weighted_quantile(v, w, 0.5000000000001) == 0.2);  // rounding slack
  CHECK(weighted_quantile(v, w, 0.51) == 0.3);
  CHECK(weighted_quantile(v, w, 0.4) == 0.2);
}

TEST_CASE("budgets and crossover") {
  const auto n = log_spaced_budgets(50, 5e5, 30);
  CHECK(n.size() == 30);
  CHECK(n.front() == 50);
  CHECK(n.back() == 500000);
  for (std::size_t i = 1; i < n.size(); ++i) CHECK(n[i] > n[i - 1]);
  const auto c = crossover_tau({{0.1, 0.25}, {0.01, 4.0}});
  REQUIRE(c.has_value());
  CHECK(*c == doctest::Approx(std::pow(10.0, -1.5)));
  CHECK_FALSE(crossover_tau({{0.1, 2.0}, {0.01, 4.0}}).has_value());
}

TEST_CASE("CSV and JSON serialization") {
  Table t{"demo", {"a", "b", "c"}, {}};
  t.add_row({std::int64_t{3}, 0.125, std::string("x")});
  t.add_row({std::monostate{}, 1e-7, std::string("y")});
  CHECK_THROWS(t.add_row({std::int64_t{1}}));
  CHECK(to_csv(t) == "# schema=1 table=demo\na,b,c\n3,0.125,x\n,1e-07,y\n");
  CHECK(is_null(t.at(1, "a")));
  CHECK(as_double(t.at(0, "a")) == 3.0);

  ExperimentResult r;
  r.experiment = "demo";
  r.seed = 11;
  r.config = {{"k", 1}};
  r.tables.push_back(t);
  r.fitted_slopes["s"] = -1.25;
  r.metrics["m"] = 0.5;
  r.notes["n"] = "text";
  const ExperimentResult back = result_from_json(to_json(r));
  CHECK(back.experiment == "demo");
  CHECK(back.seed == 11);
  CHECK(back.fitted_slopes.at("s") == -1.25);
  CHECK(back.notes.at("n") == "text");
  CHECK(to_csv(back.table("demo")) == to_csv(t));
  CHECK_THROWS(back.table("nope"));
}

TEST_CASE("config JSON overrides only present keys") {
  Exp2Config c;
  from_json(nlohmann::json{{"trials", 7}}, c);
  CHECK(c.trials == 7);
  CHECK(c.instances == 20);
  nlohmann::json j;
  to_json(j, c);
  Exp2Config d;
  from_json(j, d);
  CHECK(d.trials == 7);
  CHECK(d.tau_grid == c.tau_grid);
}

TEST_CASE("experiment output does not depend on the thread count") {
  Exp2Config c2;
  c2.instances = 3;
  c2.trials = 10;
  c2.n_points = 8;
  c2.t_max = 9;
  Exp2Config c2b = c2;
  c2b.threads = 4;
  const auto a = run_exp2(c2), b = run_exp2(c2b);
  REQUIRE(a.tables.size() == b.tables.size());
  for (std::size_t i = 0; i < a.tables.size(); ++i) CHECK(to_csv(a.tables[i]) == to_csv(b.tables[i]));

  Exp3Config c3;
  c3.trials = 2;
  c3.tau_grid = {0.05, 0.01};
  c3.include_synthetic = false;
  Exp3Config c3b = c3;
  c3b.threads = 3;
  const auto x = run_exp3(c3), y = run_exp3(c3b);
  for (std::size_t i = 0; i < x.tables.size(); ++i) CHECK(to_csv(x.tables[i]) == to_csv(y.tables[i]));

  Exp1Config c1;
  c1.trials = 51;
  c1.t_max = 7;
  Exp1Config c1b = c1;
  c1b.threads = 4;
  const auto p = run_exp1(c1), q = run_exp1(c1b);
  for (std::size_t i = 0; i < p.tables.size(); ++i) CHECK(to_csv(p.tables[i]) == to_csv(q.tables[i]));
}

TEST_CASE("synthetic network is the seeded draw") {
  Exp3Config c;
  const auto net = synthetic_network(c);
  CHECK(net.num_nodes() == 12);
  CHECK(net.dag.edges() == qkla::bn::random_dag(12, 0.22, 11).edges());
}
