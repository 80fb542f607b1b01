// End-to-end acceptance checks. One PASS/FAIL line per criterion, followed by
// indented lines with the measured values.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "qkla/bench/experiments.hpp"
#include "qkla/bench/result.hpp"
#include "qkla/distributions.hpp"
#include "qkla/qae_model.hpp"
#include "qkla/qkla_circuit.hpp"
#include "qkla/rng.hpp"

using namespace qkla;
using namespace qkla::bench;

namespace {

int g_failures = 0;
std::vector<std::string> g_details;

// Detail lines are held back until the verdict they belong to is printed.
void info(const char* fmt, ...) {
  char buf[512];
  std::va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  g_details.emplace_back(buf);
}

void verdict(int id, bool ok, const char* title) {
  std::printf("%s  [%d] %s\n", ok ? "PASS" : "FAIL", id, title);
  for (const auto& line : g_details) std::printf("      %s\n", line.c_str());
  g_details.clear();
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

double metric_or_nan(const ExperimentResult& r, const std::string& key) {
  const auto it = r.metrics.find(key);
  return it == r.metrics.end() ? std::nan("") : it->second;
}

// Ratio column of exp2_queries at tau, NaN when either budget was not reached.
double ratio_at(const ExperimentResult& r, double tau) {
  const Table& t = r.table("exp2_queries");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (std::abs(as_double(t.at(i, "tau")) - tau) < 1e-12) {
      const Value& v = t.at(i, "ratio");
      return is_null(v) ? std::nan("") : as_double(v);
    }
  }
  return std::nan("");
}

bool classical_reaches(const ExperimentResult& r, double tau) {
  const Table& t = r.table("exp2_queries");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (std::abs(as_double(t.at(i, "tau")) - tau) < 1e-12) return !is_null(t.at(i, "classical_queries"));
  }
  return false;
}

// ---------------------------------------------------------------------------

void check_exp1() {
  Exp1Config c;
  c.threads = worker_count();
  const ExperimentResult r = run_exp1(c);
  const double lo = r.metrics.at("peak_m_low"), hi = r.metrics.at("peak_m_high"), mass = r.metrics.at("peak_mass");
  info("peaks m = %.0f, %.0f; joint mass %.6f; a = %.6f", lo, hi, mass, r.metrics.at("amplitude"));
  verdict(1, lo == 9 && hi == 23 && within(mass, 0.77, 0.81), "Experiment 1 peaks at m = 9, 23 with mass in [0.77, 0.81]");

  const double dev = r.metrics.at("max_abs_deviation");
  info("max per-outcome deviation %.3e", dev);
  verdict(2, dev < 1e-10, "gate-level phase law matches the closed form for t = 3..8");

  const double sp = r.fitted_slopes.at("err_percentile"), sm = r.fitted_slopes.at("err_median_shots");
  info("80th-percentile slope %.4f (band [-1.6, -1.1]); 5-shot median slope %.4f (band [-1.5, -1.0])", sp, sm);
  verdict(3, within(sp, -1.6, -1.1) && within(sm, -1.5, -1.0), "error decay slopes over M = 8..256");

  const double ms = r.metrics.at("min_success_prob");
  info("minimum success probability %.6f vs %.6f", ms, 8.0 / (std::numbers::pi * std::numbers::pi));
  verdict(4, ms >= 8.0 / (std::numbers::pi * std::numbers::pi), "Pr[|a_hat - a| <= pi/M] >= 8/pi^2 for t = 3..8");
}

// ---------------------------------------------------------------------------

constexpr std::size_t kReplicates = 25;
constexpr std::array<double, 3> kTaus{0.005, 0.003, 0.002};
constexpr std::array<double, 3> kPaperRatios{2.80, 7.26, 9.42};

void check_exp2() {
  Exp2Config c;
  c.threads = worker_count();
  const ExperimentResult single = run_exp2(c);
  const ExperimentResult reps = run_exp2_replicates(c, kReplicates);

  const double cs = reps.metrics.at("median_classical_tail");
  const double qs = reps.metrics.at("median_quantum_tail");
  const double cx = metric_or_nan(reps, "median_crossover_tau");
  const bool ok5 = within(cs, -0.55, -0.45) && within(qs, -1.06, -0.96) && within(cx, 0.008, 0.035);
  info("median over %zu draws: classical %.4f, quantum %.4f, crossover tau %.4f", kReplicates, cs, qs, cx);
  info("seed %llu single draw: classical %.4f, quantum %.4f, crossover tau %.4f",
       static_cast<unsigned long long>(c.seed), single.fitted_slopes.at("classical_tail"),
       single.fitted_slopes.at("quantum_tail"), metric_or_nan(single, "crossover_tau"));
  verdict(5, ok5, "Experiment 2 slopes and crossover (median over instance draws)");

  bool ok6 = true;
  for (std::size_t i = 0; i < kTaus.size(); ++i) {
    const std::string key = "median_ratio_tau_" + format_value(kTaus[i]);
    const double med = metric_or_nan(reps, key);
    const double count = metric_or_nan(reps, "count_ratio_tau_" + format_value(kTaus[i]));
    const bool ok = within(med, 0.5 * kPaperRatios[i], 1.5 * kPaperRatios[i]);
    ok6 = ok6 && ok;
    info("tau %.3f: median C/Q ratio %.3f over %.0f draws (band [%.2f, %.2f]); seed %llu draw %.3f", kTaus[i], med,
         count, 0.5 * kPaperRatios[i], 1.5 * kPaperRatios[i], static_cast<unsigned long long>(c.seed),
         ratio_at(single, kTaus[i]));
  }
  const bool unreached = !classical_reaches(single, 0.001) && !std::isfinite(metric_or_nan(reps, "count_ratio_tau_0.001"));
  ok6 = ok6 && unreached;
  info("classical sweep reaches tau = 0.001: %s", unreached ? "no (as expected)" : "yes");
  verdict(6, ok6, "C/Q query ratios at tau = 0.005, 0.003, 0.002 and classical miss at 0.001");
}

// ---------------------------------------------------------------------------

struct SummaryRow {
  std::string network;
  double tau, f1_c, f1_q, q_c, q_q, ratio;
};

std::vector<SummaryRow> summary_rows(const ExperimentResult& r) {
  const Table& t = r.table("exp3_summary");
  std::vector<SummaryRow> rows;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    rows.push_back({std::get<std::string>(t.at(i, "network")), as_double(t.at(i, "tau")),
                    as_double(t.at(i, "f1_classical")), as_double(t.at(i, "f1_quantum")),
                    as_double(t.at(i, "queries_classical")), as_double(t.at(i, "queries_quantum")),
                    as_double(t.at(i, "query_ratio"))});
  }
  return rows;
}

void check_exp3() {
  Exp3Config c;
  c.threads = worker_count();
  const ExperimentResult r = run_exp3(c);
  const auto rows = summary_rows(r);

  bool plateau = true, have_ratio = false, ratio_ok = false;
  for (const auto& row : rows) {
    if (row.network != "asia") continue;
    if (row.tau <= 0.005 + 1e-12) {
      plateau = plateau && within(row.f1_q, 0.69, 0.85);
      info("asia tau %.3f: F1 quantum %.3f, classical %.3f; queries Q %.3e, C %.3e; ratio %.2f", row.tau, row.f1_q,
           row.f1_c, row.q_q, row.q_c, row.ratio);
    }
    if (std::abs(row.tau - 0.001) < 1e-12) {
      have_ratio = true;
      ratio_ok = within(row.ratio, 4.0, 10.0);
    }
  }
  verdict(7, plateau && have_ratio && ratio_ok, "Asia F1 plateau 0.77 +/- 0.08 and query ratio in [4, 10] at tau = 0.001");

  bool trend = true, any = false;
  for (const auto& row : rows) {
    if (row.network != "synthetic" || row.tau > 0.002 + 1e-12) continue;
    any = true;
    trend = trend && std::abs(row.f1_q - row.f1_c) <= 0.1 && row.ratio >= 2.0;
    info("synthetic tau %.3f: F1 quantum %.3f, classical %.3f; ratio %.2f", row.tau, row.f1_q, row.f1_c, row.ratio);
  }
  info("synthetic network: %.0f nodes, %.0f edges", r.metrics.at("synthetic_nodes"), r.metrics.at("synthetic_edges"));
  verdict(8, any && trend, "Synthetic-12: F1 within 0.1 and >= 2x fewer quantum queries for tau <= 0.002");
}

// ---------------------------------------------------------------------------

bool bias_bound_suite() {
  Rng rng = make_rng(kDefaultSeed, {tag_hash("accept/bias")});
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(i % 7);
    const auto p = dist::random_dirichlet(rng, n, 0.5), q = dist::random_dirichlet(rng, n, 0.5);
    const dist::ClipParams clip(0.25 + 3.0 * uniform01(rng));
    const double gap = std::abs(dist::kl_divergence(p, q) - dist::clipped_kl(p, q, clip));
    if (gap > dist::clipping_bias_bound(p, q, clip) + 1e-12) return false;
  }
  return true;
}

bool affine_identity_suite() {
  Rng rng = make_rng(kDefaultSeed, {tag_hash("accept/affine")});
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(i % 7);
    const auto p = dist::random_dirichlet(rng, n), q = dist::random_dirichlet(rng, n, 0.3);
    const dist::ClipParams clip(0.5 + 4.0 * uniform01(rng));
    worst = std::max(worst, std::abs(dist::clipped_kl(p, q, clip) -
                                     (2 * clip.L * dist::clipped_kl_amplitude(p, q, clip) - clip.L)));
  }
  return worst <= 1e-12;
}

bool qae_law_suite() {
  for (std::size_t M = 2; M <= 4096; M *= 2) {
    for (double a : {0.0, 0.01, 0.2, 0.5, 0.73, 0.999, 1.0}) {
      double s = 0.0;
      for (double p : qae::closed_form_distribution(a, M)) s += p;
      if (std::abs(s - 1.0) > 1e-12) return false;
    }
    if (std::abs(qae::closed_form_distribution(0.0, M)[0] - 1.0) > 1e-12) return false;
    if (std::abs(qae::closed_form_distribution(1.0, M)[M / 2] - 1.0) > 1e-12) return false;
  }
  for (std::size_t t = 2; t <= 6; ++t) {
    if (std::abs(circuit::run_canonical_qae(sv::UnitaryMatrix::identity(2), 0, t)[0] - 1.0) > 1e-12) return false;
    if (std::abs(circuit::run_canonical_qae(sv::pauli_x(), 0, t)[std::size_t{1} << (t - 1)] - 1.0) > 1e-12)
      return false;
  }
  return true;
}

double coverage_suite() {
  const auto sched = qae::schedule_from_precision(0.05, 0.1, 1.0);
  const dist::ClipParams clip(1.0);
  Rng rng = make_rng(kDefaultSeed, {tag_hash("accept/coverage")});
  int inside = 0;
  const int runs = 10000;
  for (int i = 0; i < runs; ++i) {
    const auto p = dist::random_dirichlet(rng, 4), q = dist::random_dirichlet(rng, 4);
    qae::QueryLedger ledger;
    const double d = qae::qkla_estimate(p, q, clip, sched, rng, ledger);
    if (std::abs(d - dist::clipped_kl(p, q, clip)) <= 0.05) ++inside;
  }
  return static_cast<double>(inside) / runs;
}

double uncompute_suite() {
  double worst = 0.0;
  const dist::DiscreteDistribution pj({0.4, 0.1, 0.1, 0.4}), pp = dist::DiscreteDistribution::uniform(4);
  worst = circuit::arith_residual(circuit::build_qkla_circuit(pj, pp, circuit::FixedPointCodec(2.0, 6)));
  Rng rng = make_rng(kDefaultSeed, {tag_hash("accept/uncompute")});
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = (i % 2) ? 4 : 2;
    const auto p = dist::random_dirichlet(rng, n), q = dist::random_dirichlet(rng, n);
    const circuit::FixedPointCodec codec(1.0 + i % 3, 3 + i % 3);
    worst = std::max(worst, circuit::arith_residual(circuit::build_qkla_circuit(p, q, codec)));
  }
  return worst;
}

double cmi_suite() {
  Rng rng = make_rng(kDefaultSeed, {tag_hash("accept/cmi")});
  double worst = 0.0;
  auto H = [](const dist::JointTable& m) {
    double h = 0.0;
    for (double p : m.probs())
      if (p > 0) h -= p * std::log2(p);
    return h;
  };
  for (int i = 0; i < 500; ++i) {
    const auto d = dist::random_dirichlet(rng, 8);
    const dist::JointTable t({2, 2, 2}, {d.begin(), d.end()});
    const double c = dist::conditional_mutual_information(t);
    double stratified = 0.0;
    for (const auto& s : dist::strata(t)) stratified += s.weight * dist::kl_divergence(s.joint, s.product);
    const std::array<std::size_t, 2> xz{0, 2}, yz{1, 2};
    const std::array<std::size_t, 1> z{2};
    const double entropic = H(t.marginal(xz)) + H(t.marginal(yz)) - H(t) - H(t.marginal(z));
    worst = std::max({worst, std::abs(c - stratified), std::abs(c - entropic)});
  }
  return worst;
}

bool ledger_suite() {
  Rng rng = make_rng(kDefaultSeed, {tag_hash("accept/ledger")});
  qae::QueryLedger a, b;
  std::uint64_t sum_a = 0, sum_b = 0, sum_classical = 0;
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t n = rng() % (1ull << 32);
    const auto m = (i % 3 == 0) ? qae::Method::classical : qae::Method::quantum;
    if (m == qae::Method::classical) sum_classical += n;
    if (i % 2) {
      a.add(m, rng() % 100, rng() % 4, n);
      sum_a += n;
    } else {
      b.add(m, rng() % 100, rng() % 4, n);
      sum_b += n;
    }
  }
  if (a.total() != sum_a || b.total() != sum_b) return false;
  a.merge(b);
  if (a.total() != sum_a + sum_b) return false;
  if (a.total(qae::Method::classical) != sum_classical) return false;
  std::uint64_t by_entry = 0;
  for (const auto& [key, n] : a.entries()) by_entry += n;
  // An estimator call charges exactly k M.
  qae::QueryLedger l;
  Rng r2 = make_rng(kDefaultSeed, {tag_hash("accept/ledger2")});
  const auto sched = qae::make_schedule(1024, 5, 3.0);
  const dist::DiscreteDistribution p({0.4, 0.1, 0.1, 0.4});
  for (int i = 0; i < 10; ++i)
    qae::qkla_estimate(p, dist::DiscreteDistribution::uniform(4), dist::ClipParams(3.0), sched, r2, l, i);
  return by_entry == a.total() && l.total() == 10u * 5120u && l.num_tests(qae::Method::quantum) == 10;
}

void check_properties() {
  const bool bias = bias_bound_suite();
  const bool affine = affine_identity_suite();
  const bool law = qae_law_suite();
  const double cover = coverage_suite();
  const double resid = uncompute_suite();
  const double cmi = cmi_suite();
  const bool ledger = ledger_suite();
  info("clipping bias bound dominance on 1000 pairs: %s", bias ? "ok" : "violated");
  info("clipped KL = 2La - L to 1e-12: %s", affine ? "ok" : "violated");
  info("QAE law normalization and a in {0, 1} certainty: %s", law ? "ok" : "violated");
  info("coverage at tau = 0.05, delta = 0.1, L = 1 over 10^4 runs: %.4f (need >= 0.9)", cover);
  info("worst uncomputation residual %.3e", resid);
  info("worst CMI cross-formula gap %.3e", cmi);
  info("ledger arithmetic: %s", ledger ? "exact" : "mismatch");
  verdict(9, bias && affine && law && cover >= 0.9 && resid < 1e-12 && cmi < 1e-10 && ledger, "property suites");
}

}  // namespace

int main() {
  try {
    check_exp1();
    check_exp2();
    check_exp3();
    check_properties();
  } catch (const std::exception& e) {
    std::printf("FAIL  acceptance run aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
