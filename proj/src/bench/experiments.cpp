#include "qkla/bench/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>

#include "qkla/bench/slopes.hpp"
#include "qkla/distributions.hpp"
#include "qkla/parallel.hpp"
#include "qkla/pc.hpp"
#include "qkla/qae_model.hpp"
#include "qkla/qkla_circuit.hpp"

namespace qkla::bench {

using nlohmann::json;

namespace {

template <typename T>
void read_key(const json& j, const char* key, T& field) {
  if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<T>();
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& field) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    field.reset();
  } else {
    field = j.at(key).get<T>();
  }
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Value int_cell(std::uint64_t v) { return static_cast<std::int64_t>(v); }

Value seed_cell(std::uint64_t seed) { return static_cast<std::int64_t>(seed); }

dist::JointTable joint_2x2(const std::vector<double>& cells) {
  if (cells.size() != 4) throw std::invalid_argument("expected four cells for a 2x2 joint");
  return dist::JointTable({2, 2}, cells);
}

}  // namespace

// ---------------------------------------------------------------------------
// Config (de)serialization. from_json only overwrites keys that are present,
// so partial documents layer over the defaults.

void to_json(json& j, const Exp1Config& c) {
  j = json{{"seed", c.seed},       {"joint", c.joint},       {"L", c.L},
           {"bits", c.bits},       {"t_min", c.t_min},       {"t_max", c.t_max},
           {"t_detail", c.t_detail}, {"shots", c.shots},     {"trials", c.trials},
           {"percentile", c.percentile}, {"threads", c.threads}};
}

void from_json(const json& j, Exp1Config& c) {
  read_key(j, "seed", c.seed);
  read_key(j, "joint", c.joint);
  read_key(j, "L", c.L);
  read_key(j, "bits", c.bits);
  read_key(j, "t_min", c.t_min);
  read_key(j, "t_max", c.t_max);
  read_key(j, "t_detail", c.t_detail);
  read_key(j, "shots", c.shots);
  read_key(j, "trials", c.trials);
  read_key(j, "percentile", c.percentile);
  read_key(j, "threads", c.threads);
}

void to_json(json& j, const Exp2Config& c) {
  j = json{{"seed", c.seed},         {"instances", c.instances}, {"trials", c.trials},
           {"shots", c.shots},       {"L", c.L},                 {"mi_lo", c.mi_lo},
           {"mi_hi", c.mi_hi},       {"n_min", c.n_min},         {"n_max", c.n_max},
           {"n_points", c.n_points}, {"t_min", c.t_min},         {"t_max", c.t_max},
           {"quantile", c.quantile}, {"tau_grid", c.tau_grid},   {"threads", c.threads}};
}

void from_json(const json& j, Exp2Config& c) {
  read_key(j, "seed", c.seed);
  read_key(j, "instances", c.instances);
  read_key(j, "trials", c.trials);
  read_key(j, "shots", c.shots);
  read_key(j, "L", c.L);
  read_key(j, "mi_lo", c.mi_lo);
  read_key(j, "mi_hi", c.mi_hi);
  read_key(j, "n_min", c.n_min);
  read_key(j, "n_max", c.n_max);
  read_key(j, "n_points", c.n_points);
  read_key(j, "t_min", c.t_min);
  read_key(j, "t_max", c.t_max);
  read_key(j, "quantile", c.quantile);
  read_key(j, "tau_grid", c.tau_grid);
  read_key(j, "threads", c.threads);
}

void to_json(json& j, const Exp3Config& c) {
  j = json{{"seed", c.seed},
           {"trials", c.trials},
           {"tau_grid", c.tau_grid},
           {"L", c.L},
           {"shots", c.shots},
           {"max_depth", c.max_depth},
           {"threshold", optional_json(c.threshold)},
           {"include_asia", c.include_asia},
           {"include_synthetic", c.include_synthetic},
           {"synthetic_nodes", c.synthetic_nodes},
           {"synthetic_edge_prob", c.synthetic_edge_prob},
           {"synthetic_seed", c.synthetic_seed},
           {"synthetic_net_path", optional_json(c.synthetic_net_path)},
           {"threads", c.threads}};
}

void from_json(const json& j, Exp3Config& c) {
  read_key(j, "seed", c.seed);
  read_key(j, "trials", c.trials);
  read_key(j, "tau_grid", c.tau_grid);
  read_key(j, "L", c.L);
  read_key(j, "shots", c.shots);
  read_key(j, "max_depth", c.max_depth);
  read_optional(j, "threshold", c.threshold);
  read_key(j, "include_asia", c.include_asia);
  read_key(j, "include_synthetic", c.include_synthetic);
  read_key(j, "synthetic_nodes", c.synthetic_nodes);
  read_key(j, "synthetic_edge_prob", c.synthetic_edge_prob);
  read_key(j, "synthetic_seed", c.synthetic_seed);
  read_optional(j, "synthetic_net_path", c.synthetic_net_path);
  read_key(j, "threads", c.threads);
}

// ---------------------------------------------------------------------------

std::vector<std::int64_t> log_spaced_budgets(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 2) throw std::invalid_argument("bad budget grid");
  std::vector<std::int64_t> out;
  const double llo = std::log10(lo);
  const double lhi = std::log10(hi);
  for (std::size_t i = 0; i < points; ++i) {
    const double e = llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const auto b = static_cast<std::int64_t>(std::llround(std::pow(10.0, e)));
    if (out.empty() || b != out.back()) out.push_back(b);
  }
  return out;
}

std::optional<double> crossover_tau(const std::vector<std::pair<double, double>>& tau_ratio) {
  for (std::size_t i = 0; i + 1 < tau_ratio.size(); ++i) {
    const auto [t0, r0] = tau_ratio[i];
    const auto [t1, r1] = tau_ratio[i + 1];
    if (!(r0 > 0.0) || !(r1 > 0.0)) continue;
    const double l0 = std::log(r0);
    const double l1 = std::log(r1);
    if (l0 == 0.0) return t0;
    if (l0 * l1 > 0.0 || l0 == l1) continue;
    const double frac = (0.0 - l0) / (l1 - l0);
    return std::exp(std::log(t0) + frac * (std::log(t1) - std::log(t0)));
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

ExperimentResult run_exp1(const Exp1Config& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.t_min < 1 || config.t_max < config.t_min) throw std::invalid_argument("bad t range");
  if (config.shots < 1 || config.trials < 1) throw std::invalid_argument("shots and trials must be positive");

  const dist::JointTable joint = joint_2x2(config.joint);
  const auto [pxy, product] = dist::joint_and_product(joint);
  const circuit::QklaCircuit c =
      circuit::build_qkla_circuit(pxy, product, circuit::FixedPointCodec(config.L, config.bits));
  const double a = circuit::encoded_amplitude(c);
  const double target = c.quantized_target;
  const double L = config.L;

  struct PerT {
    dist::DiscreteDistribution gate;
    dist::DiscreteDistribution closed;
    double max_dev = 0.0;
    double err_pct = 0.0;
    double err_median = 0.0;
    double success = 0.0;
  };
  const std::size_t nt = config.t_max - config.t_min + 1;
  std::vector<PerT> per_t(nt);

  parallel_for(nt, config.threads, [&](std::size_t i) {
    const std::size_t t = config.t_min + i;
    const std::size_t M = std::size_t{1} << t;
    PerT& out = per_t[i];
    out.gate = circuit::run_canonical_qae(c, t);
    out.closed = qae::closed_form_distribution(a, M);

    std::vector<double> errors(M);
    for (std::size_t m = 0; m < M; ++m) {
      const double a_hat = qae::outcome_amplitude(m, M);
      out.max_dev = std::max(out.max_dev, std::abs(out.gate[m] - out.closed[m]));
      errors[m] = std::abs(2.0 * L * a_hat - L - target);
      if (std::abs(a_hat - a) <= std::numbers::pi / static_cast<double>(M)) out.success += out.gate[m];
    }
    out.err_pct = weighted_quantile(errors, out.gate.probs(), config.percentile);

    std::vector<double> trial_errors(config.trials);
    for (std::size_t r = 0; r < config.trials; ++r) {
      Rng rng = make_rng(config.seed, {tag_hash("exp1/median"), t, r});
      trial_errors[r] = std::abs(circuit::estimate_from_distribution(out.gate, config.shots, L, rng) - target);
    }
    out.err_median = qae::lower_median(std::move(trial_errors));
  });

  ExperimentResult result;
  result.experiment = "exp1";
  result.seed = config.seed;
  result.config = config;

  Table errors{"exp1_error",
               {"t", "M", "err_percentile", "err_median_shots", "success_prob", "max_abs_deviation", "seed"},
               {}};
  std::vector<Point> pct_points, med_points;
  double max_dev = 0.0;
  double min_success = 1.0;
  for (std::size_t i = 0; i < nt; ++i) {
    const std::size_t t = config.t_min + i;
    const std::size_t M = std::size_t{1} << t;
    const PerT& r = per_t[i];
    errors.add_row({int_cell(t), int_cell(M), r.err_pct, r.err_median, r.success, r.max_dev, seed_cell(config.seed)});
    pct_points.emplace_back(static_cast<double>(M), r.err_pct);
    med_points.emplace_back(static_cast<double>(M), r.err_median);
    max_dev = std::max(max_dev, r.max_dev);
    min_success = std::min(min_success, r.success);
  }

  Table phase{"exp1_phase", {"t", "m", "a_hat", "prob_gate", "prob_closed_form", "seed"}, {}};
  if (config.t_detail >= config.t_min && config.t_detail <= config.t_max) {
    const PerT& d = per_t[config.t_detail - config.t_min];
    const std::size_t M = d.gate.size();
    std::size_t first = 0;
    for (std::size_t m = 0; m < M; ++m) {
      phase.add_row({int_cell(config.t_detail), int_cell(m), qae::outcome_amplitude(m, M), d.gate[m], d.closed[m],
                     seed_cell(config.seed)});
      if (d.gate[m] > d.gate[first]) first = m;
    }
    std::size_t second = first == 0 ? 1 : 0;
    for (std::size_t m = 0; m < M; ++m) {
      if (m != first && d.gate[m] > d.gate[second]) second = m;
    }
    result.metrics["peak_m_low"] = static_cast<double>(std::min(first, second));
    result.metrics["peak_m_high"] = static_cast<double>(std::max(first, second));
    result.metrics["peak_mass"] = d.gate[first] + d.gate[second];
  }

  result.tables.push_back(std::move(phase));
  result.tables.push_back(std::move(errors));
  result.fitted_slopes["err_percentile"] = fit_loglog_slope_all(pct_points);
  result.fitted_slopes["err_median_shots"] = fit_loglog_slope_all(med_points);
  result.metrics["amplitude"] = a;
  result.metrics["quantized_target"] = target;
  result.metrics["analytic_mi"] = dist::mutual_information(joint);
  result.metrics["max_abs_deviation"] = max_dev;
  result.metrics["min_success_prob"] = min_success;
  result.metrics["uncompute_residual"] = circuit::arith_residual(c);
  result.notes["slope_fit"] = "OLS on log10(M), log10(error) over the full t range";
  result.notes["error_baseline"] = "codec-quantized clipped KL encoded by the circuit";
  result.runtime_seconds = seconds_since(start);
  return result;
}

// ---------------------------------------------------------------------------

ExperimentResult run_exp2(const Exp2Config& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.instances < 1 || config.trials < 1 || config.shots < 1) {
    throw std::invalid_argument("instances, trials and shots must be positive");
  }
  if (config.t_max < config.t_min || config.t_min < 1) throw std::invalid_argument("bad quantum grid");
  const double L = config.L;
  const std::size_t K = config.instances;

  struct Instance {
    dist::JointTable joint;
    double mi = 0.0;
    double clipped = 0.0;
    double amplitude = 0.0;
  };
  std::vector<Instance> inst(K);
  for (std::size_t k = 0; k < K; ++k) {
    Rng rng = make_rng(config.seed, {tag_hash("exp2/instance"), k});
    inst[k].joint = dist::random_binary_joint(rng, config.mi_lo, config.mi_hi);
    const auto [pxy, product] = dist::joint_and_product(inst[k].joint);
    const dist::ClipParams clip(L);
    inst[k].mi = dist::mutual_information(inst[k].joint);
    inst[k].clipped = dist::clipped_kl(pxy, product, clip);
    inst[k].amplitude = dist::clipped_kl_amplitude(pxy, product, clip);
  }

  const std::vector<std::int64_t> n_grid = log_spaced_budgets(config.n_min, config.n_max, config.n_points);
  std::vector<std::size_t> m_grid;
  for (std::size_t t = config.t_min; t <= config.t_max; ++t) m_grid.push_back(std::size_t{1} << t);

  // Per (budget, instance) cell: the configured quantile of |error| over trials.
  std::vector<double> c_cells(n_grid.size() * K), q_cells(m_grid.size() * K);
  parallel_for(c_cells.size(), config.threads, [&](std::size_t cell) {
    const std::size_t b = cell / K, k = cell % K;
    const auto n = static_cast<std::uint64_t>(n_grid[b]);
    std::vector<double> errs(config.trials);
    for (std::size_t r = 0; r < config.trials; ++r) {
      Rng rng = make_rng(config.seed, {tag_hash("exp2/classical"), b, k, r});
      const dist::CountTable counts({2, 2}, dist::multinomial_counts(inst[k].joint.probs(), n, rng));
      errs[r] = std::abs(dist::plugin_mi_from_counts(counts) - inst[k].mi);
    }
    c_cells[cell] = quantile_linear(std::move(errs), config.quantile);
  });
  parallel_for(q_cells.size(), config.threads, [&](std::size_t cell) {
    const std::size_t j = cell / K, k = cell % K;
    const qae::QaeSchedule schedule = qae::make_schedule(m_grid[j], config.shots, L);
    std::vector<double> errs(config.trials);
    for (std::size_t r = 0; r < config.trials; ++r) {
      Rng rng = make_rng(config.seed, {tag_hash("exp2/quantum"), j, k, r});
      const qae::QaeSample s = qae::sample_estimate(inst[k].amplitude, schedule, rng);
      errs[r] = std::abs(2.0 * L * s.a_hat - L - inst[k].clipped);
    }
    q_cells[cell] = quantile_linear(std::move(errs), config.quantile);
  });

  auto average = [K](const std::vector<double>& cells, std::size_t b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) sum += cells[b * K + k];
    return sum / static_cast<double>(K);
  };

  ExperimentResult result;
  result.experiment = "exp2";
  result.seed = config.seed;
  result.config = config;

  Table instances{"exp2_instances", {"instance", "p00", "p01", "p10", "p11", "mi", "clipped_kl", "amplitude", "seed"}, {}};
  for (std::size_t k = 0; k < K; ++k) {
    const auto& pr = inst[k].joint.probs();
    instances.add_row({int_cell(k), pr[0], pr[1], pr[2], pr[3], inst[k].mi, inst[k].clipped, inst[k].amplitude,
                       seed_cell(config.seed)});
  }

  Table classical{"exp2_classical", {"budget_index", "N", "queries", "err_quantile_mean", "seed"}, {}};
  std::vector<Point> c_curve;
  for (std::size_t b = 0; b < n_grid.size(); ++b) {
    const double e = average(c_cells, b);
    classical.add_row({int_cell(b), Value{n_grid[b]}, Value{n_grid[b]}, e, seed_cell(config.seed)});
    c_curve.emplace_back(static_cast<double>(n_grid[b]), e);
  }
  Table quantum{"exp2_quantum", {"budget_index", "M", "queries", "err_quantile_mean", "seed"}, {}};
  std::vector<Point> q_curve;
  for (std::size_t j = 0; j < m_grid.size(); ++j) {
    const double e = average(q_cells, j);
    const std::uint64_t queries = m_grid[j] * config.shots;
    quantum.add_row({int_cell(j), int_cell(m_grid[j]), int_cell(queries), e, seed_cell(config.seed)});
    q_curve.emplace_back(static_cast<double>(queries), e);
  }

  Table queries{"exp2_queries",
                {"tau", "classical_queries", "quantum_queries", "ratio", "theory_ratio", "seed"},
                {}};
  std::vector<std::pair<double, double>> tau_ratio;
  for (double tau : config.tau_grid) {
    std::optional<double> cq, qq;
    for (const auto& [n, e] : c_curve) {
      if (e <= tau) {
        cq = n;
        break;
      }
    }
    for (const auto& [n, e] : q_curve) {
      if (e <= tau) {
        qq = n;
        break;
      }
    }
    Value c_cell = cq ? Value{static_cast<std::int64_t>(*cq)} : Value{};
    Value q_cell = qq ? Value{static_cast<std::int64_t>(*qq)} : Value{};
    Value ratio{};
    if (cq && qq) {
      ratio = *cq / *qq;
      tau_ratio.emplace_back(tau, *cq / *qq);
    }
    const double theory = 1.0 / (static_cast<double>(config.shots) * std::numbers::pi * L * tau);
    queries.add_row({tau, c_cell, q_cell, ratio, theory, seed_cell(config.seed)});
  }

  result.tables.push_back(std::move(instances));
  result.tables.push_back(std::move(classical));
  result.tables.push_back(std::move(quantum));
  result.tables.push_back(std::move(queries));
  result.fitted_slopes["classical_tail"] = fit_loglog_slope(c_curve);
  result.fitted_slopes["quantum_tail"] = fit_loglog_slope(q_curve);
  result.metrics["classical_tail_cutoff"] = tail_cutoff(c_curve);
  result.metrics["quantum_tail_cutoff"] = tail_cutoff(q_curve);
  if (const auto x = crossover_tau(tau_ratio)) result.metrics["crossover_tau"] = *x;
  result.notes["tail"] = "budgets >= sqrt(min * max) of each grid";
  result.notes["quantum_error_baseline"] = "clipped KL at the configured L";
  result.notes["classical_error_baseline"] = "analytic mutual information";
  result.notes["queries"] = "classical: N samples; quantum: shots * M";
  result.runtime_seconds = seconds_since(start);
  return result;
}

// ---------------------------------------------------------------------------

ExperimentResult run_exp2_replicates(const Exp2Config& config, std::size_t replicates) {
  const auto start = std::chrono::steady_clock::now();
  if (replicates < 1) throw std::invalid_argument("need at least one replicate");

  std::vector<ExperimentResult> runs(replicates);
  Exp2Config inner = config;
  inner.threads = 1;
  parallel_for(replicates, config.threads, [&](std::size_t r) {
    Exp2Config c = inner;
    c.seed = derive_seed(config.seed, {tag_hash("exp2/replicate"), r});
    runs[r] = run_exp2(c);
  });

  std::vector<std::string> columns{"replicate", "replicate_seed", "classical_tail", "quantum_tail", "crossover_tau"};
  for (double tau : config.tau_grid) columns.push_back("ratio_tau_" + format_value(tau));
  columns.push_back("seed");
  Table table{"exp2_replicates", columns, {}};

  std::map<std::string, std::vector<double>> series;
  for (std::size_t r = 0; r < replicates; ++r) {
    const ExperimentResult& run = runs[r];
    std::vector<Value> row{int_cell(r), seed_cell(run.seed), run.fitted_slopes.at("classical_tail"),
                           run.fitted_slopes.at("quantum_tail")};
    series["classical_tail"].push_back(run.fitted_slopes.at("classical_tail"));
    series["quantum_tail"].push_back(run.fitted_slopes.at("quantum_tail"));
    const auto x = run.metrics.find("crossover_tau");
    if (x != run.metrics.end()) {
      row.emplace_back(x->second);
      series["crossover_tau"].push_back(x->second);
    } else {
      row.emplace_back();
    }
    const Table& q = run.table("exp2_queries");
    for (std::size_t i = 0; i < q.rows.size(); ++i) {
      const Value& ratio = q.at(i, "ratio");
      row.push_back(ratio);
      if (!is_null(ratio)) series["ratio_tau_" + format_value(q.at(i, "tau"))].push_back(as_double(ratio));
    }
    row.push_back(seed_cell(config.seed));
    table.add_row(std::move(row));
  }

  ExperimentResult result;
  result.experiment = "exp2_replicates";
  result.seed = config.seed;
  result.config = config;
  result.config["replicates"] = replicates;
  result.tables.push_back(std::move(table));
  for (const auto& [name, values] : series) {
    result.metrics["median_" + name] = quantile_linear(values, 0.5);
    result.metrics["count_" + name] = static_cast<double>(values.size());
  }
  result.notes["replicate_seeds"] = "derive_seed(seed, {tag(exp2/replicate), r})";
  result.runtime_seconds = seconds_since(start);
  return result;
}

bn::BayesNet synthetic_network(const Exp3Config& config) {
  if (config.synthetic_net_path) return bn::load_json_file(*config.synthetic_net_path);
  const bn::Dag dag = bn::random_dag(config.synthetic_nodes, config.synthetic_edge_prob, config.synthetic_seed);
  return bn::random_cpts(dag, config.synthetic_seed);
}

ExperimentResult run_exp3(const Exp3Config& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.trials < 1 || config.shots < 1) throw std::invalid_argument("trials and shots must be positive");
  if (config.tau_grid.empty()) throw std::invalid_argument("empty tau grid");

  struct Network {
    std::string name;
    bn::BayesNet net;
    dist::JointTable joint;
    bn::Skeleton truth;
  };
  std::vector<Network> nets;
  auto add_net = [&](std::string name, bn::BayesNet net) {
    dist::JointTable joint = bn::exact_joint(net);
    bn::Skeleton truth = bn::true_skeleton(net.dag);
    nets.push_back({std::move(name), std::move(net), std::move(joint), std::move(truth)});
  };
  if (config.include_asia) add_net("asia", bn::asia_network());
  if (config.include_synthetic) add_net("synthetic", synthetic_network(config));
  if (nets.empty()) throw std::invalid_argument("no networks selected");

  const std::array<qae::Method, 2> methods{qae::Method::classical, qae::Method::quantum};
  const std::size_t n_tau = config.tau_grid.size();
  const std::size_t n_cells = nets.size() * n_tau * methods.size();
  const std::size_t n_runs = n_cells * config.trials;

  struct Run {
    pc::F1Score score;
    std::uint64_t queries = 0;
    std::uint64_t tests = 0;
  };
  std::vector<Run> runs(n_runs);
  parallel_for(n_runs, config.threads, [&](std::size_t i) {
    const std::size_t trial = i % config.trials;
    const std::size_t cell = i / config.trials;
    const std::size_t mi = cell % methods.size();
    const std::size_t ti = (cell / methods.size()) % n_tau;
    const std::size_t ni = cell / (methods.size() * n_tau);

    pc::PcConfig pcc;
    pcc.max_depth = config.max_depth;
    pcc.tau = config.tau_grid[ti];
    pcc.threshold = config.threshold;
    pcc.method = methods[mi];
    pcc.L = config.L;
    pcc.n_shots = config.shots;
    pcc.seed = derive_seed(config.seed, {tag_hash("exp3"), ni, ti, mi, trial});
    const pc::PcResult r = pc::pc_skeleton(nets[ni].joint, pcc);
    runs[i] = Run{pc::skeleton_f1(r.skeleton, nets[ni].truth), r.ledger.total(), r.num_tests};
  });

  ExperimentResult result;
  result.experiment = "exp3";
  result.seed = config.seed;
  result.config = config;

  Table cells{"exp3_cells",
              {"network", "tau", "method", "per_test_budget", "trials", "f1_mean", "f1_sd", "precision_mean",
               "recall_mean", "queries_mean", "tests_mean", "seed"},
              {}};
  Table summary{"exp3_summary",
                {"network", "tau", "classical_N", "quantum_M", "f1_classical", "queries_classical", "f1_quantum",
                 "queries_quantum", "query_ratio", "seed"},
                {}};

  for (std::size_t ni = 0; ni < nets.size(); ++ni) {
    for (std::size_t ti = 0; ti < n_tau; ++ti) {
      const double tau = config.tau_grid[ti];
      const std::uint64_t n_classical = pc::classical_sample_size(tau);
      const std::size_t m_quantum = qae::empirical_schedule(tau, config.L, config.shots).M;
      std::array<double, 2> f1_mean{}, q_mean{};
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const std::size_t cell = (ni * n_tau + ti) * methods.size() + mi;
        double f1 = 0, f1sq = 0, prec = 0, rec = 0, q = 0, tests = 0;
        for (std::size_t r = 0; r < config.trials; ++r) {
          const Run& run = runs[cell * config.trials + r];
          f1 += run.score.f1;
          f1sq += run.score.f1 * run.score.f1;
          prec += run.score.precision;
          rec += run.score.recall;
          q += static_cast<double>(run.queries);
          tests += static_cast<double>(run.tests);
        }
        const double n = static_cast<double>(config.trials);
        const double mean = f1 / n;
        const double var = config.trials > 1 ? std::max(0.0, (f1sq - n * mean * mean) / (n - 1.0)) : 0.0;
        const std::uint64_t budget = methods[mi] == qae::Method::classical ? n_classical : m_quantum;
        cells.add_row({nets[ni].name, tau, std::string(qae::method_name(methods[mi])), int_cell(budget),
                       int_cell(config.trials), mean, std::sqrt(var), prec / n, rec / n, q / n, tests / n,
                       seed_cell(config.seed)});
        f1_mean[mi] = mean;
        q_mean[mi] = q / n;
      }
      summary.add_row({nets[ni].name, tau, int_cell(n_classical), int_cell(m_quantum), f1_mean[0], q_mean[0],
                       f1_mean[1], q_mean[1], q_mean[0] / q_mean[1], seed_cell(config.seed)});
    }
    result.metrics[nets[ni].name + "_nodes"] = static_cast<double>(nets[ni].net.num_nodes());
    result.metrics[nets[ni].name + "_edges"] = static_cast<double>(nets[ni].net.dag.num_edges());
  }

  result.tables.push_back(std::move(cells));
  result.tables.push_back(std::move(summary));
  result.notes["threshold"] = config.threshold ? std::to_string(*config.threshold) : "tau";
  result.notes["pc_variant"] = "original-order PC, ascending node index, lexicographic conditioning sets";
  result.notes["classical_sampling"] = "multinomial counts from the exact (X,Y,Z) marginal per test";
  result.runtime_seconds = seconds_since(start);
  return result;
}

}  // namespace qkla::bench
