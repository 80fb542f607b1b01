#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qkla/distributions.hpp"
#include "qkla/rng.hpp"

// Oracle model of canonical amplitude estimation: the outcome law is known in
// closed form, so no state vector is needed.
namespace qkla::qae {

class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct QaeSchedule {
  std::size_t M = 2;   // Grover-power register size, a power of two
  std::size_t k = 1;   // median shots
  double L = 1.0;      // clip bound (bits)
  std::optional<double> tau;
  std::optional<double> delta;

  std::uint64_t queries() const { return static_cast<std::uint64_t>(M) * k; }
};

/// Validated direct construction.
QaeSchedule make_schedule(std::size_t M, std::size_t k, double L);

/// M = 2^ceil(log2 ceil(4 pi L / tau)), k = ceil(5 ln(1/delta)).
QaeSchedule schedule_from_precision(double tau, double delta, double L);

/// The lighter schedule used by the experiments: M = next power of two of
/// ceil(2 pi L / tau), k = shots.
QaeSchedule empirical_schedule(double tau, double L, std::size_t shots);

std::size_t next_power_of_two(std::size_t n);

/// Estimate attached to phase outcome m: sin^2(pi m / M).
double outcome_amplitude(std::size_t m, std::size_t M);

/// Exact phase-register law of canonical QAE for amplitude a.
dist::DiscreteDistribution closed_form_distribution(double a, std::size_t M);

/// One exact draw from closed_form_distribution(a, M) without materializing
/// the M-vector.
std::size_t sample_outcome(double a, std::size_t M, Rng& rng);

struct QaeSample {
  double a_hat = 0.0;
  std::uint64_t queries = 0;
};

/// Median of k outcome amplitudes; queries = k M.
QaeSample sample_estimate(double a, const QaeSchedule& schedule, Rng& rng);

/// Sorted element (n-1)/2: the median for odd n, the smaller middle value
/// for even n. Throws on empty input.
double lower_median(std::vector<double> values);

enum class Method { classical, quantum };

const char* method_name(Method m);

struct LedgerKey {
  Method method = Method::quantum;
  std::uint64_t test_id = 0;
  std::uint64_t stratum_id = 0;

  auto operator<=>(const LedgerKey&) const = default;
};

/// Query / sample counters. Not synchronized: give each worker its own
/// ledger and merge in a fixed order.
class QueryLedger {
 public:
  void add(Method method, std::uint64_t test_id, std::uint64_t stratum_id, std::uint64_t count);
  void merge(const QueryLedger& other);

  std::uint64_t total() const;
  std::uint64_t total(Method method) const;
  std::uint64_t count(const LedgerKey& key) const;
  /// Number of distinct test ids recorded under `method`.
  std::size_t num_tests(Method method) const;

  const std::map<LedgerKey, std::uint64_t>& entries() const { return entries_; }

 private:
  std::map<LedgerKey, std::uint64_t> entries_;
};

/// Oracle-model QKLA: a = E_p[g_L] is computed exactly, QAE is sampled, and
/// 2L a_hat - L is returned. Adds k M to the ledger.
double qkla_estimate(const dist::DiscreteDistribution& p, const dist::DiscreteDistribution& q,
                     const dist::ClipParams& clip, const QaeSchedule& schedule, Rng& rng,
                     QueryLedger& ledger, std::uint64_t test_id = 0, std::uint64_t stratum_id = 0);

/// Stratified estimator of I(X;Y|Z) with exact weights p(z), running QKLA in
/// every positive-mass stratum with the given schedule.
double qcmie_estimate(const dist::JointTable& xyz, const QaeSchedule& per_stratum, Rng& rng,
                      QueryLedger& ledger, std::uint64_t test_id = 0);

/// Same, with the per-stratum schedule derived from (tau, delta / |Z+|, L).
double qcmie_estimate(const dist::JointTable& xyz, const dist::ClipParams& clip, double tau,
                      double delta, Rng& rng, QueryLedger& ledger, std::uint64_t test_id = 0);

}  // namespace qkla::qae
