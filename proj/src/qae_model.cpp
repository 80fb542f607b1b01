#include "qkla/qae_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qkla::qae {

namespace {

constexpr double kPi = std::numbers::pi;

// Fejer kernel F_M(x) = sin^2(pi x) / (M^2 sin^2(pi x / M)), with its limit 1
// at x = 0 mod M. The integer part of x is removed before evaluating sin(pi x)
// so large x does not lose precision.
double fejer(double x, std::size_t M) {
  const double Md = static_cast<double>(M);
  const double nearest = std::round(x);
  const double d = x - nearest;
  if (d == 0.0) {
    const double r = std::fmod(nearest, Md);
    return r == 0.0 ? 1.0 : 0.0;
  }
  const double y = x / Md - std::round(x / Md);
  const double num = std::sin(kPi * d);
  const double den = Md * std::sin(kPi * y);
  return (num * num) / (den * den);
}

double omega_of(double a, std::size_t M) {
  if (!(a >= 0.0 && a <= 1.0)) throw ScheduleError("amplitude must lie in [0, 1]");
  const double theta = std::asin(std::sqrt(a));
  return static_cast<double>(M) * theta / kPi;
}

void check_M(std::size_t M) {
  if (M < 2 || (M & (M - 1)) != 0) {
    throw ScheduleError("M must be a power of two and at least 2, got " + std::to_string(M));
  }
}

}  // namespace

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1U;
  return p;
}

QaeSchedule make_schedule(std::size_t M, std::size_t k, double L) {
  check_M(M);
  if (k < 1) throw ScheduleError("k must be at least 1");
  if (!(L > 0.0)) throw ScheduleError("L must be positive");
  QaeSchedule s;
  s.M = M;
  s.k = k;
  s.L = L;
  return s;
}

QaeSchedule schedule_from_precision(double tau, double delta, double L) {
  if (!(tau > 0.0)) throw ScheduleError("tau must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ScheduleError("delta must lie in (0, 1)");
  if (!(L > 0.0)) throw ScheduleError("L must be positive");
  const auto base = static_cast<std::size_t>(std::ceil(4.0 * kPi * L / tau));
  // A relative slack keeps ceil(5 ln(1/delta)) at 5 for delta = 1/e.
  const double shots = 5.0 * std::log(1.0 / delta);
  const auto k = static_cast<std::size_t>(std::ceil(shots - 1e-9 * shots));
  QaeSchedule s = make_schedule(std::max<std::size_t>(2, next_power_of_two(base)),
                                std::max<std::size_t>(1, k), L);
  s.tau = tau;
  s.delta = delta;
  return s;
}

QaeSchedule empirical_schedule(double tau, double L, std::size_t shots) {
  if (!(tau > 0.0)) throw ScheduleError("tau must be positive");
  if (!(L > 0.0)) throw ScheduleError("L must be positive");
  const auto base = static_cast<std::size_t>(std::ceil(2.0 * kPi * L / tau));
  QaeSchedule s = make_schedule(std::max<std::size_t>(2, next_power_of_two(base)), shots, L);
  s.tau = tau;
  return s;
}

double outcome_amplitude(std::size_t m, std::size_t M) {
  const double s = std::sin(kPi * static_cast<double>(m) / static_cast<double>(M));
  return s * s;
}

dist::DiscreteDistribution closed_form_distribution(double a, std::size_t M) {
  check_M(M);
  const double omega = omega_of(a, M);
  std::vector<double> probs(M);
  for (std::size_t m = 0; m < M; ++m) {
    const double md = static_cast<double>(m);
    probs[m] = 0.5 * fejer(md - omega, M) + 0.5 * fejer(md + omega, M);
  }
  return dist::DiscreteDistribution(std::move(probs));
}

std::size_t sample_outcome(double a, std::size_t M, Rng& rng) {
  check_M(M);
  const double omega = omega_of(a, M);
  // The law is an equal mixture of two Fejer kernels centred at +omega and
  // -omega; each kernel sums to 1 over any M consecutive integers.
  const double center = uniform01(rng) < 0.5 ? omega : -omega;
  const double u = uniform01(rng);

  const auto Mi = static_cast<long long>(M);
  const auto base = static_cast<long long>(std::floor(center));
  auto wrap = [Mi](long long v) { return static_cast<std::size_t>(((v % Mi) + Mi) % Mi); };

  // Visit base, base+1, base-1, base+2, ... so the mass is consumed from the
  // peak outward and the walk is short.
  double cumulative = 0.0;
  long long offset = 0;
  for (std::size_t visited = 0; visited < M; ++visited) {
    const long long m = base + offset;
    cumulative += fejer(static_cast<double>(m) - center, M);
    if (u < cumulative) return wrap(m);
    offset = offset > 0 ? -offset : -offset + 1;
  }
  // Only reachable through rounding when u is within ~1e-15 of 1.
  const double upper = fejer(static_cast<double>(base + 1) - center, M);
  const double lower = fejer(static_cast<double>(base) - center, M);
  return wrap(upper > lower ? base + 1 : base);
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw ScheduleError("median of an empty list");
  const std::size_t mid = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  return values[mid];
}

QaeSample sample_estimate(double a, const QaeSchedule& schedule, Rng& rng) {
  check_M(schedule.M);
  std::vector<double> estimates(schedule.k);
  for (std::size_t i = 0; i < schedule.k; ++i) {
    estimates[i] = outcome_amplitude(sample_outcome(a, schedule.M, rng), schedule.M);
  }
  return QaeSample{lower_median(std::move(estimates)), schedule.queries()};
}

// ---------------------------------------------------------------------------

const char* method_name(Method m) { return m == Method::classical ? "classical" : "quantum"; }

void QueryLedger::add(Method method, std::uint64_t test_id, std::uint64_t stratum_id,
                      std::uint64_t count) {
  entries_[LedgerKey{method, test_id, stratum_id}] += count;
}

void QueryLedger::merge(const QueryLedger& other) {
  for (const auto& [key, n] : other.entries_) entries_[key] += n;
}

std::uint64_t QueryLedger::total() const {
  std::uint64_t sum = 0;
  for (const auto& [key, n] : entries_) sum += n;
  return sum;
}

std::uint64_t QueryLedger::total(Method method) const {
  std::uint64_t sum = 0;
  for (const auto& [key, n] : entries_) {
    if (key.method == method) sum += n;
  }
  return sum;
}

std::uint64_t QueryLedger::count(const LedgerKey& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second;
}

std::size_t QueryLedger::num_tests(Method method) const {
  std::size_t n = 0;
  bool have_last = false;
  std::uint64_t last = 0;
  // Entries are ordered by (method, test, stratum), so test ids are grouped.
  for (const auto& [key, count] : entries_) {
    if (key.method != method) continue;
    if (!have_last || key.test_id != last) ++n;
    have_last = true;
    last = key.test_id;
  }
  return n;
}

// ---------------------------------------------------------------------------

double qkla_estimate(const dist::DiscreteDistribution& p, const dist::DiscreteDistribution& q,
                     const dist::ClipParams& clip, const QaeSchedule& schedule, Rng& rng,
                     QueryLedger& ledger, std::uint64_t test_id, std::uint64_t stratum_id) {
  const double a = std::clamp(dist::clipped_kl_amplitude(p, q, clip), 0.0, 1.0);
  const QaeSample s = sample_estimate(a, schedule, rng);
  ledger.add(Method::quantum, test_id, stratum_id, s.queries);
  return 2.0 * clip.L * s.a_hat - clip.L;
}

double qcmie_estimate(const dist::JointTable& xyz, const QaeSchedule& per_stratum, Rng& rng,
                      QueryLedger& ledger, std::uint64_t test_id) {
  const dist::ClipParams clip(per_stratum.L);
  double total = 0.0;
  for (const dist::Stratum& s : dist::strata(xyz)) {
    total += s.weight * qkla_estimate(s.joint, s.product, clip, per_stratum, rng, ledger, test_id, s.z);
  }
  return total;
}

double qcmie_estimate(const dist::JointTable& xyz, const dist::ClipParams& clip, double tau,
                      double delta, Rng& rng, QueryLedger& ledger, std::uint64_t test_id) {
  const auto strata = dist::strata(xyz);
  const QaeSchedule schedule =
      schedule_from_precision(tau, delta / static_cast<double>(strata.size()), clip.L);
  double total = 0.0;
  for (const dist::Stratum& s : strata) {
    total += s.weight * qkla_estimate(s.joint, s.product, clip, schedule, rng, ledger, test_id, s.z);
  }
  return total;
}

}  // namespace qkla::qae
