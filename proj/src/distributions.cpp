#include "qkla/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace qkla::dist {

namespace {

constexpr double kMassTolerance = 1e-9;

void check_same_alphabet(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (p.size() != q.size()) {
    throw DistributionError("alphabet mismatch: " + std::to_string(p.size()) + " vs " +
                            std::to_string(q.size()));
  }
}

double xlog2(double p, double ratio) { return p > 0.0 ? p * std::log2(ratio) : 0.0; }

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw DistributionError("empty distribution");
  double total = 0.0;
  for (double v : probs_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DistributionError("negative or non-finite probability");
    total += v;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw DistributionError("probabilities sum to " + std::to_string(total));
  }
}

DiscreteDistribution DiscreteDistribution::uniform(std::size_t size) {
  return DiscreteDistribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

DiscreteDistribution DiscreteDistribution::point_mass(std::size_t size, std::size_t index) {
  std::vector<double> probs(size, 0.0);
  probs.at(index) = 1.0;
  return DiscreteDistribution(std::move(probs));
}

// ---------------------------------------------------------------------------

JointTable::JointTable(std::vector<std::size_t> cards, std::vector<double> probs)
    : cards_(std::move(cards)), probs_(std::move(probs)) {
  std::size_t cells = 1;
  for (std::size_t c : cards_) {
    if (c == 0) throw DistributionError("zero cardinality");
    cells *= c;
  }
  if (cells != probs_.size()) throw DistributionError("cell count does not match cardinalities");
  double total = 0.0;
  for (double v : probs_) {
    if (!(v >= 0.0)) throw DistributionError("negative probability in joint table");
    total += v;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw DistributionError("joint mass is " + std::to_string(total));
  }
}

std::size_t JointTable::flat_index(std::span<const std::size_t> values) const {
  if (values.size() != cards_.size()) throw DistributionError("wrong number of variable values");
  std::size_t index = 0;
  for (std::size_t i = 0; i < cards_.size(); ++i) {
    if (values[i] >= cards_[i]) throw DistributionError("variable value out of range");
    index = index * cards_[i] + values[i];
  }
  return index;
}

std::vector<std::size_t> JointTable::unflatten(std::size_t cell) const {
  std::vector<std::size_t> values(cards_.size());
  for (std::size_t i = cards_.size(); i-- > 0;) {
    values[i] = cell % cards_[i];
    cell /= cards_[i];
  }
  return values;
}

JointTable JointTable::marginal(std::span<const std::size_t> vars) const {
  std::vector<std::size_t> out_cards;
  out_cards.reserve(vars.size());
  std::vector<bool> seen(cards_.size(), false);
  for (std::size_t v : vars) {
    if (v >= cards_.size()) throw DistributionError("marginal variable out of range");
    if (seen[v]) throw DistributionError("duplicate marginal variable");
    seen[v] = true;
    out_cards.push_back(cards_[v]);
  }

  // Stride of each source variable inside the output index.
  std::vector<std::size_t> out_stride(cards_.size(), 0);
  std::size_t stride = 1;
  for (std::size_t i = vars.size(); i-- > 0;) {
    out_stride[vars[i]] = stride;
    stride *= out_cards[i];
  }

  std::vector<double> out(stride, 0.0);
  std::vector<std::size_t> digits(cards_.size(), 0);
  std::size_t out_index = 0;
  for (std::size_t cell = 0; cell < probs_.size(); ++cell) {
    out[out_index] += probs_[cell];
    // Increment the mixed-radix odometer (last variable fastest).
    for (std::size_t i = cards_.size(); i-- > 0;) {
      if (++digits[i] < cards_[i]) {
        out_index += out_stride[i];
        break;
      }
      out_index -= out_stride[i] * (cards_[i] - 1);
      digits[i] = 0;
    }
  }
  return JointTable(std::move(out_cards), std::move(out));
}

JointTable JointTable::reshaped(std::vector<std::size_t> cards) const {
  return JointTable(std::move(cards), probs_);
}

// ---------------------------------------------------------------------------

ClipParams::ClipParams(double clip, std::optional<int> b) : L(clip), bits(b) {
  if (!(L > 0.0)) throw DistributionError("clip bound must be positive");
  if (bits && *bits < 1) throw DistributionError("fixed-point width must be at least 1");
}

double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  check_same_alphabet(p, q);
  double total = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    if (q[x] == 0.0) return std::numeric_limits<double>::infinity();
    total += xlog2(p[x], p[x] / q[x]);
  }
  return total;
}

double clipped_log_ratio(const DiscreteDistribution& p, const DiscreteDistribution& q,
                         std::size_t x, const ClipParams& clip) {
  check_same_alphabet(p, q);
  const double px = p[x];
  const double qx = q[x];
  if (px > 0.0 && qx == 0.0) return clip.L;
  if (px == 0.0 && qx > 0.0) return -clip.L;
  if (px == 0.0 && qx == 0.0) return 0.0;
  return std::clamp(std::log2(px / qx), -clip.L, clip.L);
}

double clipped_amplitude_weight(const DiscreteDistribution& p, const DiscreteDistribution& q,
                                std::size_t x, const ClipParams& clip) {
  return (clipped_log_ratio(p, q, x, clip) + clip.L) / (2.0 * clip.L);
}

double clipped_kl(const DiscreteDistribution& p, const DiscreteDistribution& q,
                  const ClipParams& clip) {
  check_same_alphabet(p, q);
  double total = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] > 0.0) total += p[x] * clipped_log_ratio(p, q, x, clip);
  }
  return total;
}

double clipped_kl_amplitude(const DiscreteDistribution& p, const DiscreteDistribution& q,
                            const ClipParams& clip) {
  check_same_alphabet(p, q);
  double total = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] > 0.0) total += p[x] * clipped_amplitude_weight(p, q, x, clip);
  }
  return total;
}

double clipping_bias_bound(const DiscreteDistribution& p, const DiscreteDistribution& q,
                           const ClipParams& clip) {
  check_same_alphabet(p, q);
  double total = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    if (q[x] == 0.0) throw DistributionError("clipping bias bound needs supp(p) inside supp(q)");
    const double rho = std::abs(std::log2(p[x] / q[x]));
    if (rho > clip.L) total += p[x] * (rho - clip.L);
  }
  return total;
}

// ---------------------------------------------------------------------------

std::pair<DiscreteDistribution, DiscreteDistribution> joint_and_product(const JointTable& xy) {
  if (xy.num_vars() != 2) throw DistributionError("expected a two-variable joint");
  const std::size_t nx = xy.card(0);
  const std::size_t ny = xy.card(1);
  std::vector<double> px(nx, 0.0), py(ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      px[x] += xy[x * ny + y];
      py[y] += xy[x * ny + y];
    }
  }
  std::vector<double> product(nx * ny);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) product[x * ny + y] = px[x] * py[y];
  }
  std::vector<double> joint(xy.probs().begin(), xy.probs().end());
  return {DiscreteDistribution(std::move(joint)), DiscreteDistribution(std::move(product))};
}

double mutual_information(const JointTable& joint) {
  const auto [pxy, product] = joint_and_product(joint);
  return kl_divergence(pxy, product);
}

std::vector<Stratum> strata(const JointTable& xyz) {
  if (xyz.num_vars() != 3) throw DistributionError("expected a three-variable joint (X, Y, Z)");
  const std::size_t nx = xyz.card(0);
  const std::size_t ny = xyz.card(1);
  const std::size_t nz = xyz.card(2);

  std::vector<Stratum> out;
  for (std::size_t z = 0; z < nz; ++z) {
    double pz = 0.0;
    for (std::size_t xy = 0; xy < nx * ny; ++xy) pz += xyz[xy * nz + z];
    if (pz <= 0.0) continue;

    std::vector<double> cond(nx * ny);
    double mass = 0.0;
    for (std::size_t xy = 0; xy < nx * ny; ++xy) {
      cond[xy] = xyz[xy * nz + z] / pz;
      mass += cond[xy];
    }
    // Renormalize away the rounding of the division.
    for (double& v : cond) v /= mass;

    const auto [joint, product] = joint_and_product(JointTable({nx, ny}, std::move(cond)));
    out.push_back(Stratum{z, pz, joint, product});
  }
  return out;
}

double conditional_mutual_information(const JointTable& joint) {
  double total = 0.0;
  for (const Stratum& s : strata(joint)) total += s.weight * kl_divergence(s.joint, s.product);
  return total;
}

// ---------------------------------------------------------------------------

CountTable::CountTable(std::vector<std::size_t> cards) : cards_(std::move(cards)) {
  std::size_t cells = 1;
  for (std::size_t c : cards_) cells *= c;
  counts_.assign(cells, 0);
}

CountTable::CountTable(std::vector<std::size_t> cards, std::vector<std::uint64_t> counts)
    : cards_(std::move(cards)), counts_(std::move(counts)) {
  std::size_t cells = 1;
  for (std::size_t c : cards_) cells *= c;
  if (cells != counts_.size()) throw DistributionError("count table size mismatch");
  total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

void CountTable::add(std::span<const std::size_t> values, std::uint64_t n) {
  if (values.size() != cards_.size()) throw DistributionError("wrong tuple arity");
  std::size_t index = 0;
  for (std::size_t i = 0; i < cards_.size(); ++i) {
    if (values[i] >= cards_[i]) throw DistributionError("sample value out of range");
    index = index * cards_[i] + values[i];
  }
  counts_[index] += n;
  total_ += n;
}

JointTable CountTable::empirical() const {
  if (total_ == 0) throw DistributionError("empty sample");
  std::vector<double> probs(counts_.size());
  const double n = static_cast<double>(total_);
  for (std::size_t i = 0; i < counts_.size(); ++i) probs[i] = static_cast<double>(counts_[i]) / n;
  return JointTable(cards_, std::move(probs));
}

namespace {

// Plug-in MI straight from integer counts: sum n_xy/n log2(n_xy n / (n_x n_y)).
// Avoids the normalization round-off of going through JointTable.
double mi_from_cells(std::span<const std::uint64_t> cells, std::size_t nx, std::size_t ny) {
  std::vector<double> rx(nx, 0.0), ry(ny, 0.0);
  double n = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      const double c = static_cast<double>(cells[x * ny + y]);
      rx[x] += c;
      ry[y] += c;
      n += c;
    }
  }
  if (n == 0.0) return 0.0;
  double total = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      const double c = static_cast<double>(cells[x * ny + y]);
      if (c > 0.0) total += c * std::log2(c * n / (rx[x] * ry[y]));
    }
  }
  return std::max(0.0, total / n);
}

}  // namespace

double plugin_mi_from_counts(const CountTable& counts) {
  if (counts.cards().size() != 2) throw DistributionError("expected a two-variable count table");
  if (counts.total() == 0) throw DistributionError("empty sample");
  return mi_from_cells(counts.counts(), counts.cards()[0], counts.cards()[1]);
}

double plugin_cmi_from_counts(const CountTable& counts) {
  if (counts.cards().size() != 3) throw DistributionError("expected a three-variable count table");
  if (counts.total() == 0) throw DistributionError("empty sample");
  const std::size_t nx = counts.cards()[0];
  const std::size_t ny = counts.cards()[1];
  const std::size_t nz = counts.cards()[2];
  const auto all = counts.counts();
  std::vector<std::uint64_t> slice(nx * ny);
  double total = 0.0;
  for (std::size_t z = 0; z < nz; ++z) {
    std::uint64_t nzc = 0;
    for (std::size_t xy = 0; xy < nx * ny; ++xy) {
      slice[xy] = all[xy * nz + z];
      nzc += slice[xy];
    }
    if (nzc == 0) continue;
    total += static_cast<double>(nzc) * mi_from_cells(slice, nx, ny);
  }
  return total / static_cast<double>(counts.total());
}

double plugin_mi_estimate(std::span<const std::pair<std::size_t, std::size_t>> samples) {
  if (samples.empty()) throw DistributionError("empty sample");
  std::size_t nx = 0, ny = 0;
  for (const auto& [x, y] : samples) {
    nx = std::max(nx, x + 1);
    ny = std::max(ny, y + 1);
  }
  CountTable counts({nx, ny});
  for (const auto& [x, y] : samples) {
    const std::array<std::size_t, 2> v{x, y};
    counts.add(v);
  }
  return plugin_mi_from_counts(counts);
}

double plugin_cmi_estimate(std::span<const std::array<std::size_t, 3>> samples) {
  if (samples.empty()) throw DistributionError("empty sample");
  std::array<std::size_t, 3> cards{0, 0, 0};
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < 3; ++i) cards[i] = std::max(cards[i], s[i] + 1);
  }
  CountTable counts({cards[0], cards[1], cards[2]});
  for (const auto& s : samples) counts.add(s);
  return plugin_cmi_from_counts(counts);
}

// ---------------------------------------------------------------------------

std::vector<std::uint64_t> multinomial_counts(std::span<const double> probs, std::uint64_t n,
                                              Rng& rng) {
  std::vector<std::uint64_t> out(probs.size(), 0);
  double remaining_mass = 1.0;
  std::uint64_t remaining = n;
  for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
    if (probs[i] <= 0.0) continue;
    const double p = std::clamp(probs[i] / remaining_mass, 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> draw(remaining, p);
    out[i] = draw(rng);
    remaining -= out[i];
    remaining_mass -= probs[i];
    if (remaining_mass <= 0.0) break;
  }
  // The last positive-mass cell absorbs what is left.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) {
      out[i] += remaining;
      break;
    }
  }
  return out;
}

DiscreteDistribution random_dirichlet(Rng& rng, std::size_t size, double alpha) {
  if (size == 0) throw DistributionError("empty Dirichlet");
  std::vector<double> g(size);
  double total = 0.0;
  for (double& v : g) {
    if (alpha == 1.0) {
      v = standard_exponential(rng);
    } else {
      std::gamma_distribution<double> gamma(alpha, 1.0);
      v = gamma(rng);
    }
    total += v;
  }
  for (double& v : g) v /= total;
  return DiscreteDistribution(std::move(g));
}

JointTable random_binary_joint(Rng& rng, double lo, double hi, std::size_t max_attempts) {
  if (!(lo >= 0.0) || !(hi > lo)) throw DistributionError("invalid MI range");
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    const DiscreteDistribution cells = random_dirichlet(rng, 4, 1.0);
    JointTable joint({2, 2}, std::vector<double>(cells.begin(), cells.end()));
    const double mi = mutual_information(joint);
    if (mi >= lo && mi <= hi) return joint;
  }
  throw DistributionError("MI-range rejection sampler exhausted its retry cap");
}

}  // namespace qkla::dist
