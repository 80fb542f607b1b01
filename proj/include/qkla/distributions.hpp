#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qkla/rng.hpp"

// Discrete probability machinery. All information quantities are in bits.
namespace qkla::dist {

class DistributionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Probability vector over the alphabet {0, ..., size()-1}.
///
/// Construction validates nonnegativity and unit mass (tolerance 1e-9).
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;
  explicit DiscreteDistribution(std::vector<double> probs);

  static DiscreteDistribution uniform(std::size_t size);
  static DiscreteDistribution point_mass(std::size_t size, std::size_t index);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t x) const { return probs_[x]; }
  std::span<const double> probs() const { return probs_; }

  auto begin() const { return probs_.begin(); }
  auto end() const { return probs_.end(); }

 private:
  std::vector<double> probs_;
};

/// Joint probability tensor over a tuple of finite variables.
///
/// Cells are stored row-major: the first variable is the most significant
/// digit of the mixed-radix index, the last variable varies fastest.
class JointTable {
 public:
  JointTable() = default;
  JointTable(std::vector<std::size_t> cards, std::vector<double> probs);

  std::size_t num_vars() const { return cards_.size(); }
  std::span<const std::size_t> cards() const { return cards_; }
  std::size_t card(std::size_t var) const { return cards_[var]; }
  std::size_t num_cells() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double operator[](std::size_t cell) const { return probs_[cell]; }

  std::size_t flat_index(std::span<const std::size_t> values) const;
  std::vector<std::size_t> unflatten(std::size_t cell) const;

  /// Marginal over `vars`, in the given order (which becomes the new
  /// variable order). Variables must be distinct.
  JointTable marginal(std::span<const std::size_t> vars) const;

  /// Same cells reinterpreted with different cardinalities whose product is
  /// unchanged; row-major order makes merging trailing variables free.
  JointTable reshaped(std::vector<std::size_t> cards) const;

  DiscreteDistribution flattened() const { return DiscreteDistribution(probs_); }

 private:
  std::vector<std::size_t> cards_;
  std::vector<double> probs_;
};

/// Clip bound (bits) and the optional fixed-point width used by quantized
/// variants.
struct ClipParams {
  double L = 1.0;
  std::optional<int> bits;

  ClipParams() = default;
  explicit ClipParams(double clip, std::optional<int> b = std::nullopt);
};

/// D_KL(p || q) in bits; +infinity when supp(p) is not inside supp(q).
double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// clip_L(log2 p(x)/q(x)) with p>0,q=0 -> +L, p=0,q>0 -> -L and p=q=0 -> 0.
double clipped_log_ratio(const DiscreteDistribution& p, const DiscreteDistribution& q,
                         std::size_t x, const ClipParams& clip);

/// g_L(x) = (l_L(x) + L) / 2L, in [0, 1].
double clipped_amplitude_weight(const DiscreteDistribution& p, const DiscreteDistribution& q,
                                std::size_t x, const ClipParams& clip);

/// Sum_x p(x) l_L(x).
double clipped_kl(const DiscreteDistribution& p, const DiscreteDistribution& q,
                  const ClipParams& clip);

/// E_p[g_L], the amplitude the QKLA circuit encodes. clipped_kl = 2L a - L.
double clipped_kl_amplitude(const DiscreteDistribution& p, const DiscreteDistribution& q,
                            const ClipParams& clip);

/// E_p[(|rho| - L) 1{|rho| > L}], an upper bound on |KL - clipped KL|.
/// Throws when supp(p) is not inside supp(q).
double clipping_bias_bound(const DiscreteDistribution& p, const DiscreteDistribution& q,
                           const ClipParams& clip);

/// I(X;Y) for a two-variable joint.
double mutual_information(const JointTable& joint);

/// I(X;Y|Z) for a three-variable joint (Z may be a flattened composite).
double conditional_mutual_information(const JointTable& joint);

/// The (X,Y) marginal of a 2-var joint and the product of its margins,
/// both flattened row-major over (x, y).
std::pair<DiscreteDistribution, DiscreteDistribution> joint_and_product(const JointTable& xy);

/// One positive-mass conditioning stratum of a three-variable joint.
struct Stratum {
  std::size_t z = 0;
  double weight = 0.0;               // p(z)
  DiscreteDistribution joint;        // p(x, y | z), row-major over (x, y)
  DiscreteDistribution product;      // p(x | z) p(y | z)
};

/// Enumerates z with p(z) > 0 in ascending order.
std::vector<Stratum> strata(const JointTable& xyz);

/// Cell counts of an empirical table; the plug-in estimators operate on these.
class CountTable {
 public:
  explicit CountTable(std::vector<std::size_t> cards);
  CountTable(std::vector<std::size_t> cards, std::vector<std::uint64_t> counts);

  void add(std::span<const std::size_t> values, std::uint64_t n = 1);
  std::uint64_t total() const { return total_; }
  std::span<const std::size_t> cards() const { return cards_; }
  std::span<const std::uint64_t> counts() const { return counts_; }

  /// Empirical frequency table. Requires total() > 0.
  JointTable empirical() const;

 private:
  std::vector<std::size_t> cards_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

double plugin_mi_estimate(std::span<const std::pair<std::size_t, std::size_t>> samples);
double plugin_cmi_estimate(std::span<const std::array<std::size_t, 3>> samples);

/// Plug-in MI of a 2-var count table.
double plugin_mi_from_counts(const CountTable& counts);
/// Plug-in CMI of a 3-var count table: sum_z p^(z) * MI^(X;Y | z).
double plugin_cmi_from_counts(const CountTable& counts);

/// Multinomial(n, probs) counts, drawn by a chain of conditional binomials.
/// Equivalent in law to tabulating n i.i.d. draws, but O(cells) per call.
std::vector<std::uint64_t> multinomial_counts(std::span<const double> probs, std::uint64_t n,
                                              Rng& rng);

DiscreteDistribution random_dirichlet(Rng& rng, std::size_t size, double alpha = 1.0);

/// Rejection-samples Dirichlet(1,1,1,1) 2x2 joints until the analytical MI
/// lies in [lo, hi]. Throws after max_attempts rejections.
JointTable random_binary_joint(Rng& rng, double lo, double hi,
                               std::size_t max_attempts = 1'000'000);

}  // namespace qkla::dist
