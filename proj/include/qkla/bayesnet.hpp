#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qkla/distributions.hpp"
#include "qkla/rng.hpp"

namespace qkla::bn {

class NetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Edge = std::pair<std::size_t, std::size_t>;

/// Directed acyclic graph; edges are (parent, child), kept sorted.
class Dag {
 public:
  Dag() = default;
  Dag(std::size_t num_nodes, std::vector<Edge> edges);

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(std::size_t from, std::size_t to) const;

  /// Parents in ascending index order.
  const std::vector<std::size_t>& parents(std::size_t node) const { return parents_.at(node); }
  const std::vector<std::size_t>& topological_order() const { return topo_; }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::size_t> topo_;
};

/// Undirected simple graph on num_nodes vertices.
class Skeleton {
 public:
  Skeleton() = default;
  explicit Skeleton(std::size_t num_nodes);

  static Skeleton complete(std::size_t num_nodes);

  std::size_t num_nodes() const { return n_; }
  void add(std::size_t u, std::size_t v);
  void remove(std::size_t u, std::size_t v);
  bool has(std::size_t u, std::size_t v) const;
  /// Ascending neighbor list.
  std::vector<std::size_t> neighbors(std::size_t v) const;
  /// Edges as (u, v) with u < v, ascending.
  std::vector<Edge> edges() const;
  std::size_t num_edges() const;

  bool operator==(const Skeleton& other) const = default;

 private:
  void check(std::size_t u, std::size_t v) const;

  std::size_t n_ = 0;
  std::vector<bool> adj_;
};

/// DAG plus conditional probability tables.
///
/// cpts[v] holds one row per parent configuration, rows ordered by the
/// mixed-radix value of the parents (ascending node index, first parent most
/// significant). Row r is cpts[v][r * cards[v] + value].
struct BayesNet {
  Dag dag;
  std::vector<std::size_t> cards;
  std::vector<std::vector<double>> cpts;
  std::vector<std::string> names;

  std::size_t num_nodes() const { return dag.num_nodes(); }
  std::size_t num_rows(std::size_t node) const;
  /// Row index of the parent configuration read from a full assignment.
  std::size_t parent_row(std::size_t node, std::span<const std::size_t> assignment) const;
  double prob(std::size_t node, std::size_t value, std::span<const std::size_t> assignment) const {
    return cpts[node][parent_row(node, assignment) * cards[node] + value];
  }
};

/// Validates shapes and row sums; throws NetError.
BayesNet make_net(Dag dag, std::vector<std::size_t> cards, std::vector<std::vector<double>> cpts,
                  std::vector<std::string> names = {});

/// Node indices of the Asia network.
namespace asia {
inline constexpr std::size_t smoking = 0;
inline constexpr std::size_t visit_asia = 1;
inline constexpr std::size_t tuberculosis = 2;
inline constexpr std::size_t lung_cancer = 3;
inline constexpr std::size_t bronchitis = 4;
inline constexpr std::size_t tb_or_ca = 5;
inline constexpr std::size_t xray = 6;
inline constexpr std::size_t dyspnea = 7;
}  // namespace asia

/// The eight-node chest-clinic network of Lauritzen and Spiegelhalter (1988)
/// with its textbook CPTs. Value 1 means "yes"/"positive".
BayesNet asia_network();

/// Random topological order, then each forward pair with probability
/// edge_prob. Deterministic in seed.
Dag random_dag(std::size_t n, double edge_prob, std::uint64_t seed);

/// Binary CPTs with P(node = 1 | row) ~ U[0, 1] clamped to [0.05, 0.95].
BayesNet random_cpts(const Dag& dag, std::uint64_t seed);

inline constexpr std::size_t kDefaultJointCap = std::size_t{1} << 20;

/// Full joint over all nodes (node 0 most significant).
dist::JointTable exact_joint(const BayesNet& net, std::size_t max_cells = kDefaultJointCap);

/// Three-variable (X, Y, Z) marginal where Z flattens z_vars in ascending
/// node order. An empty z_vars gives |Z| = 1.
dist::JointTable xyz_marginal(const dist::JointTable& joint, std::size_t x, std::size_t y,
                              std::span<const std::size_t> z_vars);

/// Positive-mass strata of (X, Y) given Z.
std::vector<dist::Stratum> conditional_slice(const dist::JointTable& joint, std::size_t x,
                                             std::size_t y, std::span<const std::size_t> z_vars);

/// n forward samples; each row is a full assignment indexed by node.
std::vector<std::vector<std::size_t>> ancestral_sample(const BayesNet& net, std::size_t n,
                                                       Rng& rng);

Skeleton true_skeleton(const Dag& dag);

/// JSON document {"nodes", "cardinalities", "edges", "cpts"}.
std::string to_json(const BayesNet& net);
BayesNet from_json(const std::string& text);
BayesNet load_json_file(const std::string& path);

}  // namespace qkla::bn
