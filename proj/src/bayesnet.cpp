#include "qkla/bayesnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace qkla::bn {

using nlohmann::json;

Dag::Dag(std::size_t num_nodes, std::vector<Edge> edges) : n_(num_nodes), edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw NetError("duplicate edge");
  }
  parents_.assign(n_, {});
  std::vector<std::vector<std::size_t>> children(n_);
  for (const auto& [from, to] : edges_) {
    if (from >= n_ || to >= n_) throw NetError("edge endpoint out of range");
    if (from == to) throw NetError("self-loop on node " + std::to_string(from));
    parents_[to].push_back(from);
    children[from].push_back(to);
  }
  for (auto& ps : parents_) std::sort(ps.begin(), ps.end());

  // Kahn's algorithm, smallest ready index first, so the order is canonical.
  std::vector<std::size_t> indegree(n_);
  for (std::size_t v = 0; v < n_; ++v) indegree[v] = parents_[v].size();
  std::vector<std::size_t> ready;
  for (std::size_t v = n_; v-- > 0;) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), std::greater<>());
    const std::size_t v = ready.back();
    ready.pop_back();
    topo_.push_back(v);
    for (std::size_t c : children[v]) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  if (topo_.size() != n_) throw NetError("graph has a directed cycle");
}

bool Dag::has_edge(std::size_t from, std::size_t to) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
}

// ---------------------------------------------------------------------------

Skeleton::Skeleton(std::size_t num_nodes) : n_(num_nodes), adj_(num_nodes * num_nodes, false) {}

Skeleton Skeleton::complete(std::size_t num_nodes) {
  Skeleton s(num_nodes);
  for (std::size_t u = 0; u < num_nodes; ++u) {
    for (std::size_t v = u + 1; v < num_nodes; ++v) s.add(u, v);
  }
  return s;
}

void Skeleton::check(std::size_t u, std::size_t v) const {
  if (u >= n_ || v >= n_) throw NetError("skeleton vertex out of range");
  if (u == v) throw NetError("skeleton self-loop");
}

void Skeleton::add(std::size_t u, std::size_t v) {
  check(u, v);
  adj_[u * n_ + v] = adj_[v * n_ + u] = true;
}

void Skeleton::remove(std::size_t u, std::size_t v) {
  check(u, v);
  adj_[u * n_ + v] = adj_[v * n_ + u] = false;
}

bool Skeleton::has(std::size_t u, std::size_t v) const {
  check(u, v);
  return adj_[u * n_ + v];
}

std::vector<std::size_t> Skeleton::neighbors(std::size_t v) const {
  std::vector<std::size_t> out;
  for (std::size_t u = 0; u < n_; ++u) {
    if (u != v && adj_[v * n_ + u]) out.push_back(u);
  }
  return out;
}

std::vector<Edge> Skeleton::edges() const {
  std::vector<Edge> out;
  for (std::size_t u = 0; u < n_; ++u) {
    for (std::size_t v = u + 1; v < n_; ++v) {
      if (adj_[u * n_ + v]) out.emplace_back(u, v);
    }
  }
  return out;
}

std::size_t Skeleton::num_edges() const { return edges().size(); }

// ---------------------------------------------------------------------------

std::size_t BayesNet::num_rows(std::size_t node) const {
  std::size_t rows = 1;
  for (std::size_t p : dag.parents(node)) rows *= cards[p];
  return rows;
}

std::size_t BayesNet::parent_row(std::size_t node, std::span<const std::size_t> assignment) const {
  std::size_t row = 0;
  for (std::size_t p : dag.parents(node)) row = row * cards[p] + assignment[p];
  return row;
}

BayesNet make_net(Dag dag, std::vector<std::size_t> cards, std::vector<std::vector<double>> cpts,
                  std::vector<std::string> names) {
  const std::size_t n = dag.num_nodes();
  if (cards.size() != n || cpts.size() != n) throw NetError("cardinality/CPT count does not match node count");
  if (names.empty()) {
    for (std::size_t v = 0; v < n; ++v) names.push_back("X" + std::to_string(v));
  }
  if (names.size() != n) throw NetError("name count does not match node count");

  BayesNet net{std::move(dag), std::move(cards), std::move(cpts), std::move(names)};
  for (std::size_t v = 0; v < n; ++v) {
    if (net.cards[v] < 1) throw NetError("zero cardinality");
    const std::size_t rows = net.num_rows(v);
    if (net.cpts[v].size() != rows * net.cards[v]) {
      throw NetError("CPT of node " + std::to_string(v) + " has wrong size");
    }
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::size_t x = 0; x < net.cards[v]; ++x) {
        const double pr = net.cpts[v][r * net.cards[v] + x];
        if (!(pr >= 0.0)) throw NetError("negative CPT entry");
        sum += pr;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw NetError("CPT row " + std::to_string(r) + " of node " + std::to_string(v) + " does not sum to 1");
      }
    }
  }
  return net;
}

BayesNet asia_network() {
  using namespace asia;
  Dag dag(8, {{visit_asia, tuberculosis},
              {smoking, lung_cancer},
              {smoking, bronchitis},
              {tuberculosis, tb_or_ca},
              {lung_cancer, tb_or_ca},
              {tb_or_ca, xray},
              {tb_or_ca, dyspnea},
              {bronchitis, dyspnea}});
  auto bern = [](std::initializer_list<double> p_yes) {
    std::vector<double> rows;
    for (double p : p_yes) {
      rows.push_back(1.0 - p);
      rows.push_back(p);
    }
    return rows;
  };
  std::vector<std::vector<double>> cpts(8);
  cpts[smoking] = bern({0.5});
  cpts[visit_asia] = bern({0.01});
  cpts[tuberculosis] = bern({0.01, 0.05});           // | asia
  cpts[lung_cancer] = bern({0.01, 0.1});             // | smoking
  cpts[bronchitis] = bern({0.3, 0.6});               // | smoking
  cpts[tb_or_ca] = bern({0.0, 1.0, 1.0, 1.0});       // | tub, lung (logical OR)
  cpts[xray] = bern({0.05, 0.98});                   // | either
  cpts[dyspnea] = bern({0.1, 0.7, 0.8, 0.9});        // | bronc, either
  return make_net(std::move(dag), std::vector<std::size_t>(8, 2), std::move(cpts),
                  {"Smoking", "VisitAsia", "Tuberculosis", "LungCancer", "Bronchitis", "TbOrCa",
                   "XRay", "Dyspnea"});
}

Dag random_dag(std::size_t n, double edge_prob, std::uint64_t seed) {
  if (n < 1) throw NetError("random_dag needs at least one node");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw NetError("edge probability must lie in [0, 1]");
  Rng rng = make_rng(seed, {tag_hash("random_dag")});

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i-- > 1;) {
    const auto j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (uniform01(rng) < edge_prob) edges.emplace_back(order[i], order[j]);
    }
  }
  return Dag(n, std::move(edges));
}

BayesNet random_cpts(const Dag& dag, std::uint64_t seed) {
  Rng rng = make_rng(seed, {tag_hash("random_cpts")});
  const std::size_t n = dag.num_nodes();
  std::vector<std::vector<double>> cpts(n);
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t rows = std::size_t{1} << dag.parents(v).size();
    for (std::size_t r = 0; r < rows; ++r) {
      const double p = std::clamp(uniform01(rng), 0.05, 0.95);
      cpts[v].push_back(1.0 - p);
      cpts[v].push_back(p);
    }
  }
  return make_net(dag, std::vector<std::size_t>(n, 2), std::move(cpts));
}

dist::JointTable exact_joint(const BayesNet& net, std::size_t max_cells) {
  const std::size_t n = net.num_nodes();
  std::size_t cells = 1;
  for (std::size_t c : net.cards) {
    if (cells > max_cells / c) throw NetError("joint state space exceeds the cap");
    cells *= c;
  }
  std::vector<double> probs(cells);
  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    double p = 1.0;
    for (std::size_t v = 0; v < n && p > 0.0; ++v) p *= net.prob(v, assignment[v], assignment);
    probs[cell] = p;
    // Advance the odometer; the last node varies fastest.
    for (std::size_t v = n; v-- > 0;) {
      if (++assignment[v] < net.cards[v]) break;
      assignment[v] = 0;
    }
  }
  return dist::JointTable(net.cards, std::move(probs));
}

dist::JointTable xyz_marginal(const dist::JointTable& joint, std::size_t x, std::size_t y,
                              std::span<const std::size_t> z_vars) {
  std::vector<std::size_t> z(z_vars.begin(), z_vars.end());
  std::sort(z.begin(), z.end());
  if (x == y) throw NetError("X and Y must differ");
  for (std::size_t v : z) {
    if (v == x || v == y) throw NetError("conditioning set overlaps X or Y");
  }
  if (std::adjacent_find(z.begin(), z.end()) != z.end()) throw NetError("duplicate conditioning variable");

  std::vector<std::size_t> vars{x, y};
  vars.insert(vars.end(), z.begin(), z.end());
  dist::JointTable m = joint.marginal(vars);
  std::size_t nz = 1;
  for (std::size_t v : z) nz *= joint.card(v);
  return m.reshaped({joint.card(x), joint.card(y), nz});
}

std::vector<dist::Stratum> conditional_slice(const dist::JointTable& joint, std::size_t x,
                                             std::size_t y, std::span<const std::size_t> z_vars) {
  return dist::strata(xyz_marginal(joint, x, y, z_vars));
}

std::vector<std::vector<std::size_t>> ancestral_sample(const BayesNet& net, std::size_t n, Rng& rng) {
  std::vector<std::vector<std::size_t>> out(n, std::vector<std::size_t>(net.num_nodes(), 0));
  for (auto& row : out) {
    for (std::size_t v : net.dag.topological_order()) {
      const std::size_t base = net.parent_row(v, row) * net.cards[v];
      const double u = uniform01(rng);
      double cumulative = 0.0;
      std::size_t value = net.cards[v] - 1;
      for (std::size_t x = 0; x < net.cards[v]; ++x) {
        cumulative += net.cpts[v][base + x];
        if (u < cumulative) {
          value = x;
          break;
        }
      }
      // Guard against the rounding sliver landing on a zero-probability value.
      while (net.cpts[v][base + value] == 0.0 && value > 0) --value;
      row[v] = value;
    }
  }
  return out;
}

Skeleton true_skeleton(const Dag& dag) {
  Skeleton s(dag.num_nodes());
  for (const auto& [from, to] : dag.edges()) s.add(from, to);
  return s;
}

// ---------------------------------------------------------------------------

std::string to_json(const BayesNet& net) {
  json doc;
  doc["nodes"] = net.names;
  doc["cardinalities"] = net.cards;
  json edges = json::array();
  for (const auto& [from, to] : net.dag.edges()) edges.push_back({from, to});
  doc["edges"] = edges;
  json cpts = json::array();
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    json rows = json::array();
    for (std::size_t r = 0; r < net.num_rows(v); ++r) {
      const auto first = net.cpts[v].begin() + static_cast<std::ptrdiff_t>(r * net.cards[v]);
      rows.push_back(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(net.cards[v])));
    }
    cpts.push_back(rows);
  }
  doc["cpts"] = cpts;
  return doc.dump(2);
}

BayesNet from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
    const auto names = doc.at("nodes").get<std::vector<std::string>>();
    const auto cards = doc.at("cardinalities").get<std::vector<std::size_t>>();
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges")) edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
    std::vector<std::vector<double>> cpts;
    for (const auto& rows : doc.at("cpts")) {
      std::vector<double> flat;
      for (const auto& row : rows) {
        for (double p : row.get<std::vector<double>>()) flat.push_back(p);
      }
      cpts.push_back(std::move(flat));
    }
    return make_net(Dag(names.size(), std::move(edges)), cards, std::move(cpts), names);
  } catch (const json::exception& e) {
    throw NetError(std::string("malformed network JSON: ") + e.what());
  }
}

BayesNet load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NetError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

}  // namespace qkla::bn
