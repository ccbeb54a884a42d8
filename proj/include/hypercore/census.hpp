#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "hypercore/hypergraph.hpp"
#include "hypercore/rng.hpp"
#include "hypercore/tree.hpp"

// Canonical codes for depth-s marked rooted factor trees, empirical
// neighborhood distributions, Monte Carlo tree censuses and their
// total-variation comparison.
//
// Depth convention: ball radius counts factor-graph edges, so a variable's
// hypergraph neighbors sit at factor-graph distance 2.

namespace hypercore {

// Content-derived code of the isomorphism class of a rooted marked
// alternating tree: token "v<label>" or "f<label>" followed by the
// parenthesized, lexicographically sorted child codes. Stable v1 format,
// safe for golden files. Nodes below max_depth are ignored.
inline std::string canonical_code(const MarkedTree& tree, int max_depth = 1 << 20) {
  const std::size_t n = tree.size();
  if (n == 0) throw std::invalid_argument("canonical_code: empty tree");
  std::vector<std::string> code(n);
  for (std::size_t idx = n; idx-- > 0;) {
    const auto& nd = tree.nodes[idx];
    if (nd.depth > max_depth) continue;
    std::vector<std::string> kids;
    if (nd.depth < max_depth)
      for (std::uint32_t c = 0; c < nd.num_children; ++c)
        kids.push_back(std::move(code[nd.first_child + c]));
    std::sort(kids.begin(), kids.end());
    std::string s;
    s += tree.is_variable(idx) ? 'v' : 'f';
    s += (char)('0' + (tree.labels[idx] & 0x0f));
    s += '(';
    for (auto& kc : kids) s += kc;
    s += ')';
    code[idx] = std::move(s);
  }
  return code[0];
}

inline std::string nontree_code(int s) { return "!NONTREE:" + std::to_string(s); }

struct Ball {
  MarkedTree tree;   // BFS tree of the radius-s ball; valid only if is_tree
  bool is_tree = false;
};

// BFS ball of radius s around variable v in the factor graph, with the
// given node marks attached. Factor nodes are keyed as n + factor index.
inline Ball truncate_neighborhood(const FactorGraph& f,
                                  const std::vector<std::uint8_t>& var_marks,
                                  const std::vector<std::uint8_t>& fac_marks, std::int64_t v,
                                  int s) {
  if (v < 0 || v >= f.n) throw std::domain_error("truncate_neighborhood: bad vertex");
  if (s < 0) throw std::domain_error("truncate_neighborhood: s must be >= 0");

  Ball ball;
  ball.tree.r = f.r;
  std::unordered_map<std::uint64_t, std::uint32_t> index;  // graph node -> tree node
  std::vector<std::uint64_t> graph_id;                     // tree node -> graph node
  ball.tree.add_root();
  ball.tree.labels[0] = var_marks[v];
  index.emplace((std::uint64_t)v, 0);
  graph_id.push_back((std::uint64_t)v);

  std::vector<std::uint64_t> nbr;
  for (std::size_t i = 0; i < ball.tree.size(); ++i) {
    const int depth = ball.tree.nodes[i].depth;
    if (depth >= s) continue;
    const std::uint64_t g = graph_id[i];
    nbr.clear();
    if (g < (std::uint64_t)f.n) {
      for (std::uint64_t j = f.var_off[g]; j < f.var_off[g + 1]; ++j)
        nbr.push_back((std::uint64_t)f.n + f.factor_of_slot(f.var_inc[j]));
    } else {
      std::uint64_t a = g - f.n;
      for (int j = 0; j < f.r; ++j) nbr.push_back(f.fac_vars[a * f.r + j]);
    }
    std::vector<std::uint64_t> fresh;
    for (std::uint64_t u : nbr)
      if (!index.count(u)) {
        index.emplace(u, 0);  // placeholder, fixed below
        fresh.push_back(u);
      }
    std::size_t first = ball.tree.add_children(i, (std::uint32_t)fresh.size());
    for (std::size_t j = 0; j < fresh.size(); ++j) {
      std::uint64_t u = fresh[j];
      index[u] = (std::uint32_t)(first + j);
      graph_id.push_back(u);
      ball.tree.labels[first + j] =
          u < (std::uint64_t)f.n ? var_marks[u] : fac_marks[u - f.n];
    }
  }

  // the ball is a tree iff the induced edge count equals node count - 1
  std::uint64_t edges = 0;
  for (std::uint64_t g : graph_id) {
    if (g < (std::uint64_t)f.n) continue;
    std::uint64_t a = g - f.n;
    for (int j = 0; j < f.r; ++j)
      if (index.count(f.fac_vars[a * f.r + j])) ++edges;
  }
  ball.is_tree = edges == ball.tree.size() - 1;
  return ball;
}

struct NeighborhoodDistribution {
  int s = 0;
  double total = 0.0;
  std::map<std::string, double> weights;

  void add(const std::string& code, double w = 1.0) {
    weights[code] += w;
    total += w;
  }

  void merge(const NeighborhoodDistribution& other) {
    if (other.s != s)
      throw std::domain_error("NeighborhoodDistribution::merge: depth mismatch");
    for (const auto& [code, w] : other.weights) weights[code] += w;
    total += other.total;
  }
};

// One unit of mass per variable at its ball's code; cyclic balls pool into
// the reserved non-tree class.
inline NeighborhoodDistribution empirical_distribution(
    const FactorGraph& f, const std::vector<std::uint8_t>& var_marks,
    const std::vector<std::uint8_t>& fac_marks, int s) {
  if (var_marks.size() != (std::size_t)f.n || fac_marks.size() != f.num_factors())
    throw std::invalid_argument("empirical_distribution: marks do not cover all nodes");
  NeighborhoodDistribution dist;
  dist.s = s;
  for (std::int64_t v = 0; v < f.n; ++v) {
    Ball ball = truncate_neighborhood(f, var_marks, fac_marks, v, s);
    dist.add(ball.is_tree ? canonical_code(ball.tree) : nontree_code(s));
  }
  return dist;
}

using TreeSampler = std::function<MarkedTree(std::mt19937_64&)>;

inline NeighborhoodDistribution mc_distribution(const TreeSampler& sampler, int s,
                                                std::int64_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::domain_error("mc_distribution: need n_samples >= 1");
  NeighborhoodDistribution dist;
  dist.s = s;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    std::mt19937_64 gen = make_rng(seed, (std::uint64_t)i);
    MarkedTree t = sampler(gen);
    dist.add(canonical_code(t, s));
  }
  return dist;
}

inline double tv_distance(const NeighborhoodDistribution& a,
                          const NeighborhoodDistribution& b) {
  if (a.total <= 0.0 || b.total <= 0.0)
    throw std::domain_error("tv_distance: zero-total distribution");
  double tv = 0.0;
  auto ia = a.weights.begin();
  auto ib = b.weights.begin();
  while (ia != a.weights.end() || ib != b.weights.end()) {
    double ma = 0.0, mb = 0.0;
    if (ib == b.weights.end() || (ia != a.weights.end() && ia->first < ib->first)) {
      ma = ia->second / a.total;
      ++ia;
    } else if (ia == a.weights.end() || ib->first < ia->first) {
      mb = ib->second / b.total;
      ++ib;
    } else {
      ma = ia->second / a.total;
      mb = ib->second / b.total;
      ++ia;
      ++ib;
    }
    tv += std::fabs(ma - mb);
  }
  return 0.5 * tv;
}

struct Discrepancy {
  std::string code;
  double mass_a;
  double mass_b;
};

struct ComparisonReport {
  double tv = 0.0;
  std::size_t n_classes = 0;
  std::vector<Discrepancy> top_discrepancies;
};

inline ComparisonReport compare_distributions(const NeighborhoodDistribution& a,
                                              const NeighborhoodDistribution& b,
                                              std::size_t top = 10) {
  ComparisonReport rep;
  rep.tv = tv_distance(a, b);
  std::vector<Discrepancy> all;
  std::map<std::string, std::pair<double, double>> joint;
  for (const auto& [code, w] : a.weights) joint[code].first = w / a.total;
  for (const auto& [code, w] : b.weights) joint[code].second = w / b.total;
  rep.n_classes = joint.size();
  for (const auto& [code, masses] : joint)
    all.push_back(Discrepancy{code, masses.first, masses.second});
  std::sort(all.begin(), all.end(), [](const Discrepancy& x, const Discrepancy& y) {
    return std::fabs(x.mass_a - x.mass_b) > std::fabs(y.mass_a - y.mass_b);
  });
  if (all.size() > top) all.resize(top);
  rep.top_discrepancies = std::move(all);
  return rep;
}

// Fraction of variables whose depth-s marked ball matches the depth-s
// truncation of the reference tree tau.
inline double ball_match_fraction(const FactorGraph& f,
                                 const std::vector<std::uint8_t>& var_marks,
                                 const std::vector<std::uint8_t>& fac_marks,
                                 const MarkedTree& tau, int s) {
  const std::string target = canonical_code(tau, s);
  std::uint64_t hits = 0;
  for (std::int64_t v = 0; v < f.n; ++v) {
    Ball ball = truncate_neighborhood(f, var_marks, fac_marks, v, s);
    if (ball.is_tree && canonical_code(ball.tree) == target) ++hits;
  }
  return f.n > 0 ? double(hits) / double(f.n) : 0.0;
}

}  // namespace hypercore
