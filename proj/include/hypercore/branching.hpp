#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "hypercore/analytic.hpp"
#include "hypercore/rng.hpp"
#include "hypercore/tree.hpp"

// Samplers for the tree processes describing the local limit of the
// core-marked hypergraph: the unlabeled limit tree, bottom-up Warning
// Propagation on it, the boundary-message process with frozen Bernoulli
// leaves, the top-down two-type tree, its 9-type decoration, and the direct
// 9-type branching process with projection to {0,1} marks.

namespace hypercore {

constexpr std::size_t kDefaultNodeBudget = 10'000'000;

// ---- truncated distribution sampling (inverse CDF on the finite or
// effectively finite support) ----

inline int sample_poisson_lt(std::mt19937_64& gen, double mu, int m) {
  if (m < 1) throw std::domain_error("sample_poisson_lt: empty support");
  double w = std::exp(-mu);
  std::vector<double> cum(m);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    total += w;
    cum[i] = total;
    w *= mu / (i + 1);
  }
  if (total <= 0.0) return m - 1;  // conditioning mass underflowed; top of support
  double u = std::uniform_real_distribution<double>(0.0, total)(gen);
  for (int i = 0; i < m; ++i)
    if (u <= cum[i]) return i;
  return m - 1;
}

inline int sample_poisson_ge(std::mt19937_64& gen, double mu, int m) {
  if (m < 0) throw std::domain_error("sample_poisson_ge: m must be >= 0");
  double tail = poisson_tail(mu, m);
  if (tail <= 0.0) return m;
  double target = std::uniform_real_distribution<double>(0.0, tail)(gen);
  int cap = (int)(m + mu + 12.0 * std::sqrt(mu + 1.0) + 30.0);
  double w = poisson_pmf(mu, m);
  double cum = w;
  int i = m;
  while (target > cum && i < cap) {
    w *= mu / (i + 1);
    ++i;
    cum += w;
  }
  return i;
}

inline double binomial_pmf(int n, double p, int j) {
  if (j < 0 || j > n) return 0.0;
  double logc = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
  double lp = j > 0 ? j * std::log(p) : 0.0;
  double lq = n - j > 0 ? (n - j) * std::log1p(-p) : 0.0;
  return std::exp(logc + lp + lq);
}

inline int sample_binomial_lt(std::mt19937_64& gen, int n, double p, int m) {
  if (m < 1) throw std::domain_error("sample_binomial_lt: empty support");
  if (m > n + 1) m = n + 1;
  std::vector<double> cum(m);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    total += binomial_pmf(n, p, i);
    cum[i] = total;
  }
  if (total <= 0.0) return m - 1;
  double u = std::uniform_real_distribution<double>(0.0, total)(gen);
  for (int i = 0; i < m; ++i)
    if (u <= cum[i]) return i;
  return m - 1;
}

// ---- the unlabeled limit tree: variables spawn Po(c) factors, factors
// spawn r-1 variables, truncated at depth_cap ----

inline MarkedTree sample_T(const ModelParams& params, int depth_cap, std::mt19937_64& gen,
                           std::size_t node_budget = kDefaultNodeBudget) {
  if (depth_cap < 0) throw std::domain_error("sample_T: depth_cap must be >= 0");
  MarkedTree tree;
  tree.r = params.r;
  tree.add_root();
  std::poisson_distribution<int> po_c(params.c());
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (tree.nodes[i].depth >= depth_cap) continue;
    std::uint32_t count =
        tree.is_variable(i) ? (std::uint32_t)po_c(gen) : (std::uint32_t)(params.r - 1);
    tree.add_children(i, count);
    if (tree.size() > node_budget) throw std::runtime_error("sample_T: node budget exceeded");
  }
  return tree;
}

inline MarkedTree sample_T(const ModelParams& params, int depth_cap, std::uint64_t seed) {
  std::mt19937_64 gen = make_rng(seed);
  return sample_T(params, depth_cap, gen);
}

// ---- bottom-up Warning Propagation on a tree ----

struct TreeWpResult {
  int t = 0;
  std::vector<std::uint8_t> up;    // upward messages mu_{x^}(t); root uses the >= k-1 rule
  std::vector<std::uint8_t> down;  // downward messages; 0 at the root for all t
  std::vector<std::uint8_t> mark;  // node marks mu_x(t)
};

inline TreeWpResult tree_wp_bottom_up(const MarkedTree& tree, int k, int steps) {
  if (steps < 0) throw std::domain_error("tree_wp_bottom_up: steps must be >= 0");
  const std::size_t n = tree.size();
  const int r = tree.r;
  TreeWpResult res;
  res.t = steps;
  res.up.assign(n, 1);
  res.down.assign(n, 1);
  if (n > 0) res.down[0] = 0;

  std::vector<std::uint8_t> up_new(n), down_new(n);
  std::vector<std::int32_t> child_sum(n);
  for (int t = 0; t < steps; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& nd = tree.nodes[i];
      std::int32_t sum = 0;
      for (std::uint32_t c = 0; c < nd.num_children; ++c) sum += res.up[nd.first_child + c];
      child_sum[i] = sum;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto& nd = tree.nodes[i];
      if (tree.is_variable(i)) {
        up_new[i] = child_sum[i] >= k - 1 ? 1 : 0;
      } else {
        up_new[i] = child_sum[i] == r - 1 ? 1 : 0;
      }
      if (nd.parent < 0) {
        down_new[i] = 0;
      } else {
        std::int32_t sib = child_sum[nd.parent] - res.up[i];
        std::int32_t in = res.down[nd.parent] + sib;
        down_new[i] = tree.is_variable(i) ? (in == r - 1 ? 1 : 0) : (in >= k - 1 ? 1 : 0);
      }
    }
    res.up.swap(up_new);
    res.down.swap(down_new);
  }

  res.mark.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nd = tree.nodes[i];
    std::int32_t sum = res.down[i];
    for (std::uint32_t c = 0; c < nd.num_children; ++c) sum += res.up[nd.first_child + c];
    res.mark[i] = tree.is_variable(i) ? (sum >= k ? 1 : 0) : (sum == r ? 1 : 0);
  }
  return res;
}

// ---- boundary-message process: variables at depth >= s carry frozen
// Bernoulli(p*) bits (as do all variables at u = 0), factors start at 1,
// interior nodes run the usual update. After s sweeps nothing changes. ----

inline std::vector<std::uint8_t> truncated_messages(const MarkedTree& tree, int s, int u,
                                                    double p_star, int k,
                                                    std::mt19937_64& gen) {
  if (s < 0 || u < 0) throw std::domain_error("truncated_messages: s, u must be >= 0");
  const std::size_t n = tree.size();
  const int r = tree.r;
  std::bernoulli_distribution be(p_star);

  std::vector<std::uint8_t> beta(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (tree.is_variable(i)) beta[i] = be(gen) ? 1 : 0;

  std::vector<std::uint8_t> mu(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = tree.is_variable(i) ? beta[i] : 1;

  std::vector<std::uint8_t> mu_new(n);
  for (int t = 0; t < u; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& nd = tree.nodes[i];
      if (tree.is_variable(i) && nd.depth >= s) {
        mu_new[i] = beta[i];
        continue;
      }
      std::int32_t sum = 0;
      for (std::uint32_t c = 0; c < nd.num_children; ++c) sum += mu[nd.first_child + c];
      mu_new[i] = tree.is_variable(i) ? (sum >= k - 1 ? 1 : 0) : (sum == r - 1 ? 1 : 0);
    }
    mu.swap(mu_new);
  }
  return mu;
}

// ---- top-down two-type tree: labels are the limiting upward messages ----

inline MarkedTree sample_T_star(const ModelParams& params, double p_star, int depth_cap,
                                std::mt19937_64& gen,
                                std::size_t node_budget = kDefaultNodeBudget) {
  if (p_star < 0.0 || p_star > 1.0)
    throw std::domain_error("sample_T_star: p_star must lie in [0,1]");
  if (depth_cap < 0) throw std::domain_error("sample_T_star: depth_cap must be >= 0");
  const double c = params.c();
  const int r = params.r, k = params.k;
  const double mu1 = c * std::pow(p_star, r - 1);
  const double mu0 = c - mu1;

  MarkedTree tree;
  tree.r = r;
  tree.add_root();
  tree.labels[0] = std::bernoulli_distribution(p_star)(gen) ? 1 : 0;

  std::poisson_distribution<int> po0(mu0);
  std::poisson_distribution<int> po1(mu1);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (tree.nodes[i].depth >= depth_cap) continue;
    std::uint32_t n1, n0;
    if (tree.is_variable(i)) {
      n0 = (std::uint32_t)po0(gen);
      if (tree.labels[i] == 1) {
        n1 = (std::uint32_t)sample_poisson_ge(gen, mu1, k - 1);
      } else {
        n1 = k - 1 > 0 ? (std::uint32_t)sample_poisson_lt(gen, mu1, k - 1) : 0;
      }
    } else {
      if (tree.labels[i] == 1) {
        n1 = (std::uint32_t)(r - 1);
      } else {
        n1 = (std::uint32_t)sample_binomial_lt(gen, r - 1, p_star, r - 1);
      }
      n0 = (std::uint32_t)(r - 1) - n1;
    }
    std::size_t first = tree.add_children(i, n1 + n0);
    for (std::uint32_t j = 0; j < n1; ++j) tree.labels[first + j] = 1;
    if (tree.size() > node_budget)
      throw std::runtime_error("sample_T_star: node budget exceeded");
  }
  return tree;
}

// ---- deterministic 9-type decoration of an up-labeled tree ----
//
// Top-down bits: the root gets 0; a factor child sees its parent's down bit
// plus the sibling up bits against the >= k-1 rule, a variable child the
// same sum against the = r-1 rule. Marks use the >= k / = r rules. Triples
// at the deepest generated level use empty child sums, so trees must be
// generated one level past the census depth.
inline MarkedTree topdown_decorate(const MarkedTree& tree, int k) {
  const std::size_t n = tree.size();
  const int r = tree.r;
  MarkedTree out = tree;

  std::vector<std::int32_t> child_up(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nd = tree.nodes[i];
    if (!tree.is_variable(i) && nd.num_children != 0 && nd.num_children != (std::uint32_t)(r - 1))
      throw std::invalid_argument("topdown_decorate: factor node without r-1 children");
    std::int32_t sum = 0;
    for (std::uint32_t c = 0; c < nd.num_children; ++c) sum += tree.labels[nd.first_child + c];
    child_up[i] = sum;
  }

  std::vector<std::uint8_t> down(n, 0);
  for (std::size_t i = 1; i < n; ++i) {  // BFS order: parents precede children
    const auto& nd = tree.nodes[i];
    std::int32_t in = down[nd.parent] + child_up[nd.parent] - tree.labels[i];
    down[i] = tree.is_variable(i) ? (in == r - 1 ? 1 : 0) : (in >= k - 1 ? 1 : 0);
  }

  for (std::size_t i = 0; i < n; ++i) {
    std::int32_t total = down[i] + child_up[i];
    int mark = tree.is_variable(i) ? (total >= k ? 1 : 0) : (total == r ? 1 : 0);
    out.labels[i] = make_type(mark, tree.labels[i], down[i]);
  }
  return out;
}

// ---- direct 9-type branching process ----
//
// Offspring laws follow the top-down construction: every variable type
// spawns Po(c(1-p^{r-1})) up-0 factor children next to its truncated
// Po(c p^{r-1}) up-1 family, so the marginal offspring rate is c.

inline MarkedTree sample_hatT(const ModelParams& params, double p, int depth_cap,
                              std::mt19937_64& gen,
                              std::size_t node_budget = kDefaultNodeBudget) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("sample_hatT: p must lie in [0,1]");
  if (depth_cap < 0) throw std::domain_error("sample_hatT: depth_cap must be >= 0");
  const double c = params.c();
  const int r = params.r, k = params.k;
  const double mu1 = c * std::pow(p, r - 1);
  const double mu0 = c - mu1;
  Coefficients co = coefficients(params, p);

  MarkedTree tree;
  tree.r = r;
  tree.add_root();
  {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    if (u < 1.0 - p)
      tree.labels[0] = kType000;
    else if (u < 1.0 - p + p * co.q)
      tree.labels[0] = kType010;
    else
      tree.labels[0] = kType110;
  }

  std::poisson_distribution<int> po0(mu0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::uint8_t> child_types;

  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (tree.nodes[i].depth >= depth_cap) continue;
    child_types.clear();
    const std::uint8_t type = tree.labels[i];

    if (tree.is_variable(i)) {
      switch (type) {
        case kType000: {
          int n1 = k - 1 > 0 ? sample_poisson_lt(gen, mu1, k - 1) : 0;
          int n0 = po0(gen);
          child_types.assign(n1, kType010);
          child_types.insert(child_types.end(), n0, kType000);
          break;
        }
        case kType001: {
          int n0 = po0(gen);
          // for k = 2 the alternative branch has empty support and q_bar = 1
          if (k == 2 || unif(gen) < co.q_bar) {
            child_types.assign(k - 2, kType010);
            child_types.insert(child_types.end(), n0, kType001);
          } else {
            int n1 = sample_poisson_lt(gen, mu1, k - 2);
            child_types.assign(n1, kType010);
            child_types.insert(child_types.end(), n0, kType000);
          }
          break;
        }
        case kType010: {
          int n0 = po0(gen);
          child_types.assign(k - 1, kType010);
          child_types.insert(child_types.end(), n0, kType001);
          break;
        }
        case kType110: {
          int n1 = sample_poisson_ge(gen, mu1, k);
          int n0 = po0(gen);
          child_types.assign(n1, kType111);
          child_types.insert(child_types.end(), n0, kType001);
          break;
        }
        case kType111: {
          int n1 = sample_poisson_ge(gen, mu1, k - 1);
          int n0 = po0(gen);
          child_types.assign(n1, kType111);
          child_types.insert(child_types.end(), n0, kType001);
          break;
        }
        default:
          throw std::logic_error("sample_hatT: invalid variable type");
      }
    } else {
      auto push_up1 = [&](int count) {
        for (int j = 0; j < count; ++j)
          child_types.push_back(unif(gen) < co.q ? kType010 : kType110);
      };
      switch (type) {
        case kType000: {
          int n1 = sample_binomial_lt(gen, r - 1, p, r - 1);
          push_up1(n1);
          child_types.insert(child_types.end(), r - 1 - n1, kType000);
          break;
        }
        case kType001: {
          if (unif(gen) < co.q_tilde) {
            child_types.push_back(kType001);
            push_up1(r - 2);
          } else {
            int n1 = sample_binomial_lt(gen, r - 1, p, r - 2);
            push_up1(n1);
            child_types.insert(child_types.end(), r - 1 - n1, kType000);
          }
          break;
        }
        case kType010: {
          push_up1(r - 1);
          break;
        }
        case kType111: {
          child_types.assign(r - 1, kType111);
          break;
        }
        default:
          throw std::logic_error("sample_hatT: invalid factor type");
      }
      if (child_types.size() != (std::size_t)(r - 1))
        throw std::logic_error("sample_hatT: factor arity violated");
    }

    std::size_t first = tree.add_children(i, (std::uint32_t)child_types.size());
    for (std::size_t j = 0; j < child_types.size(); ++j)
      tree.labels[first + j] = child_types[j];
    if (tree.size() > node_budget) throw std::runtime_error("sample_hatT: node budget exceeded");
  }
  return tree;
}

inline MarkedTree sample_hatT(const ModelParams& params, double p, int depth_cap,
                              std::uint64_t seed) {
  std::mt19937_64 gen = make_rng(seed);
  return sample_hatT(params, p, depth_cap, gen);
}

// First-bit projection of a 9-type tree.
inline MarkedTree project_to_binary(const MarkedTree& tree) {
  MarkedTree out = tree;
  for (std::size_t i = 0; i < out.labels.size(); ++i) out.labels[i] = type_mark(tree.labels[i]);
  return out;
}

}  // namespace hypercore
