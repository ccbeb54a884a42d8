#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypercore/analytic.hpp"
#include "hypercore/rng.hpp"

// The random hypergraph H_r(n, d/n^{r-1}), its bipartite factor-graph
// representation and k-core extraction by peeling.

namespace hypercore {

struct Hypergraph {
  std::int64_t n = 0;
  int r = 0;
  std::vector<std::vector<std::uint32_t>> edges;  // each sorted, r distinct vertices
};

namespace detail {

// C(n, r) as long double; guards the exact-binomial branch below.
inline long double binom_ld(std::int64_t n, int r) {
  long double v = 1.0L;
  for (int i = 0; i < r; ++i) v = v * (long double)(n - i) / (long double)(i + 1);
  return v;
}

}  // namespace detail

// Edge count drawn as Binomial(C(n,r), p), then that many distinct r-subsets
// uniformly without replacement. Same distribution as the per-subset
// Bernoulli sweep, feasible at large n. When C(n,r) overflows 64-bit
// integers the count falls back to Po(C(n,r) p), which is within total
// variation O(C p^2) of the binomial.
inline Hypergraph sample_hypergraph(std::int64_t n, const ModelParams& params,
                                    std::uint64_t seed) {
  const int r = params.r;
  if (n < r) throw std::domain_error("sample_hypergraph: need n >= r");
  const double p = params.d / std::pow((double)n, r - 1);
  if (p >= 1.0) throw std::domain_error("sample_hypergraph: edge probability >= 1");

  std::mt19937_64 gen = make_rng(seed, /*stream=*/0);

  const long double total = detail::binom_ld(n, r);
  std::int64_t m;
  if (total < 4.0e18L) {
    std::binomial_distribution<std::int64_t> bin((std::int64_t)total, p);
    m = bin(gen);
  } else {
    std::poisson_distribution<std::int64_t> po((double)(total * (long double)p));
    m = po(gen);
  }

  Hypergraph h;
  h.n = n;
  h.r = r;
  h.edges.reserve((std::size_t)m);

  std::uniform_int_distribution<std::int64_t> pick(0, n - 1);
  std::set<std::vector<std::uint32_t>> seen;
  std::vector<std::uint32_t> edge(r);
  for (std::int64_t e = 0; e < m; ++e) {
    int retries = 0;
    for (;;) {
      for (int i = 0; i < r; ++i) {
        for (;;) {
          std::uint32_t v = (std::uint32_t)pick(gen);
          bool dup = false;
          for (int j = 0; j < i; ++j) dup |= (edge[j] == v);
          if (!dup) {
            edge[i] = v;
            break;
          }
        }
      }
      std::sort(edge.begin(), edge.end());
      if (seen.insert(edge).second) break;
      if (++retries > 100)
        throw std::runtime_error("sample_hypergraph: duplicate-edge retry cap exceeded");
    }
    h.edges.push_back(edge);
  }
  return h;
}

// Bipartite incidence structure. Factor a occupies incidence slots
// [a*r, (a+1)*r); var_inc lists, per variable, the incidence slots it fills.
struct FactorGraph {
  std::int64_t n = 0;
  int r = 0;
  std::vector<std::uint32_t> fac_vars;  // m*r member variables, factor-major
  std::vector<std::uint64_t> var_off;   // n+1 CSR offsets into var_inc
  std::vector<std::uint64_t> var_inc;   // incidence slot ids

  std::size_t num_factors() const { return r == 0 ? 0 : fac_vars.size() / r; }
  std::uint32_t factor_of_slot(std::uint64_t slot) const {
    return (std::uint32_t)(slot / r);
  }
  std::size_t var_degree(std::int64_t v) const { return var_off[v + 1] - var_off[v]; }
};

inline FactorGraph to_factor_graph(const Hypergraph& h) {
  FactorGraph f;
  f.n = h.n;
  f.r = h.r;
  const std::size_t m = h.edges.size();
  f.fac_vars.reserve(m * h.r);
  std::vector<std::uint64_t> deg(h.n + 1, 0);
  for (const auto& e : h.edges) {
    if ((int)e.size() != h.r) throw std::domain_error("to_factor_graph: edge arity mismatch");
    for (std::uint32_t v : e) {
      f.fac_vars.push_back(v);
      ++deg[v + 1];
    }
  }
  f.var_off.assign(h.n + 1, 0);
  for (std::int64_t v = 0; v < h.n; ++v) f.var_off[v + 1] = f.var_off[v] + deg[v + 1];
  f.var_inc.resize(f.fac_vars.size());
  std::vector<std::uint64_t> cursor(f.var_off.begin(), f.var_off.end() - 1);
  for (std::uint64_t slot = 0; slot < f.fac_vars.size(); ++slot)
    f.var_inc[cursor[f.fac_vars[slot]]++] = slot;
  return f;
}

struct CoreMarking {
  int k = 0;
  std::vector<std::uint8_t> var_mark;
  std::vector<std::uint8_t> fac_mark;

  double core_fraction() const {
    if (var_mark.empty()) return 0.0;
    std::uint64_t c = 0;
    for (std::uint8_t b : var_mark) c += b;
    return double(c) / double(var_mark.size());
  }
};

enum class PeelOrder { Fifo, Lifo };

// Work-queue peel: repeatedly delete factors incident to a variable of
// degree < k. Each factor is removed at most once, so the whole pass is
// linear in the number of incidences. The result does not depend on the
// queue discipline.
inline CoreMarking peel_core(const FactorGraph& f, int k, PeelOrder order = PeelOrder::Fifo) {
  if (k < 1) throw std::domain_error("peel_core: k must be >= 1");
  const std::size_t m = f.num_factors();
  std::vector<std::int64_t> deg(f.n);
  for (std::int64_t v = 0; v < f.n; ++v) deg[v] = (std::int64_t)f.var_degree(v);
  std::vector<std::uint8_t> fac_alive(m, 1);
  std::vector<std::uint8_t> queued(f.n, 0);

  std::deque<std::uint32_t> work;
  for (std::int64_t v = 0; v < f.n; ++v)
    if (deg[v] < k) {
      work.push_back((std::uint32_t)v);
      queued[v] = 1;
    }

  while (!work.empty()) {
    std::uint32_t v;
    if (order == PeelOrder::Fifo) {
      v = work.front();
      work.pop_front();
    } else {
      v = work.back();
      work.pop_back();
    }
    for (std::uint64_t i = f.var_off[v]; i < f.var_off[v + 1]; ++i) {
      std::uint32_t a = f.factor_of_slot(f.var_inc[i]);
      if (!fac_alive[a]) continue;
      fac_alive[a] = 0;
      for (int j = 0; j < f.r; ++j) {
        std::uint32_t w = f.fac_vars[(std::uint64_t)a * f.r + j];
        if (--deg[w] < k && !queued[w]) {
          queued[w] = 1;
          work.push_back(w);
        }
      }
    }
  }

  CoreMarking mark;
  mark.k = k;
  mark.var_mark.resize(f.n);
  for (std::int64_t v = 0; v < f.n; ++v) mark.var_mark[v] = deg[v] >= k ? 1 : 0;
  mark.fac_mark = std::move(fac_alive);
  return mark;
}

// Text format: first line "n r m", then m lines of r space-separated
// 0-based vertex indices.
inline void write_hypergraph(std::ostream& os, const Hypergraph& h) {
  os << h.n << ' ' << h.r << ' ' << h.edges.size() << '\n';
  for (const auto& e : h.edges) {
    for (std::size_t i = 0; i < e.size(); ++i) os << (i ? " " : "") << e[i];
    os << '\n';
  }
}

inline Hypergraph read_hypergraph(std::istream& is) {
  Hypergraph h;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_hypergraph: empty input");
  std::istringstream head(line);
  std::size_t m;
  if (!(head >> h.n >> h.r >> m) || h.n < 0 || h.r < 1)
    throw std::runtime_error("read_hypergraph: malformed header line 1");
  h.edges.reserve(m);
  for (std::size_t e = 0; e < m; ++e) {
    if (!std::getline(is, line))
      throw std::runtime_error("read_hypergraph: unexpected end of file at line " +
                               std::to_string(e + 2));
    std::istringstream row(line);
    std::vector<std::uint32_t> edge(h.r);
    for (int i = 0; i < h.r; ++i) {
      long long v;
      if (!(row >> v) || v < 0 || v >= h.n)
        throw std::runtime_error("read_hypergraph: bad vertex index at line " +
                                 std::to_string(e + 2));
      edge[i] = (std::uint32_t)v;
    }
    std::sort(edge.begin(), edge.end());
    for (int i = 1; i < h.r; ++i)
      if (edge[i] == edge[i - 1])
        throw std::runtime_error("read_hypergraph: repeated vertex in edge at line " +
                                 std::to_string(e + 2));
    h.edges.push_back(std::move(edge));
  }
  return h;
}

inline void write_hypergraph_file(const std::string& path, const Hypergraph& h) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_hypergraph(os, h);
}

inline Hypergraph read_hypergraph_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_hypergraph(is);
}

}  // namespace hypercore
