#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "hypercore/hypergraph.hpp"

using namespace hypercore;

namespace {

Hypergraph complete_3uniform_on_4() {
  Hypergraph h;
  h.n = 4;
  h.r = 3;
  h.edges = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  return h;
}

// exhaustive oracle: largest induced subhypergraph of min degree k, found by
// scanning all vertex subsets
std::vector<std::uint8_t> brute_force_core(const Hypergraph& h, int k) {
  std::vector<std::uint8_t> best(h.n, 0);
  std::size_t best_size = 0;
  for (std::uint32_t mask = 0; mask < (1u << h.n); ++mask) {
    std::vector<int> deg(h.n, 0);
    for (const auto& e : h.edges) {
      bool inside = true;
      for (auto v : e) inside &= ((mask >> v) & 1) != 0;
      if (inside)
        for (auto v : e) ++deg[v];
    }
    bool ok = true;
    std::size_t size = 0;
    for (std::int64_t v = 0; v < h.n; ++v)
      if ((mask >> v) & 1) {
        ++size;
        ok &= deg[v] >= k;
      }
    if (ok && size > best_size) {
      best_size = size;
      for (std::int64_t v = 0; v < h.n; ++v) best[v] = (mask >> v) & 1;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("sampler rejects invalid inputs") {
  CHECK_THROWS_AS(sample_hypergraph(2, ModelParams(6.0, 3, 2), 1), std::domain_error);
  // n = r = 3 and d = 9 gives p = 1
  CHECK_THROWS_AS(sample_hypergraph(3, ModelParams(9.0, 3, 2), 1), std::domain_error);
}

TEST_CASE("n = r instance has at most one edge") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Hypergraph h = sample_hypergraph(3, ModelParams(4.0, 3, 2), seed);
    CHECK(h.edges.size() <= 1);
  }
}

TEST_CASE("edge count matches the binomial mean") {
  // C(10,3) * 6/100 = 7.2
  const int trials = 10000;
  double sum = 0.0;
  for (int t = 0; t < trials; ++t)
    sum += (double)sample_hypergraph(10, ModelParams(6.0, 3, 2), 1000 + t).edges.size();
  double mean = sum / trials;
  double expected = 120.0 * 0.06;
  double sigma = std::sqrt(120.0 * 0.06 * 0.94 / trials);
  CHECK(std::fabs(mean - expected) < 3.0 * sigma);
}

TEST_CASE("edges are distinct with distinct vertices") {
  Hypergraph h = sample_hypergraph(30, ModelParams(6.0, 3, 2), 42);
  std::set<std::vector<std::uint32_t>> seen;
  for (const auto& e : h.edges) {
    CHECK(e.size() == 3);
    CHECK(e[0] < e[1]);
    CHECK(e[1] < e[2]);
    CHECK(e[2] < 30);
    CHECK(seen.insert(e).second);
  }
}

TEST_CASE("mean vertex degree approaches c") {
  Hypergraph h = sample_hypergraph(100000, ModelParams(6.0, 3, 2), 7);
  FactorGraph f = to_factor_graph(h);
  double mean = (double)f.fac_vars.size() / (double)f.n;
  CHECK(mean == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("factor graph round-trip of degrees") {
  Hypergraph h = sample_hypergraph(50, ModelParams(8.0, 3, 2), 3);
  FactorGraph f = to_factor_graph(h);
  std::vector<std::size_t> count(h.n, 0);
  for (const auto& e : h.edges)
    for (auto v : e) ++count[v];
  for (std::int64_t v = 0; v < h.n; ++v) CHECK(f.var_degree(v) == count[v]);
  // bipartite consistency
  for (std::int64_t v = 0; v < h.n; ++v)
    for (std::uint64_t i = f.var_off[v]; i < f.var_off[v + 1]; ++i)
      CHECK(f.fac_vars[f.var_inc[i]] == (std::uint32_t)v);
}

TEST_CASE("single edge factor graph") {
  Hypergraph h;
  h.n = 5;
  h.r = 3;
  h.edges = {{0, 1, 2}};
  FactorGraph f = to_factor_graph(h);
  CHECK(f.num_factors() == 1);
  CHECK(f.var_degree(0) == 1);
  CHECK(f.var_degree(3) == 0);
  CHECK(f.fac_vars == std::vector<std::uint32_t>{0, 1, 2});
}

TEST_CASE("peel keeps the complete instance at k=3 and empties it at k=4") {
  FactorGraph f = to_factor_graph(complete_3uniform_on_4());
  CoreMarking keep = peel_core(f, 3);
  for (auto b : keep.var_mark) CHECK(b == 1);
  for (auto b : keep.fac_mark) CHECK(b == 1);
  CoreMarking gone = peel_core(f, 4);
  for (auto b : gone.var_mark) CHECK(b == 0);
  for (auto b : gone.fac_mark) CHECK(b == 0);
}

TEST_CASE("peel equals exhaustive maximal-subgraph oracle on small instances") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Hypergraph h = sample_hypergraph(8, ModelParams(3.0, 3, 2), seed);
    FactorGraph f = to_factor_graph(h);
    CoreMarking mark = peel_core(f, 2);
    CHECK(mark.var_mark == brute_force_core(h, 2));
  }
}

TEST_CASE("core marking is a fixed point and idempotent") {
  Hypergraph h = sample_hypergraph(300, ModelParams(7.0, 3, 2), 11);
  FactorGraph f = to_factor_graph(h);
  CoreMarking mark = peel_core(f, 2);
  // factor marked iff all members marked; marked variables keep >= k marked factors
  std::vector<int> live_deg(h.n, 0);
  for (std::size_t a = 0; a < f.num_factors(); ++a) {
    bool all = true;
    for (int j = 0; j < f.r; ++j) all &= mark.var_mark[f.fac_vars[a * f.r + j]] == 1;
    CHECK((int)mark.fac_mark[a] == (all ? 1 : 0));
    if (mark.fac_mark[a])
      for (int j = 0; j < f.r; ++j) ++live_deg[f.fac_vars[a * f.r + j]];
  }
  for (std::int64_t v = 0; v < h.n; ++v)
    if (mark.var_mark[v]) CHECK(live_deg[v] >= 2);

  // peel the induced core again: nothing changes
  Hypergraph core;
  core.n = h.n;
  core.r = h.r;
  for (std::size_t a = 0; a < f.num_factors(); ++a)
    if (mark.fac_mark[a]) core.edges.push_back(h.edges[a]);
  CoreMarking again = peel_core(to_factor_graph(core), 2);
  std::size_t before = 0, after = 0;
  for (auto b : mark.var_mark) before += b;
  for (auto b : again.var_mark) after += b;
  CHECK(before == after);
}

TEST_CASE("peel order independence") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Hypergraph h = sample_hypergraph(200, ModelParams(6.0, 3, 2), seed);
    FactorGraph f = to_factor_graph(h);
    CoreMarking fifo = peel_core(f, 2, PeelOrder::Fifo);
    CoreMarking lifo = peel_core(f, 2, PeelOrder::Lifo);
    CHECK(fifo.var_mark == lifo.var_mark);
    CHECK(fifo.fac_mark == lifo.fac_mark);
  }
}

TEST_CASE("core fraction on trivial markings") {
  CoreMarking all;
  all.k = 2;
  all.var_mark.assign(10, 1);
  CHECK(all.core_fraction() == 1.0);
  CoreMarking none;
  none.k = 2;
  none.var_mark.assign(10, 0);
  CHECK(none.core_fraction() == 0.0);
}

TEST_CASE("text format round trip and validation") {
  Hypergraph h = sample_hypergraph(20, ModelParams(5.0, 3, 2), 5);
  std::stringstream ss;
  write_hypergraph(ss, h);
  Hypergraph back = read_hypergraph(ss);
  CHECK(back.n == h.n);
  CHECK(back.r == h.r);
  CHECK(back.edges == h.edges);

  std::stringstream bad("5 3 1\n0 0 1\n");
  CHECK_THROWS_WITH_AS(read_hypergraph(bad),
                       "read_hypergraph: repeated vertex in edge at line 2",
                       std::runtime_error);
  std::stringstream oob("5 3 1\n0 1 7\n");
  CHECK_THROWS_AS(read_hypergraph(oob), std::runtime_error);
}

TEST_CASE("sampling is deterministic given seed") {
  Hypergraph a = sample_hypergraph(500, ModelParams(6.0, 3, 2), 99);
  Hypergraph b = sample_hypergraph(500, ModelParams(6.0, 3, 2), 99);
  CHECK(a.edges == b.edges);
}
