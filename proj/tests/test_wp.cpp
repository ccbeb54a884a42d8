#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "hypercore/wp.hpp"

using namespace hypercore;

namespace {

FactorGraph single_factor() {
  Hypergraph h;
  h.n = 4;  // vertex 3 is isolated
  h.r = 3;
  h.edges = {{0, 1, 2}};
  return to_factor_graph(h);
}

FactorGraph complete_4() {
  Hypergraph h;
  h.n = 4;
  h.r = 3;
  h.edges = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  return to_factor_graph(h);
}

// re-implementation of the mark rules straight from the message arrays,
// kept independent of wp_marks
WpMarks marks_reference(const MessageState& s, const FactorGraph& f, int k) {
  WpMarks m;
  m.t = s.t;
  m.var_mark.assign(f.n, 0);
  m.fac_mark.assign(f.num_factors(), 0);
  for (std::size_t a = 0; a < f.num_factors(); ++a) {
    int sv = 0;
    for (int j = 0; j < f.r; ++j) sv += s.v2f[a * f.r + j];
    m.fac_mark[a] = sv == f.r;
  }
  std::vector<int> recv(f.n, 0);
  for (std::size_t a = 0; a < f.num_factors(); ++a)
    for (int j = 0; j < f.r; ++j) recv[f.fac_vars[a * f.r + j]] += s.f2v[a * f.r + j];
  for (std::int64_t v = 0; v < f.n; ++v) m.var_mark[v] = recv[v] >= k;
  return m;
}

}  // namespace

TEST_CASE("init is all ones with the right shape") {
  FactorGraph f = single_factor();
  MessageState s = wp_init(f);
  CHECK(s.t == 0);
  CHECK(s.v2f == std::vector<std::uint8_t>{1, 1, 1});
  CHECK(s.f2v == std::vector<std::uint8_t>{1, 1, 1});

  FactorGraph empty = to_factor_graph(Hypergraph{3, 3, {}});
  MessageState se = wp_init(empty);
  CHECK(se.v2f.empty());
  CHECK(se.f2v.empty());

  Hypergraph h = sample_hypergraph(100, ModelParams(6.0, 3, 2), 4);
  FactorGraph fg = to_factor_graph(h);
  MessageState sg = wp_init(fg);
  CHECK(sg.v2f.size() == h.edges.size() * 3);
}

TEST_CASE("single factor with k=2 dies in two steps") {
  FactorGraph f = single_factor();
  MessageState s = wp_init(f);
  s = wp_step(s, f, 2);
  CHECK(s.v2f == std::vector<std::uint8_t>{0, 0, 0});  // degree 1 < k
  CHECK(s.f2v == std::vector<std::uint8_t>{1, 1, 1});  // still saw old ones
  s = wp_step(s, f, 2);
  CHECK(s.f2v == std::vector<std::uint8_t>{0, 0, 0});

  WpRunResult run = wp_run(f, 2);
  CHECK(run.converged);
  CHECK(run.t_fix == 2);
  for (auto b : run.marks.var_mark) CHECK(b == 0);
  for (auto b : run.marks.fac_mark) CHECK(b == 0);
}

TEST_CASE("isolated variable is unmarked from the start") {
  FactorGraph f = single_factor();
  WpMarks m = wp_run_t(f, 2, 0);
  CHECK(m.var_mark[3] == 0);
}

TEST_CASE("complete instance at k=3 is a fixed point of the start state") {
  FactorGraph f = complete_4();
  WpRunResult run = wp_run(f, 3);
  CHECK(run.converged);
  CHECK(run.t_fix == 0);
  for (auto b : run.marks.var_mark) CHECK(b == 1);
  for (auto b : run.marks.fac_mark) CHECK(b == 1);
}

TEST_CASE("t=0 marks are raw degree thresholds") {
  Hypergraph h = sample_hypergraph(80, ModelParams(6.0, 3, 2), 21);
  FactorGraph f = to_factor_graph(h);
  WpMarks m = wp_run_t(f, 2, 0);
  for (std::int64_t v = 0; v < f.n; ++v)
    CHECK((int)m.var_mark[v] == (f.var_degree(v) >= 2 ? 1 : 0));
}

TEST_CASE("marks agree with an independent mark evaluation") {
  Hypergraph h = sample_hypergraph(50, ModelParams(6.0, 3, 2), 77);
  FactorGraph f = to_factor_graph(h);
  MessageState s = wp_init(f);
  for (int t = 0; t < 3; ++t) s = wp_step(s, f, 2);
  WpMarks got = wp_marks(s, f, 2);
  WpMarks want = marks_reference(s, f, 2);
  CHECK(got.var_mark == want.var_mark);
  CHECK(got.fac_mark == want.fac_mark);
}

TEST_CASE("messages and marks are monotone in t") {
  Hypergraph h = sample_hypergraph(300, ModelParams(5.0, 3, 2), 13);
  FactorGraph f = to_factor_graph(h);
  MessageState s = wp_init(f);
  WpMarks prev = wp_marks(s, f, 2);
  for (int t = 0; t < 12; ++t) {
    MessageState next = wp_step(s, f, 2);
    for (std::size_t i = 0; i < s.v2f.size(); ++i) {
      CHECK(next.v2f[i] <= s.v2f[i]);
      CHECK(next.f2v[i] <= s.f2v[i]);
    }
    WpMarks cur = wp_marks(next, f, 2);
    for (std::size_t i = 0; i < cur.var_mark.size(); ++i) CHECK(cur.var_mark[i] <= prev.var_mark[i]);
    for (std::size_t i = 0; i < cur.fac_mark.size(); ++i) CHECK(cur.fac_mark[i] <= prev.fac_mark[i]);
    prev = cur;
    s = std::move(next);
  }
}

TEST_CASE("fixed point equals peeled core, variables and factors") {
  int instances = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (double d : {3.0, 6.0}) {
      Hypergraph h = sample_hypergraph(200, ModelParams(d, 3, 2), seed);
      FactorGraph f = to_factor_graph(h);
      WpRunResult run = wp_run(f, 2);
      REQUIRE(run.converged);
      CoreMarking core = peel_core(f, 2);
      CHECK(run.marks.var_mark == core.var_mark);
      CHECK(run.marks.fac_mark == core.fac_mark);
      // core containment holds at every earlier t as well
      WpMarks early = wp_run_t(f, 2, 1);
      for (std::int64_t v = 0; v < f.n; ++v)
        if (core.var_mark[v]) CHECK(early.var_mark[v] == 1);
      ++instances;
    }
  }
  CHECK(instances == 100);
}

TEST_CASE("marks at t >= t_fix match the fixed point and decrease in t") {
  Hypergraph h = sample_hypergraph(150, ModelParams(6.0, 3, 2), 5);
  FactorGraph f = to_factor_graph(h);
  WpRunResult run = wp_run(f, 2);
  REQUIRE(run.converged);
  WpMarks late = wp_run_t(f, 2, run.t_fix + 3);
  CHECK(late.var_mark == run.marks.var_mark);

  std::uint64_t prev_count = ~0ull;
  for (int t = 0; t <= 5; ++t) {
    WpMarks m = wp_run_t(f, 2, t);
    std::uint64_t count = 0;
    for (auto b : m.var_mark) count += b;
    CHECK(count <= prev_count);
    prev_count = count;
  }
}

TEST_CASE("trace rows are nonincreasing in every column") {
  Hypergraph h = sample_hypergraph(400, ModelParams(6.0, 3, 2), 31);
  FactorGraph f = to_factor_graph(h);
  std::vector<WpTraceRow> rows;
  wp_run(f, 2, -1, [&](const WpTraceRow& row) { rows.push_back(row); });
  REQUIRE(rows.size() >= 2);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].v2f_ones <= rows[i - 1].v2f_ones);
    CHECK(rows[i].f2v_ones <= rows[i - 1].f2v_ones);
    CHECK(rows[i].var_marks <= rows[i - 1].var_marks);
    CHECK(rows[i].fac_marks <= rows[i - 1].fac_marks);
  }
}

TEST_CASE("max_t exhaustion reports non-convergence") {
  Hypergraph h = sample_hypergraph(400, ModelParams(5.0, 3, 2), 2);
  FactorGraph f = to_factor_graph(h);
  WpRunResult run = wp_run(f, 2, 1);
  // either truly fixed in one step or flagged unconverged
  if (!run.converged) CHECK(run.t_fix == 1);
}
