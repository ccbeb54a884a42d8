#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hypercore/hypergraph.hpp"

// Synchronous Warning Propagation on r-uniform factor graphs. Both message
// families of step t+1 are computed from the time-t snapshot only; the
// tree-side recursion analysis depends on this exact schedule, so the
// implementation double-buffers both directions.

namespace hypercore {

struct MessageState {
  int t = 0;
  std::vector<std::uint8_t> v2f;  // slot a*r+i: message fac_vars[a*r+i] -> a
  std::vector<std::uint8_t> f2v;  // slot a*r+i: message a -> fac_vars[a*r+i]
};

struct WpMarks {
  int t = 0;
  std::vector<std::uint8_t> var_mark;
  std::vector<std::uint8_t> fac_mark;
};

inline MessageState wp_init(const FactorGraph& f) {
  MessageState s;
  s.t = 0;
  s.v2f.assign(f.fac_vars.size(), 1);
  s.f2v.assign(f.fac_vars.size(), 1);
  return s;
}

inline MessageState wp_step(const MessageState& s, const FactorGraph& f, int k) {
  if (s.v2f.size() != f.fac_vars.size() || s.f2v.size() != f.fac_vars.size())
    throw std::invalid_argument("wp_step: state inconsistent with factor graph");
  const std::size_t m = f.num_factors();

  MessageState next;
  next.t = s.t + 1;
  next.v2f.resize(s.v2f.size());
  next.f2v.resize(s.f2v.size());

  // variable -> factor: 1{sum over the other incident factors >= k-1}
  for (std::int64_t v = 0; v < f.n; ++v) {
    std::int64_t sum = 0;
    for (std::uint64_t i = f.var_off[v]; i < f.var_off[v + 1]; ++i) sum += s.f2v[f.var_inc[i]];
    for (std::uint64_t i = f.var_off[v]; i < f.var_off[v + 1]; ++i) {
      std::uint64_t e = f.var_inc[i];
      next.v2f[e] = (sum - s.f2v[e]) >= k - 1 ? 1 : 0;
    }
  }

  // factor -> variable: 1{all other members sent 1}
  for (std::size_t a = 0; a < m; ++a) {
    std::int64_t sum = 0;
    for (int j = 0; j < f.r; ++j) sum += s.v2f[a * f.r + j];
    for (int j = 0; j < f.r; ++j) {
      std::uint64_t e = a * f.r + j;
      next.f2v[e] = (sum - s.v2f[e]) == f.r - 1 ? 1 : 0;
    }
  }
  return next;
}

inline WpMarks wp_marks(const MessageState& s, const FactorGraph& f, int k) {
  WpMarks marks;
  marks.t = s.t;
  marks.var_mark.resize(f.n);
  marks.fac_mark.resize(f.num_factors());
  for (std::int64_t v = 0; v < f.n; ++v) {
    std::int64_t sum = 0;
    for (std::uint64_t i = f.var_off[v]; i < f.var_off[v + 1]; ++i) sum += s.f2v[f.var_inc[i]];
    marks.var_mark[v] = sum >= k ? 1 : 0;
  }
  for (std::size_t a = 0; a < f.num_factors(); ++a) {
    std::int64_t sum = 0;
    for (int j = 0; j < f.r; ++j) sum += s.v2f[a * f.r + j];
    marks.fac_mark[a] = sum == f.r ? 1 : 0;
  }
  return marks;
}

struct WpTraceRow {
  int t;
  std::uint64_t v2f_ones;
  std::uint64_t f2v_ones;
  std::uint64_t var_marks;
  std::uint64_t fac_marks;
};

inline WpTraceRow wp_trace_row(const MessageState& s, const FactorGraph& f, int k) {
  WpTraceRow row{s.t, 0, 0, 0, 0};
  for (std::uint8_t b : s.v2f) row.v2f_ones += b;
  for (std::uint8_t b : s.f2v) row.f2v_ones += b;
  WpMarks marks = wp_marks(s, f, k);
  for (std::uint8_t b : marks.var_mark) row.var_marks += b;
  for (std::uint8_t b : marks.fac_mark) row.fac_marks += b;
  return row;
}

inline int wp_default_max_t(std::int64_t n) {
  int log2n = 0;
  while ((std::int64_t(1) << log2n) < n + 1) ++log2n;
  return 4 * (2 + log2n);
}

struct WpRunResult {
  WpMarks marks;
  int t_fix = 0;
  bool converged = false;
};

// Iterate until a full sweep changes nothing. Messages only decrease, so
// a change flag per sweep is a correct fixed-point criterion.
inline WpRunResult wp_run(const FactorGraph& f, int k, int max_t = -1,
                          const std::function<void(const WpTraceRow&)>& trace = nullptr) {
  if (max_t < 0) max_t = wp_default_max_t(f.n);
  if (max_t < 1) throw std::domain_error("wp_run: max_t must be >= 1");
  MessageState s = wp_init(f);
  if (trace) trace(wp_trace_row(s, f, k));
  WpRunResult res;
  for (int t = 0; t < max_t; ++t) {
    MessageState next = wp_step(s, f, k);
    bool changed = next.v2f != s.v2f || next.f2v != s.f2v;
    s = std::move(next);
    if (trace) trace(wp_trace_row(s, f, k));
    if (!changed) {
      res.marks = wp_marks(s, f, k);
      res.t_fix = s.t - 1;  // first t with no change from t-1 to t... reported as the fixed time
      res.converged = true;
      return res;
    }
  }
  res.marks = wp_marks(s, f, k);
  res.t_fix = s.t;
  res.converged = false;
  return res;
}

// Marks after exactly t synchronous steps.
inline WpMarks wp_run_t(const FactorGraph& f, int k, int t,
                        const std::function<void(const WpTraceRow&)>& trace = nullptr) {
  if (t < 0) throw std::domain_error("wp_run_t: t must be >= 0");
  MessageState s = wp_init(f);
  if (trace) trace(wp_trace_row(s, f, k));
  for (int i = 0; i < t; ++i) {
    s = wp_step(s, f, k);
    if (trace) trace(wp_trace_row(s, f, k));
  }
  return wp_marks(s, f, k);
}

}  // namespace hypercore
