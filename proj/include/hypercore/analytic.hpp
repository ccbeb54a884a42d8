#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

// Scalar theory of the k-core of sparse random r-uniform hypergraphs:
// the fixed-point function phi, its largest fixed point p*, the critical
// average degree d_{r,k}, the core-size law psi, and the truncated
// Poisson/binomial coefficients q, q_bar, q_tilde that drive the type
// splits of the branching-process samplers.

namespace hypercore {

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

struct ModelParams {
  double d;  // average-degree parameter, > 0
  int r;     // edge arity, >= 3
  int k;     // core degree, >= 2

  ModelParams(double d_, int r_, int k_) : d(d_), r(r_), k(k_) {
    if (r < 3) throw std::domain_error("ModelParams: r must be >= 3");
    if (k < 2) throw std::domain_error("ModelParams: k must be >= 2");
    if (!(d > 0.0) || !std::isfinite(d))
      throw std::domain_error("ModelParams: d must be positive and finite");
  }

  double c() const { return d / factorial(r - 1); }
};

inline double poisson_pmf(double mu, int j) {
  if (mu < 0.0) throw std::domain_error("poisson_pmf: negative rate");
  if (mu == 0.0) return j == 0 ? 1.0 : 0.0;
  return std::exp(-mu + j * std::log(mu) - std::lgamma(double(j) + 1.0));
}

// P[Po(mu) >= j]. The smaller of the two complementary series is summed
// directly so small tails come out accurate.
inline double poisson_tail(double mu, int j) {
  if (mu < 0.0 || !std::isfinite(mu))
    throw std::domain_error("poisson_tail: rate must be finite and >= 0");
  if (j < 0) throw std::domain_error("poisson_tail: j must be >= 0");
  if (j == 0) return 1.0;
  if (mu == 0.0) return 0.0;

  // lower sum P[Po < j]
  double term = std::exp(-mu);
  double lower = term;
  for (int i = 1; i < j; ++i) {
    term *= mu / i;
    lower += term;
  }
  if (lower <= 0.5) return 1.0 - lower;

  // small tail: sum from j upward
  double t = poisson_pmf(mu, j);
  double upper = t;
  for (int i = j; t > upper * 1e-18 || i < mu + 10; ++i) {
    t *= mu / (i + 1);
    upper += t;
    if (i > mu + 40 * std::sqrt(mu + 1.0) + j + 500) break;
  }
  return upper;
}

// phi_{d,r,k}(p) = P[Po(c p^{r-1}) >= k-1]; monotone nondecreasing in p.
inline double phi(const ModelParams& params, double p) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("phi: p must lie in [0,1]");
  return poisson_tail(params.c() * std::pow(p, params.r - 1), params.k - 1);
}

struct FixedPointResult {
  double p_star = 0.0;
  std::int64_t iterations = 0;
  double residual = 0.0;
};

// Largest fixed point of phi: iterate from p = 1 (the iterates decrease
// monotonically), then polish with bisection on phi(p) - p. Iterates below
// the positivity floor certify p* = 0.
inline FixedPointResult largest_fixed_point(const ModelParams& params, double tol = 1e-12,
                                            std::int64_t max_iter = 1000000,
                                            double positivity_floor = 1e-9) {
  if (!(tol > 0.0)) throw std::domain_error("largest_fixed_point: tol must be > 0");
  FixedPointResult res;
  double p = 1.0;
  std::int64_t it = 0;
  for (; it < max_iter; ++it) {
    double pn = phi(params, p);
    double diff = std::fabs(pn - p);
    p = pn;
    if (p < positivity_floor) {
      res.p_star = 0.0;
      res.iterations = it + 1;
      res.residual = 0.0;
      return res;
    }
    if (diff < tol) break;
  }
  if (it >= max_iter)
    throw std::runtime_error("largest_fixed_point: no convergence, last iterate " +
                             std::to_string(p));

  // bisection polish; phi(p) <= p holds along the iteration, so p is an
  // upper bracket end
  double hi = p;
  double step = std::max(tol, 1e-7);
  double lo = hi - step;
  while (lo > positivity_floor && phi(params, lo) - lo <= 0.0) {
    step *= 2.0;
    lo = hi - step;
  }
  if (lo <= positivity_floor) {
    // no sign change above the floor: only the zero fixed point
    res.p_star = 0.0;
    res.iterations = it;
    res.residual = 0.0;
    return res;
  }
  for (int b = 0; b < 200 && hi - lo > 1e-16; ++b) {
    double mid = 0.5 * (lo + hi);
    if (phi(params, mid) - mid > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  res.p_star = 0.5 * (lo + hi);
  res.iterations = it;
  res.residual = std::fabs(phi(params, res.p_star) - res.p_star);
  return res;
}

struct ThresholdResult {
  double d_rk;
  double lambda_min;
};

namespace detail {
inline double threshold_objective(int r, int k, double lambda) {
  double tail = poisson_tail(lambda, k - 1);
  return lambda * factorial(r - 1) / std::pow(tail, r - 1);
}
}  // namespace detail

// d_{r,k} = inf_lambda lambda (r-1)! / P[Po(lambda) >= k-1]^{r-1}.
// The function is unimodal with infinite limits at both ends, so a doubling
// bracket plus golden-section search locates the minimum.
inline ThresholdResult threshold(int r, int k, double tol = 1e-10) {
  if (r < 3 || k < 2) throw std::domain_error("threshold: need r >= 3, k >= 2");
  auto obj = [r, k](double lambda) { return detail::threshold_objective(r, k, lambda); };

  double lo = 1e-6;
  double hi = 8.0;
  for (int grow = 0; grow < 80; ++grow) {
    if (obj(hi) > obj(hi / 2.0) && obj(hi / 2.0) > obj(hi / 4.0)) break;
    hi *= 2.0;
    if (grow == 79) throw std::runtime_error("threshold: bracketing failure");
  }

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = obj(x1), f2 = obj(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = obj(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = obj(x2);
    }
  }
  double lambda_min = 0.5 * (a + b);
  return ThresholdResult{obj(lambda_min), lambda_min};
}

inline bool supercritical(const ModelParams& params, double tol = 1e-10) {
  return params.d > threshold(params.r, params.k, tol).d_rk;
}

// Larger solution of d = lambda (r-1)! / P[Po(lambda) >= k-1]^{r-1},
// obtained through the bijection lambda = d p*^{r-1} / (r-1)!.
inline double lambda_rk(const ModelParams& params, double tol = 1e-12) {
  ThresholdResult th = threshold(params.r, params.k);
  if (params.d <= th.d_rk)
    throw std::domain_error("lambda_rk: d must exceed the critical value d_rk = " +
                            std::to_string(th.d_rk));
  double p_star = largest_fixed_point(params, tol).p_star;
  return params.d * std::pow(p_star, params.r - 1) / factorial(params.r - 1);
}

// psi_{r,k}(d) = P[Po(lambda_{r,k}(d)) >= k]; limiting core fraction.
// Returns 0 below the critical degree.
inline double core_fraction_law(const ModelParams& params, double tol = 1e-12) {
  ThresholdResult th = threshold(params.r, params.k);
  if (params.d <= th.d_rk) return 0.0;
  return poisson_tail(lambda_rk(params, tol), params.k);
}

struct Coefficients {
  double c;
  double p;
  double q;        // P[Po(c p^{r-1}) = k-1 | >= k-1]
  double q_bar;    // P[Po(c p^{r-1}) = k-2 | <= k-2]
  double q_tilde;  // P[Bin(r-1, p) = r-2 | <= r-2]
};

inline Coefficients coefficients(const ModelParams& params, double p) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("coefficients: p must lie in [0,1]");
  const double c = params.c();
  const int r = params.r, k = params.k;
  const double mu = c * std::pow(p, r - 1);

  Coefficients co;
  co.c = c;
  co.p = p;

  double tail = poisson_tail(mu, k - 1);
  co.q = tail > 0.0 ? poisson_pmf(mu, k - 1) / tail : 0.0;

  double head = 1.0 - tail;  // P[Po <= k-2], positive for finite mu
  co.q_bar = head > 0.0 ? poisson_pmf(mu, k - 2) / head : 0.0;

  double bin_head = 1.0 - std::pow(p, r - 1);  // P[Bin(r-1,p) <= r-2]
  if (bin_head <= 0.0) {
    co.q_tilde = 1.0;  // continuous limit as p -> 1
  } else {
    double bin_pmf = (r - 1) * std::pow(p, r - 2) * (1.0 - p);
    co.q_tilde = bin_pmf / bin_head;
  }
  return co;
}

}  // namespace hypercore
