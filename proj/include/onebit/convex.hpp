#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "onebit/core.hpp"

namespace onebit::convex {

/// Linear objective over K = { ||z||_2 <= 1, ||z||_1 <= sqrt(k) }.
struct RecoveryProblem {
  std::vector<double> c;  // objective coefficients, Phi_S^T y
  index_t k = 1;
  double tol = 1e-9;
};

namespace detail {

inline double l1_norm(const std::vector<double>& v) {
  double acc = 0;
  for (double x : v) acc += std::abs(x);
  return acc;
}

inline double l2_norm(const std::vector<double>& v) {
  double acc = 0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

inline std::vector<double> soft_threshold(const std::vector<double>& c, double lambda) {
  std::vector<double> out(c.size(), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    double a = std::abs(c[i]) - lambda;
    if (a > 0) out[i] = c[i] > 0 ? a : -a;
  }
  return out;
}

inline std::vector<double> normalized(std::vector<double> v) {
  double nrm = l2_norm(v);
  if (nrm > 0)
    for (double& x : v) x /= nrm;
  return v;
}

}  // namespace detail

/// argmax <c, z> over K. The maximizer is soft_threshold(c, lambda) scaled to
/// the unit sphere, with lambda the smallest value making the l1/l2 ratio of
/// the thresholded vector at most sqrt(k): the ratio is non-increasing in
/// lambda, so the crossing segment is located by scanning breakpoints of
/// sorted |c| and the exact lambda solves a quadratic inside it.
inline std::vector<double> solve_linear_over_K(const RecoveryProblem& p) {
  const std::size_t n = p.c.size();
  if (p.k < 1 || p.tol <= 0) throw std::invalid_argument("solve_linear_over_K: bad k/tol");
  for (double v : p.c)
    if (!std::isfinite(v)) throw std::invalid_argument("solve_linear_over_K: non-finite c");
  std::vector<double> zero(n, 0.0);
  double nrm2 = detail::l2_norm(p.c);
  if (nrm2 == 0.0) return zero;  // any feasible point is optimal

  const double sqrt_k = std::sqrt(static_cast<double>(p.k));
  if (detail::l1_norm(p.c) <= sqrt_k * nrm2) return detail::normalized(p.c);

  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(p.c[i]);
  std::sort(mag.begin(), mag.end(), std::greater<>());

  // prefix sums over the sorted magnitudes
  std::vector<double> pre_a(n + 1, 0.0), pre_q(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    pre_a[i + 1] = pre_a[i] + mag[i];
    pre_q[i + 1] = pre_q[i] + mag[i] * mag[i];
  }

  auto ratio_minus_target = [&](double lam, std::size_t alive) {
    double s1 = pre_a[alive] - static_cast<double>(alive) * lam;
    double s2sq = pre_q[alive] - 2.0 * lam * pre_a[alive] +
                  static_cast<double>(alive) * lam * lam;
    return s1 - sqrt_k * std::sqrt(std::max(s2sq, 0.0));
  };

  double lambda = -1.0;
  double seg_hi = mag[0];
  std::size_t pos = 0;  // entries strictly above the current breakpoint
  while (pos < n) {
    std::size_t next = pos;
    while (next < n && mag[next] == mag[pos]) ++next;
    double b = next < n ? mag[next] : 0.0;  // next breakpoint down
    std::size_t alive = next;
    if (ratio_minus_target(b, alive) > 0) {
      // ratio exceeds sqrt(k) at b; crossing lies in (b, seg_hi] with `alive` terms
      double aj = pre_a[alive], qj = pre_q[alive];
      double j = static_cast<double>(alive), kk = static_cast<double>(p.k);
      double lead = j * (j - kk);
      double disc = 4.0 * kk * (j - kk) * (j * qj - aj * aj);
      if (lead <= 0 || disc <= 0) {
        // degenerate: all alive magnitudes tied and j > k; spread l1 = sqrt(k)
        // mass uniformly over the tied coordinates
        std::vector<double> z(n, 0.0);
        double w = sqrt_k / j;
        for (std::size_t i = 0; i < n; ++i)
          if (std::abs(p.c[i]) >= mag[0]) z[i] = p.c[i] > 0 ? w : -w;
        return z;
      }
      double root = std::sqrt(disc);
      double l1 = (2.0 * aj * (j - kk) + root) / (2.0 * lead);
      double l2 = (2.0 * aj * (j - kk) - root) / (2.0 * lead);
      lambda = (l1 >= b - 1e-12 && l1 <= seg_hi + 1e-12) ? l1 : l2;
      break;
    }
    seg_hi = b;
    pos = next;
  }
  if (lambda < 0) lambda = 0.0;  // unreachable when the l1 constraint binds

  std::vector<double> z = detail::normalized(detail::soft_threshold(p.c, lambda));
  // guard against roundoff pushing the l1 norm a hair past the boundary
  for (int guard = 0; guard < 64 && detail::l1_norm(z) > sqrt_k * (1.0 + 1e-15); ++guard) {
    lambda += std::max(lambda * 1e-14, 1e-18);
    z = detail::normalized(detail::soft_threshold(p.c, lambda));
  }
  return z;
}

/// Exact Euclidean projection onto { ||w||_1 <= radius }.
inline std::vector<double> project_l1_ball(const std::vector<double>& w, double radius) {
  if (radius < 0) throw std::invalid_argument("project_l1_ball: negative radius");
  if (detail::l1_norm(w) <= radius) return w;
  std::vector<double> mag(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) mag[i] = std::abs(w[i]);
  std::sort(mag.begin(), mag.end(), std::greater<>());
  double acc = 0, theta = 0;
  for (std::size_t j = 0; j < mag.size(); ++j) {
    acc += mag[j];
    double t = (acc - radius) / static_cast<double>(j + 1);
    if (mag[j] - t > 0) theta = t;
  }
  std::vector<double> out(w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    double a = std::abs(w[i]) - theta;
    if (a > 0) out[i] = w[i] > 0 ? a : -a;
  }
  return out;
}

struct PgdResult {
  std::vector<double> z;
  bool projections_converged = true;
};

/// Projected gradient ascent on <c, z>. The projection onto K alternates the
/// l2-ball cap with the exact l1-ball projection, carrying Dykstra correction
/// increments so the fixpoint is the exact Euclidean projection onto the
/// intersection (plain alternation has an O(step) bias at the PGD fixpoint).
/// Iterated until the point stops moving (1e-10). Test oracle; independent of
/// the closed form.
inline PgdResult pgd_oracle(const RecoveryProblem& p, int iters, double step) {
  if (iters < 1 || step <= 0) throw std::invalid_argument("pgd_oracle: bad iters/step");
  const std::size_t n = p.c.size();
  const double sqrt_k = std::sqrt(static_cast<double>(p.k));
  PgdResult res;
  res.z.assign(n, 0.0);

  std::vector<double> inc_ball(n), inc_diamond(n), x(n), y(n);
  auto project_k = [&](const std::vector<double>& w) {
    std::fill(inc_ball.begin(), inc_ball.end(), 0.0);
    std::fill(inc_diamond.begin(), inc_diamond.end(), 0.0);
    x = w;
    // near-tangential geometries (sqrt(k) close to sqrt(dim)) converge slowly
    for (int it = 0; it < 2000; ++it) {
      std::vector<double> prev = x;
      for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + inc_ball[i];
      double nrm = detail::l2_norm(y);
      std::vector<double> capped = y;
      if (nrm > 1.0)
        for (double& v : capped) v /= nrm;
      for (std::size_t i = 0; i < n; ++i) inc_ball[i] = y[i] - capped[i];
      for (std::size_t i = 0; i < n; ++i) y[i] = capped[i] + inc_diamond[i];
      x = project_l1_ball(y, sqrt_k);
      for (std::size_t i = 0; i < n; ++i) inc_diamond[i] = y[i] - x[i];
      double moved = 0;
      for (std::size_t i = 0; i < n; ++i) moved += (x[i] - prev[i]) * (x[i] - prev[i]);
      if (std::sqrt(moved) <= 1e-10) return x;
    }
    res.projections_converged = false;
    return x;
  };

  for (int it = 0; it < iters; ++it) {
    std::vector<double> w = res.z;
    for (std::size_t i = 0; i < n; ++i) w[i] += step * p.c[i];
    res.z = project_k(w);
  }
  return res;
}

/// The coordinates of argmax <y, Phi_S z> on the candidate set s, in the
/// order of s. Cost O(rows * |s| + |s| log |s|); never touches other columns.
template <class Mat>
std::vector<double> solve_on_subset(const Mat& phi, const SignVector& y,
                                    const std::vector<index_t>& s, index_t k,
                                    double tol = 1e-9) {
  if (y.size() != phi.rows)
    throw std::invalid_argument("solve_on_subset: sign vector length mismatch");
  for (index_t j : s)
    if (j < 0 || j >= phi.cols)
      throw std::invalid_argument("solve_on_subset: index out of range");
  RecoveryProblem prob;
  prob.k = k;
  prob.tol = tol;
  prob.c.resize(s.size());
  for (std::size_t jj = 0; jj < s.size(); ++jj) {
    double acc = 0;
    for (index_t r = 0; r < phi.rows; ++r)
      acc += phi.entry(r, s[jj]) * static_cast<double>(y[r]);
    prob.c[jj] = acc;
  }
  return solve_linear_over_K(prob);
}

template <class Mat>
struct SubsetRecovery {
  SparseSignal estimate;
  bool empty_candidate_set = false;
};

/// Restrict the measurement matrix to columns `s`, maximize <y, Phi_S z> over
/// K, and embed the solution back into an n-vector supported on s.
template <class Mat>
SubsetRecovery<Mat> recover_on_subset(const Mat& phi, const SignVector& y,
                                      const std::vector<index_t>& s, index_t k,
                                      double tol = 1e-9) {
  SubsetRecovery<Mat> out;
  index_t n = phi.cols;
  if (s.empty()) {
    out.estimate = SparseSignal(n, std::vector<double>(static_cast<std::size_t>(n), 0.0),
                                std::max<index_t>(k, 1));
    out.empty_candidate_set = true;
    return out;
  }
  std::vector<double> z = solve_on_subset(phi, y, s, k, tol);
  std::vector<double> full(static_cast<std::size_t>(n), 0.0);
  for (std::size_t jj = 0; jj < s.size(); ++jj)
    full[static_cast<std::size_t>(s[jj])] = z[jj];
  out.estimate = SparseSignal(n, std::move(full), std::max<index_t>(k, 1));
  return out;
}

}  // namespace onebit::convex
