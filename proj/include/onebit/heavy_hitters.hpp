#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "onebit/core.hpp"
#include "onebit/rng.hpp"

namespace onebit::hh {

struct SketchConstants {
  int c_minus1 = 1;       // scales the per-interval failure budget
  int buckets_per_k = 32;  // buckets per repetition = buckets_per_k * k
  int votes = 24;          // sign-agreement repetitions per scheme (fresh sigma/buckets)
  int scheme_factor = 6;   // independent schemes per level = scheme_factor * delta_prime
  int cap_per_k = 16;      // surviving-interval cap = cap_per_k * k
  int delta_prime_override = 0;  // 0 = derive from delta
  double vote_hi = 0.8;          // cnt above vote_hi*votes reads as good
  double vote_lo = 0.2;          // ... or below vote_lo*votes
  double majority = 2.0 / 3.0;   // fraction of schemes that must agree
};

struct SketchConfig {
  index_t n = 0;  // power of two (caller pads)
  int levels = 0;  // log2 n; level l holds intervals of width 2^l, l in [0, levels)
  index_t k = 1;
  SketchConstants cst;
  double delta = 0;      // 1 / (c_minus1 * k * log2 n)
  int delta_prime = 1;   // ceil(log2(1/delta)) unless overridden
  int schemes = 1;       // scheme_factor * delta_prime
  index_t buckets = 1;   // buckets_per_k * k
  index_t rows_per_level = 0;
  index_t total_rows = 0;
  double heavy_threshold_factor = 0;  // 1/(10k)
  std::uint64_t seed = 0;

  static SketchConfig make(index_t n, index_t k, SketchConstants cst, std::uint64_t seed) {
    if (n < 2 || (n & (n - 1)) != 0)
      throw std::invalid_argument("SketchConfig: n must be a power of two >= 2");
    if (k < 1 || cst.c_minus1 < 1 || cst.buckets_per_k < 1 || cst.votes < 1 ||
        cst.scheme_factor < 1 || cst.cap_per_k < 1)
      throw std::invalid_argument("SketchConfig: constants must be positive");
    if (!(cst.vote_lo > 0 && cst.vote_lo < cst.vote_hi && cst.vote_hi < 1) ||
        !(cst.majority > 0 && cst.majority < 1))
      throw std::invalid_argument("SketchConfig: bad vote thresholds");
    SketchConfig cfg;
    cfg.n = n;
    cfg.k = k;
    cfg.cst = cst;
    cfg.seed = seed;
    while ((index_t{1} << cfg.levels) < n) ++cfg.levels;
    cfg.delta = 1.0 / (static_cast<double>(cst.c_minus1) * static_cast<double>(k) *
                       static_cast<double>(cfg.levels));
    cfg.delta_prime =
        cst.delta_prime_override > 0
            ? cst.delta_prime_override
            : std::max(1, static_cast<int>(std::ceil(std::log2(1.0 / cfg.delta))));
    cfg.schemes = cst.scheme_factor * cfg.delta_prime;
    cfg.buckets = static_cast<index_t>(cst.buckets_per_k) * k;
    cfg.rows_per_level = cfg.buckets * cst.votes * cfg.schemes;
    cfg.total_rows = cfg.rows_per_level * cfg.levels;
    cfg.heavy_threshold_factor = 1.0 / (10.0 * static_cast<double>(k));
    return cfg;
  }
};

/// Dyadic block of 2^level consecutive coordinates.
struct DyadicInterval {
  int level = 0;
  index_t index = 0;

  index_t width() const { return index_t{1} << level; }
  index_t first() const { return index * width(); }
  index_t last() const { return first() + width() - 1; }
  DyadicInterval parent() const { return {level + 1, index / 2}; }
  DyadicInterval child(int which) const { return {level - 1, 2 * index + which}; }
};

/// The full level hierarchy of sign sketches. Everything is a pure function
/// of (seed, level, scheme, vote), so rows are evaluated on demand and the
/// ensemble itself stores nothing but its configuration. Gaussians are shared
/// across votes within one (level, scheme) and fresh across schemes/levels.
struct SketchEnsemble {
  SketchConfig cfg;

  std::uint64_t gaussian_key(int level, int scheme) const {
    return rng::derive(cfg.seed, 0x6761, static_cast<std::uint64_t>(level) * cfg.schemes + scheme);
  }
  std::uint64_t bucket_key(int level, int scheme, int vote) const {
    return rng::derive(cfg.seed, 0x6862,
                       (static_cast<std::uint64_t>(level) * cfg.schemes + scheme) *
                               cfg.cst.votes +
                           vote);
  }
  std::uint64_t sign_key(int level, int scheme, int vote) const {
    return rng::derive(cfg.seed, 0x7363,
                       (static_cast<std::uint64_t>(level) * cfg.schemes + scheme) *
                               cfg.cst.votes +
                           vote);
  }

  double gaussian_of(int level, int scheme, index_t j) const {
    return rng::gaussian(gaussian_key(level, scheme), static_cast<std::uint64_t>(j));
  }
  index_t bucket_of(int level, int scheme, int vote, index_t interval) const {
    return static_cast<index_t>(rng::uniform_below(bucket_key(level, scheme, vote),
                                                   static_cast<std::uint64_t>(interval),
                                                   static_cast<std::uint64_t>(cfg.buckets)));
  }
  int sign_of(int level, int scheme, int vote, index_t interval) const {
    return rng::sign_pm1(sign_key(level, scheme, vote),
                         static_cast<std::uint64_t>(interval));
  }

  // gaussian-weighted mass of one interval (shared across votes)
  double interval_sum(int level, int scheme, index_t interval,
                      const std::vector<double>& x) const {
    index_t w = index_t{1} << level;
    index_t first = interval * w;
    double acc = 0;
    for (index_t j = first; j < first + w; ++j)
      acc += gaussian_of(level, scheme, j) * x[static_cast<std::size_t>(j)];
    return acc;
  }

  index_t row_index(int level, int scheme, int vote, index_t bucket) const {
    return static_cast<index_t>(level) * cfg.rows_per_level +
           (static_cast<index_t>(scheme) * cfg.cst.votes + vote) * cfg.buckets + bucket;
  }

  // one row's dot product, O(n); for tests and dense materialization
  double row_value(int level, int scheme, int vote, index_t bucket,
                   const std::vector<double>& x) const {
    index_t intervals = cfg.n >> level;
    double acc = 0;
    for (index_t a = 0; a < intervals; ++a)
      if (bucket_of(level, scheme, vote, a) == bucket)
        acc += sign_of(level, scheme, vote, a) * interval_sum(level, scheme, a, x);
    return acc;
  }

  /// All measurement values in row order (level-major, then scheme, vote, bucket).
  std::vector<double> measure(const std::vector<double>& x) const {
    if (static_cast<index_t>(x.size()) != cfg.n)
      throw std::invalid_argument("SketchEnsemble::measure: dimension mismatch");
    std::vector<double> out(static_cast<std::size_t>(cfg.total_rows), 0.0);
    std::vector<double> z;
    for (int level = 0; level < cfg.levels; ++level) {
      index_t intervals = cfg.n >> level;
      z.assign(static_cast<std::size_t>(intervals), 0.0);
      for (int scheme = 0; scheme < cfg.schemes; ++scheme) {
        for (index_t a = 0; a < intervals; ++a)
          z[static_cast<std::size_t>(a)] = interval_sum(level, scheme, a, x);
        for (int vote = 0; vote < cfg.cst.votes; ++vote) {
          index_t base = row_index(level, scheme, vote, 0);
          for (index_t a = 0; a < intervals; ++a)
            out[static_cast<std::size_t>(base + bucket_of(level, scheme, vote, a))] +=
                sign_of(level, scheme, vote, a) * z[static_cast<std::size_t>(a)];
        }
      }
    }
    return out;
  }

  SignVector measure_signs(const std::vector<double>& x, double zero_tol = 0.0) const {
    return sign_encode_values(measure(x), zero_tol);
  }
};

inline SketchEnsemble build_sketch(const SketchConfig& cfg) { return SketchEnsemble{cfg}; }

struct HeavyRecovery {
  std::vector<index_t> items;
  bool trimmed = false;        // the per-level cap had to discard candidates
  std::uint64_t scored = 0;    // candidate intervals examined across all levels
};

/// Top-down recovery: expand surviving intervals level by level, keep an
/// interval when its sign-agreement count is extreme (> 0.8 or < 0.2 of the
/// votes) for more than 2/3 of the schemes, and cap the survivor list at
/// cap_per_k * k entries (highest scheme-approval first).
inline HeavyRecovery recover_heavy(const SketchEnsemble& ensemble, const SignVector& y) {
  const SketchConfig& cfg = ensemble.cfg;
  if (y.size() != cfg.total_rows)
    throw std::invalid_argument("recover_heavy: sign vector length mismatch");
  const index_t cap = static_cast<index_t>(cfg.cst.cap_per_k) * cfg.k;
  const double hi = cfg.cst.vote_hi * cfg.cst.votes;
  const double lo = cfg.cst.vote_lo * cfg.cst.votes;

  HeavyRecovery out;
  std::vector<index_t> survivors{0};  // the whole range, one level above the top sketch
  for (int level = cfg.levels - 1; level >= 0; --level) {
    std::vector<std::pair<int, index_t>> kept;  // (scheme approvals, interval)
    for (index_t parent : survivors)
      for (int side = 0; side < 2; ++side) {
        index_t a = 2 * parent + side;
        ++out.scored;
        int good = 0;
        for (int scheme = 0; scheme < cfg.schemes; ++scheme) {
          int cnt = 0;
          for (int vote = 0; vote < cfg.cst.votes; ++vote) {
            index_t q = ensemble.bucket_of(level, scheme, vote, a);
            if (y[ensemble.row_index(level, scheme, vote, q)] ==
                ensemble.sign_of(level, scheme, vote, a))
              ++cnt;
          }
          if (cnt > hi || cnt < lo) ++good;
        }
        if (good > cfg.cst.majority * cfg.schemes) kept.emplace_back(good, a);
      }
    if (static_cast<index_t>(kept.size()) > cap) {
      std::sort(kept.begin(), kept.end(), [](const auto& x, const auto& yy) {
        if (x.first != yy.first) return x.first > yy.first;
        return x.second < yy.second;
      });
      kept.resize(static_cast<std::size_t>(cap));
      out.trimmed = true;
    }
    survivors.clear();
    for (auto& [good, a] : kept) survivors.push_back(a);
    std::sort(survivors.begin(), survivors.end());
  }
  out.items = std::move(survivors);
  return out;
}

/// 1/z^2 for the z with P[N(0,1)^2 > z^2... ] -- the threshold constant with
/// P[Y^2 > 1/c] = 1/10 for standard normal Y.
inline double derived_c_thr() {
  double z = rng::inv_norm_cdf_precise(0.95);
  return 1.0 / (z * z);
}

/// Coordinates above the heavy-hitter threshold |x_i|^2 > tail^2/(10k).
inline std::vector<index_t> heavy_indices(const SparseSignal& x, index_t k) {
  double thr = x.tail_norm_sq(k) / (10.0 * static_cast<double>(k));
  std::vector<index_t> out;
  for (index_t i = 0; i < x.n; ++i) {
    double v = x.entries[static_cast<std::size_t>(i)];
    if (v * v > thr) out.push_back(i);
  }
  return out;
}

}  // namespace onebit::hh
