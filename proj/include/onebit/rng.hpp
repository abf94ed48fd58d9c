#pragma once

#include <cmath>
#include <cstdint>

// Counter-based splittable randomness. Every consumer derives its own key
// from a root seed and addresses draws by counter, so results are independent
// of evaluation order and thread scheduling.

namespace onebit::rng {

inline std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// splitmix64 stream: draw `counter` of the stream keyed by `key`
inline std::uint64_t bits(std::uint64_t key, std::uint64_t counter) {
  return mix(key + (counter + 1) * 0x9E3779B97F4A7C15ULL);
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
  return mix(seed ^ mix(tag + 0x2545F4914F6CDD1DULL));
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag1, std::uint64_t tag2) {
  return derive(derive(seed, tag1), tag2);
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t t1, std::uint64_t t2,
                            std::uint64_t t3) {
  return derive(derive(seed, t1, t2), t3);
}

// uniform on (0,1), never exactly 0 or 1
inline double uniform01(std::uint64_t key, std::uint64_t counter) {
  return (static_cast<double>(bits(key, counter) >> 11) + 0.5) * 0x1.0p-53;
}

inline std::uint64_t uniform_below(std::uint64_t key, std::uint64_t counter,
                                   std::uint64_t n) {
  return static_cast<std::uint64_t>(uniform01(key, counter) * static_cast<double>(n));
}

inline int sign_pm1(std::uint64_t key, std::uint64_t counter) {
  return (bits(key, counter) & 1u) ? 1 : -1;
}

// Inverse standard normal CDF, Acklam's rational approximation
// (|relative error| < 1.15e-9 over (0,1)).
inline double inv_norm_cdf(double p) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double q, r;
  if (p < p_low) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// One Halley polish step; accurate to ~1e-14 for p away from the extreme tails.
inline double inv_norm_cdf_precise(double p) {
  double x = inv_norm_cdf(p);
  const double sqrt2 = 1.4142135623730951;
  const double sqrt_2pi = 2.5066282746310002;
  double e = 0.5 * std::erfc(-x / sqrt2) - p;
  double u = e * sqrt_2pi * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

inline double gaussian(std::uint64_t key, std::uint64_t counter) {
  return inv_norm_cdf(uniform01(key, counter));
}

}  // namespace onebit::rng
