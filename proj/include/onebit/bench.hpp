#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "onebit/schemes.hpp"

namespace onebit::bench {

struct TrialRow {
  std::string scheme;
  index_t n = 0;
  index_t k = 1;
  double delta = 0;
  std::uint64_t seed = 0;
  index_t measurements = 0;
  index_t stage1_size = 0;
  double squared_error = 0;
  int success = 0;
  double build_ms = 0;
  double encode_ms = 0;
  double decode_ms = 0;
};

inline const char* csv_header() {
  return "scheme,n,k,delta,seed,measurements,stage1_size,squared_error,success,"
         "build_ms,encode_ms,decode_ms";
}

namespace detail {

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// least-squares slope of log(t) against log(n)
inline double fit_exponent(const std::vector<std::pair<double, double>>& pts) {
  double mx = 0, my = 0;
  for (auto& [n, t] : pts) {
    mx += std::log(n);
    my += std::log(std::max(t, 1e-5));
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double num = 0, den = 0;
  for (auto& [n, t] : pts) {
    double dx = std::log(n) - mx;
    num += dx * (std::log(std::max(t, 1e-5)) - my);
    den += dx * dx;
  }
  return den > 0 ? num / den : 0.0;
}

}  // namespace detail

inline std::string to_csv(const TrialRow& r) {
  std::ostringstream os;
  os << r.scheme << ',' << r.n << ',' << r.k << ',' << detail::fmt17(r.delta) << ','
     << r.seed << ',' << r.measurements << ',' << r.stage1_size << ','
     << detail::fmt17(r.squared_error) << ',' << r.success << ','
     << detail::fmt17(r.build_ms) << ',' << detail::fmt17(r.encode_ms) << ','
     << detail::fmt17(r.decode_ms);
  return os.str();
}

inline TrialRow parse_csv_row(const std::string& line) {
  std::vector<std::string> f;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      f.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  f.push_back(cur);
  if (f.size() != 12) throw std::runtime_error("parse_csv_row: expected 12 fields");
  TrialRow r;
  r.scheme = f[0];
  r.n = std::stoll(f[1]);
  r.k = std::stoll(f[2]);
  r.delta = std::strtod(f[3].c_str(), nullptr);
  r.seed = std::stoull(f[4]);
  r.measurements = std::stoll(f[5]);
  r.stage1_size = std::stoll(f[6]);
  r.squared_error = std::strtod(f[7].c_str(), nullptr);
  r.success = std::stoi(f[8]);
  r.build_ms = std::strtod(f[9].c_str(), nullptr);
  r.encode_ms = std::strtod(f[10].c_str(), nullptr);
  r.decode_ms = std::strtod(f[11].c_str(), nullptr);
  return r;
}

inline TrialRow row_from_report(const schemes::SchemeReport& rep) {
  TrialRow r;
  r.scheme = rep.scheme;
  r.n = rep.n;
  r.k = rep.k;
  r.delta = rep.delta;
  r.seed = rep.seed;
  r.measurements = rep.measurements_used;
  r.stage1_size = static_cast<index_t>(rep.stage1_set.size());
  r.squared_error = rep.squared_error;
  r.success = rep.success ? 1 : 0;
  r.build_ms = rep.build_ms;
  r.encode_ms = rep.encode_ms;
  r.decode_ms = rep.decode_ms;
  return r;
}

// ---- signals ----------------------------------------------------------

enum class SignalKind { onehot, planted, random_sparse, file };

struct SignalSpec {
  SignalKind kind = SignalKind::random_sparse;
  std::string path;  // for SignalKind::file
};

inline SignalSpec parse_signal(const std::string& s) {
  if (s == "onehot") return {SignalKind::onehot, ""};
  if (s == "planted") return {SignalKind::planted, ""};
  if (s == "random-sparse") return {SignalKind::random_sparse, ""};
  if (s.rfind("file:", 0) == 0) return {SignalKind::file, s.substr(5)};
  throw std::invalid_argument("unknown signal kind '" + s + "'");
}

inline SparseSignal make_signal(const SignalSpec& spec, index_t n, index_t k,
                                std::uint64_t trial_seed,
                                const SparseSignal* preloaded = nullptr) {
  switch (spec.kind) {
    case SignalKind::onehot: return schemes::make_onehot(n, k);
    case SignalKind::planted: return schemes::make_planted(n, k, trial_seed);
    case SignalKind::random_sparse: return schemes::make_random_sparse(n, k, trial_seed);
    case SignalKind::file:
      if (!preloaded) throw std::logic_error("file signal must be preloaded");
      return *preloaded;
  }
  throw std::logic_error("make_signal: bad kind");
}

// ---- trial runners ----------------------------------------------------

inline int configured_threads(index_t trials) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("ONEBIT_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) hw = v;
  }
  return static_cast<int>(std::min<index_t>(hw, std::max<index_t>(trials, 1)));
}

/// Seeded Monte-Carlo trials; trials are independent (per-trial derived seed)
/// and run on a worker pool, rows are kept in trial order.
inline std::vector<TrialRow> run_trials(const schemes::SchemeConfig& base,
                                        const SignalSpec& spec, index_t trials,
                                        const SparseSignal* preloaded = nullptr,
                                        int threads = 0) {
  if (trials < 0) throw std::invalid_argument("run_trials: negative trial count");
  std::vector<TrialRow> rows(static_cast<std::size_t>(trials));
  if (trials == 0) return rows;
  if (threads <= 0) threads = configured_threads(trials);
  std::atomic<index_t> next{0};
  auto worker = [&]() {
    for (;;) {
      index_t i = next.fetch_add(1);
      if (i >= trials) return;
      schemes::SchemeConfig cfg = base;
      cfg.seed = rng::derive(base.seed, 0x7472, static_cast<std::uint64_t>(i));
      SparseSignal x = make_signal(spec, cfg.n, cfg.k,
                                   rng::derive(cfg.seed, 0x736967), preloaded);
      rows[static_cast<std::size_t>(i)] = row_from_report(schemes::run_scheme(x, cfg));
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

/// Exhaustive sweeps: every support (support scheme), or every support and
/// sign pattern (forall scheme), with seeded magnitudes.
inline std::vector<TrialRow> run_exhaustive(const schemes::SchemeConfig& base,
                                            double budget = 2e6) {
  if (base.scheme != schemes::SchemeId::support &&
      base.scheme != schemes::SchemeId::noiseless_forall)
    throw std::invalid_argument("--exhaustive requires the support or forall scheme");
  double combos = 1;
  for (index_t i = 0; i < base.k; ++i)
    combos *= static_cast<double>(base.n - i) / static_cast<double>(i + 1);
  double patterns = base.scheme == schemes::SchemeId::noiseless_forall
                        ? std::pow(2.0, static_cast<double>(base.k))
                        : 1.0;
  if (combos * patterns > budget)
    throw std::invalid_argument("--exhaustive: case count exceeds configured budget");

  std::vector<TrialRow> rows;
  std::vector<index_t> supp(static_cast<std::size_t>(base.k));
  for (index_t i = 0; i < base.k; ++i) supp[static_cast<std::size_t>(i)] = i;
  std::uint64_t case_idx = 0;
  bool more = true;
  while (more) {
    index_t npat = static_cast<index_t>(patterns);
    for (index_t pat = 0; pat < npat; ++pat) {
      schemes::SchemeConfig cfg = base;
      cfg.seed = rng::derive(base.seed, 0x6578, case_idx);
      std::uint64_t vkey = rng::derive(cfg.seed, 0x6D6167);
      std::vector<double> e(static_cast<std::size_t>(base.n), 0.0);
      double nrm = 0;
      for (std::size_t i = 0; i < supp.size(); ++i) {
        double mag = 0.5 + 0.5 * rng::uniform01(vkey, i);
        // forall sweeps every sign pattern; the support sweep draws signs
        double sgn = base.scheme == schemes::SchemeId::noiseless_forall
                         ? ((pat >> i) & 1 ? -1.0 : 1.0)
                         : (rng::bits(vkey, 100 + i) & 1 ? -1.0 : 1.0);
        e[static_cast<std::size_t>(supp[i])] = sgn * mag;
        nrm += mag * mag;
      }
      if (base.scheme == schemes::SchemeId::noiseless_forall) {
        nrm = std::sqrt(nrm);
        for (double& v : e) v /= nrm;
      }
      SparseSignal x(base.n, std::move(e), base.k);
      rows.push_back(row_from_report(schemes::run_scheme(x, cfg)));
      ++case_idx;
    }
    more = gt::detail::next_combination(supp, base.n);
  }
  return rows;
}

// ---- decode-time scaling ----------------------------------------------

struct ScalingPoint {
  index_t n = 0;
  index_t measurements = 0;
  double median_decode_ms = 0;
  double median_baseline_ms = 0;
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  double decode_exponent = 0;
  double baseline_exponent = 0;
  bool sublinear = false;  // decode exponent below 0.5
};

/// Per-n decode timing for the noiseless for-each scheme, with a full-scan
/// contrast decoder over the same encoded observations. Build and encode are
/// excluded from both timings.
inline ScalingReport scaling_report(const schemes::SchemeConfig& base,
                                    const std::vector<index_t>& n_list, index_t trials,
                                    std::uint64_t seed) {
  if (n_list.empty()) throw std::invalid_argument("scaling_report: empty n list");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1])
      throw std::invalid_argument("scaling_report: n list must be ascending");
  if (trials < 1) throw std::invalid_argument("scaling_report: trials >= 1 required");

  ScalingReport out;
  for (index_t n : n_list) {
    schemes::SchemeConfig cfg = base;
    cfg.scheme = schemes::SchemeId::noiseless_foreach;
    cfg.n = n;
    std::vector<double> dec, base_ms;
    ScalingPoint pt;
    pt.n = n;
    for (index_t t = 0; t < trials; ++t) {
      cfg.seed = rng::derive(seed, 0x7363, static_cast<std::uint64_t>(t));
      SparseSignal x =
          schemes::make_random_sparse(n, cfg.k, rng::derive(cfg.seed, 0x736967));
      auto rep = schemes::run_noiseless_foreach(x, cfg);
      pt.measurements = rep.measurements_used;
      dec.push_back(rep.decode_ms);

      auto pipe = schemes::encode_noiseless_foreach(x, cfg);
      auto t0 = std::chrono::steady_clock::now();
      auto scanned = gt::full_scan_decode(pipe.code, pipe.per_node);
      if (!scanned.items.empty()) {
        auto z = convex::solve_on_subset(pipe.g2, pipe.y_g2, scanned.items, cfg.k,
                                         cfg.solver_tol);
        (void)z;
      }
      base_ms.push_back(std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count());
    }
    pt.median_decode_ms = detail::median(dec);
    pt.median_baseline_ms = detail::median(base_ms);
    out.points.push_back(pt);
  }
  std::vector<std::pair<double, double>> dpts, bpts;
  for (auto& pt : out.points) {
    dpts.emplace_back(static_cast<double>(pt.n), pt.median_decode_ms);
    bpts.emplace_back(static_cast<double>(pt.n), pt.median_baseline_ms);
  }
  out.decode_exponent = detail::fit_exponent(dpts);
  out.baseline_exponent = detail::fit_exponent(bpts);
  out.sublinear = out.decode_exponent < 0.5;
  return out;
}

}  // namespace onebit::bench
