#pragma once

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "onebit/bench.hpp"

namespace onebit::bench {

namespace detail {

inline bool apply_constant(schemes::SchemeConfig& cfg, const std::string& kv,
                           std::string& err) {
  auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) {
    err = "expected KEY=VAL, got '" + kv + "'";
    return false;
  }
  std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
  auto as_int = [&]() { return std::stoi(val); };
  auto as_double = [&]() { return std::strtod(val.c_str(), nullptr); };
  try {
    if (key == "c_minus1") cfg.sketch.c_minus1 = as_int();
    else if (key == "c0" || key == "buckets_per_k") cfg.sketch.buckets_per_k = as_int();
    else if (key == "c1" || key == "votes") cfg.sketch.votes = as_int();
    else if (key == "c2" || key == "scheme_factor") cfg.sketch.scheme_factor = as_int();
    else if (key == "c_cap" || key == "cap_per_k") cfg.sketch.cap_per_k = as_int();
    else if (key == "delta_prime") cfg.sketch.delta_prime_override = as_int();
    else if (key == "vote_hi") cfg.sketch.vote_hi = as_double();
    else if (key == "vote_lo") cfg.sketch.vote_lo = as_double();
    else if (key == "majority") cfg.sketch.majority = as_double();
    else if (key == "c_g") cfg.c_g = as_double();
    else if (key == "c_d") cfg.c_d = as_double();
    else if (key == "success_c") cfg.success_c = as_double();
    else if (key == "zero_tol") cfg.zero_tol = as_double();
    else if (key == "solver_tol") cfg.solver_tol = as_double();
    else if (key == "verify_limit") cfg.forall_verify_limit = as_int();
    else if (key == "gaussian_v") cfg.gaussian_value_matrix = as_int() != 0;
    else if (key == "d_rule") {
      if (val == "proof") cfg.d_rule = gt::DRule::proof_consistent;
      else if (val == "paper") cfg.d_rule = gt::DRule::paper_stated;
      else {
        err = "d_rule must be 'proof' or 'paper'";
        return false;
      }
    } else {
      err = "unknown constant '" + key + "'";
      return false;
    }
  } catch (const std::exception&) {
    err = "bad value in '" + kv + "'";
    return false;
  }
  return true;
}

inline std::vector<index_t> parse_n_list(const std::string& s) {
  std::vector<index_t> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::stoll(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

inline int cli_run(int argc, const char* const* argv) {
  CLI::App app{"one-bit compressed sensing benchmark"};
  std::string scheme, signal = "random-sparse", out_path = "onebit_trials.csv";
  std::string dump_path, load_path, scaling_list;
  index_t n = 0, k = 1, trials = 1;
  double delta = 0.25;
  std::uint64_t seed = 1;
  std::vector<std::string> constants;
  bool exhaustive = false, no_timings = false;
  std::vector<index_t> verify_disjunct, verify_list_disjunct;

  app.add_option("--scheme", scheme, "l2l2|foreach|forall|support");
  app.add_option("--n", n, "signal dimension");
  app.add_option("--k", k, "sparsity");
  app.add_option("--delta", delta, "accuracy target");
  app.add_option("--trials", trials, "Monte-Carlo trial count");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--signal", signal, "onehot|planted|random-sparse|file:PATH");
  app.add_option("--out", out_path, "CSV output path");
  app.add_option("--constants", constants, "KEY=VAL overrides")->take_all();
  app.add_option("--dump-matrix", dump_path, "write the trial-0 measurement matrix");
  app.add_option("--load-matrix", load_path, "inspect a serialized matrix and exit");
  app.add_option("--verify-disjunct", verify_disjunct,
                 "with --load-matrix: check k-disjunctness")
      ->expected(1);
  app.add_option("--verify-list-disjunct", verify_list_disjunct,
                 "with --load-matrix: check (k,l)-list-disjunctness")
      ->expected(2);
  app.add_flag("--exhaustive", exhaustive, "sweep all supports (support/forall)");
  app.add_option("--scaling", scaling_list,
                 "comma-separated n list: decode-time scaling report");
  app.add_flag("--no-timings", no_timings, "zero the timing columns (reproducible files)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (!load_path.empty()) {
    try {
      LoadedMatrix m = load_matrix_file(load_path);
      bool binary = m.kind == LoadedMatrix::Kind::binary;
      index_t rows = binary ? m.binary.rows : m.real.rows;
      index_t cols = binary ? m.binary.cols : m.real.cols;
      std::cout << "rows " << rows << " cols " << cols << " kind "
                << (binary ? "binary" : "real") << " seed "
                << (binary ? 0 : m.real.rng_seed) << "\n";
      if (!verify_disjunct.empty() || !verify_list_disjunct.empty()) {
        if (!binary) {
          std::cerr << "verification requires a binary matrix\n";
          return 2;
        }
        if (!verify_disjunct.empty())
          std::cout << "disjunct(k=" << verify_disjunct[0] << "): "
                    << (gt::is_disjunct(m.binary, verify_disjunct[0]) ? "true" : "false")
                    << "\n";
        if (!verify_list_disjunct.empty())
          std::cout << "list_disjunct(k=" << verify_list_disjunct[0]
                    << ",l=" << verify_list_disjunct[1] << "): "
                    << (gt::is_list_disjunct(m.binary, verify_list_disjunct[0],
                                             verify_list_disjunct[1])
                            ? "true"
                            : "false")
                    << "\n";
      }
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }

  schemes::SchemeConfig cfg;
  try {
    if (scheme.empty()) throw std::invalid_argument("--scheme is required");
    cfg.scheme = schemes::parse_scheme(scheme);
    if (n < 2) throw std::invalid_argument("--n must be at least 2");
    if (k < 1 || k > n) throw std::invalid_argument("--k must satisfy 1 <= k <= n");
    if (!(delta > 0.0 && delta <= 1.0))
      throw std::invalid_argument("--delta must lie in (0, 1]");
    if (trials < 0) throw std::invalid_argument("--trials must be nonnegative");
    cfg.n = n;
    cfg.k = k;
    cfg.delta = delta;
    cfg.seed = seed;
    for (const std::string& kv : constants) {
      std::string err;
      if (!detail::apply_constant(cfg, kv, err)) throw std::invalid_argument(err);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (!dump_path.empty()) {
    try {
      write_matrix_file(dump_path, schemes::materialize_measurement_matrix(cfg));
      std::cout << "wrote measurement matrix to " << dump_path << "\n";
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }

  if (!scaling_list.empty()) {
    try {
      if (cfg.scheme != schemes::SchemeId::noiseless_foreach)
        throw std::invalid_argument(
            "--scaling measures the foreach scheme (it has the full-scan baseline)");
      auto n_list = detail::parse_n_list(scaling_list);
      auto rep = scaling_report(cfg, n_list, std::max<index_t>(trials, 3), seed);
      std::ofstream os(out_path);
      if (!os) throw std::runtime_error("cannot open " + out_path);
      os << "n,measurements,median_decode_ms,median_baseline_ms\n";
      for (auto& pt : rep.points)
        os << pt.n << ',' << pt.measurements << ',' << detail::fmt17(pt.median_decode_ms)
           << ',' << detail::fmt17(pt.median_baseline_ms) << '\n';
      std::printf("decode exponent %.3f  baseline exponent %.3f  sublinear %s\n",
                  rep.decode_exponent, rep.baseline_exponent,
                  rep.sublinear ? "yes" : "no");
      std::printf("wrote %zu scaling rows to %s\n", rep.points.size(), out_path.c_str());
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }

  std::vector<TrialRow> rows;
  try {
    if (exhaustive) {
      rows = run_exhaustive(cfg);
    } else {
      SignalSpec spec = parse_signal(signal);
      SparseSignal preloaded;
      const SparseSignal* pre = nullptr;
      if (spec.kind == SignalKind::file) {
        preloaded = schemes::load_signal(spec.path);
        if (preloaded.n != cfg.n)
          throw std::invalid_argument("signal file dimension != --n");
        pre = &preloaded;
      }
      rows = run_trials(cfg, spec, trials, pre);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (no_timings)
    for (auto& r : rows) r.build_ms = r.encode_ms = r.decode_ms = 0.0;

  {
    std::ofstream os(out_path);
    if (!os) {
      std::cerr << "error: cannot open " << out_path << "\n";
      return 2;
    }
    os << csv_header() << '\n';
    for (const auto& r : rows) os << to_csv(r) << '\n';
  }

  double success = 0, err_sum = 0;
  std::vector<double> dts;
  for (const auto& r : rows) {
    success += r.success;
    err_sum += r.squared_error;
    dts.push_back(r.decode_ms);
  }
  std::size_t cnt = rows.size();
  std::printf("trials %zu  success rate %.4f  mean squared error %.6g  median decode_ms %.4g\n",
              cnt, cnt ? success / static_cast<double>(cnt) : 0.0,
              cnt ? err_sum / static_cast<double>(cnt) : 0.0,
              detail::median(dts));
  std::printf("wrote %zu rows to %s\n", cnt, out_path.c_str());
  return 0;
}

}  // namespace onebit::bench
