#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "onebit/convex.hpp"
#include "onebit/core.hpp"
#include "onebit/group_testing.hpp"
#include "onebit/heavy_hitters.hpp"
#include "onebit/rng.hpp"

namespace onebit::schemes {

/// Gaussian matrix evaluated on demand from its seed; never materialized in
/// the measurement paths, so encode cost scales with the support size.
struct ImplicitGaussian {
  index_t rows = 0;
  index_t cols = 0;
  std::uint64_t seed = 0;

  double entry(index_t r, index_t c) const {
    return rng::gaussian(seed, static_cast<std::uint64_t>(r) *
                                   static_cast<std::uint64_t>(cols) +
                               static_cast<std::uint64_t>(c));
  }

  RealMatrix materialize() const {
    RealMatrix m(rows, cols, seed);
    for (index_t r = 0; r < rows; ++r)
      for (index_t c = 0; c < cols; ++c) m.at(r, c) = entry(r, c);
    return m;
  }
};

enum class SchemeId { l2l2_foreach, noiseless_foreach, noiseless_forall, support };

inline const char* scheme_name(SchemeId s) {
  switch (s) {
    case SchemeId::l2l2_foreach: return "l2l2";
    case SchemeId::noiseless_foreach: return "foreach";
    case SchemeId::noiseless_forall: return "forall";
    case SchemeId::support: return "support";
  }
  return "?";
}

inline SchemeId parse_scheme(const std::string& s) {
  if (s == "l2l2") return SchemeId::l2l2_foreach;
  if (s == "foreach") return SchemeId::noiseless_foreach;
  if (s == "forall") return SchemeId::noiseless_forall;
  if (s == "support") return SchemeId::support;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

struct SchemeConfig {
  index_t n = 0;
  index_t k = 1;
  double delta = 0.25;
  SchemeId scheme = SchemeId::l2l2_foreach;

  hh::SketchConstants sketch;
  double success_c = 2.0;  // constant in the l2/l2 guarantee
  double c_g = 64.0;       // gaussian row multiplier
  double c_d = 5.0;
  gt::DRule d_rule = gt::DRule::proof_consistent;
  bool gaussian_value_matrix = false;  // zero-detection rows: gaussian instead of Vandermonde
  double zero_tol = 0.0;
  double solver_tol = 1e-9;
  index_t forall_verify_limit = 512;  // oracle-verify the for-all code when n <= this
  std::uint64_t seed = 1;

  index_t gaussian_rows() const {
    double base = c_g * static_cast<double>(k) / (delta * delta);
    if (scheme == SchemeId::noiseless_forall)
      base *= std::max(1.0, std::log2(static_cast<double>(n) / static_cast<double>(k)));
    return static_cast<index_t>(std::ceil(base));
  }
};

struct SchemeReport {
  std::string scheme;
  index_t n = 0;
  index_t k = 1;
  double delta = 0;
  std::uint64_t seed = 0;

  index_t measurements_used = 0;
  std::vector<index_t> stage1_set;
  std::vector<double> estimate;  // empty for support recovery
  double squared_error = 0;
  double error_bound = 0;
  bool success = false;
  bool heavy_contract_ok = true;    // l2l2: threshold set captured within the cap
  bool stage1_verified = true;      // forall: code passed the list-disjunct oracle
  bool stage1_trimmed = false;
  double build_ms = 0;
  double encode_ms = 0;
  double decode_ms = 0;
  std::uint64_t decode_candidate_checks = 0;
};

// ---- signal generators -----------------------------------------------------

inline SparseSignal make_onehot(index_t n, index_t k) {
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  e[static_cast<std::size_t>(n / 2)] = 1.0;
  return SparseSignal(n, std::move(e), k);
}

inline std::vector<index_t> draw_support(index_t n, index_t k, std::uint64_t seed) {
  std::vector<index_t> pos;
  std::uint64_t ctr = 0;
  while (static_cast<index_t>(pos.size()) < k) {
    auto p = static_cast<index_t>(rng::uniform_below(seed, ctr++, static_cast<std::uint64_t>(n)));
    bool dup = false;
    for (index_t q : pos) dup = dup || q == p;
    if (!dup) pos.push_back(p);
  }
  std::sort(pos.begin(), pos.end());
  return pos;
}

inline SparseSignal make_random_sparse(index_t n, index_t k, std::uint64_t seed) {
  auto pos = draw_support(n, k, rng::derive(seed, 0x706F73));
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  std::uint64_t vkey = rng::derive(seed, 0x76616C);
  double nrm = 0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    double v = rng::gaussian(vkey, i);
    if (std::abs(v) < 1e-3) v = v < 0 ? -1e-3 : 1e-3;  // keep entries clearly nonzero
    e[static_cast<std::size_t>(pos[i])] = v;
    nrm += v * v;
  }
  nrm = std::sqrt(nrm);
  for (double& v : e) v /= nrm;
  return SparseSignal(n, std::move(e), k);
}

/// k planted coordinates of value 1/2 plus a +-uniform tail of total norm 1/2
/// over the remaining coordinates, normalized to the unit sphere.
inline SparseSignal make_planted(index_t n, index_t k, std::uint64_t seed) {
  auto pos = draw_support(n, k, rng::derive(seed, 0x706C74));
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  std::uint64_t skey = rng::derive(seed, 0x746C73);
  double tail_mag = 0.5 / std::sqrt(static_cast<double>(n - k));
  for (index_t i = 0; i < n; ++i)
    e[static_cast<std::size_t>(i)] =
        tail_mag * rng::sign_pm1(skey, static_cast<std::uint64_t>(i));
  for (index_t p : pos) e[static_cast<std::size_t>(p)] = 0.5;
  double nrm = 0;
  for (double v : e) nrm += v * v;
  nrm = std::sqrt(nrm);
  for (double& v : e) v /= nrm;
  return SparseSignal(n, std::move(e), k);
}

inline SparseSignal load_signal(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open signal file " + path);
  index_t n, k;
  if (!(is >> n >> k)) throw std::runtime_error("signal file: bad header");
  std::vector<double> e(static_cast<std::size_t>(n));
  for (auto& v : e)
    if (!(is >> v)) throw std::runtime_error("signal file: truncated entries");
  return SparseSignal(n, std::move(e), k);
}

// ---- shared pieces ---------------------------------------------------------

namespace detail {

using clock = std::chrono::steady_clock;

inline double ms_since(clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
}

inline std::uint64_t sketch_seed(const SchemeConfig& c) { return rng::derive(c.seed, 0x534B); }
inline std::uint64_t phi_seed(const SchemeConfig& c) { return rng::derive(c.seed, 0x5048); }
inline std::uint64_t code_seed(const SchemeConfig& c) { return rng::derive(c.seed, 0x4144); }
inline std::uint64_t mask_seed(const SchemeConfig& c) { return rng::derive(c.seed, 0x4731); }
inline std::uint64_t final_seed(const SchemeConfig& c) { return rng::derive(c.seed, 0x4732); }
inline std::uint64_t value_seed(const SchemeConfig& c) { return rng::derive(c.seed, 0x5644); }

inline index_t next_pow2(index_t n) {
  index_t p = 1;
  while (p < n) p *= 2;
  return p;
}

inline double squared_error(const std::vector<double>& est, const SparseSignal& x) {
  double acc = 0;
  for (index_t i = 0; i < x.n; ++i) {
    double d = est[static_cast<std::size_t>(i)] - x.entries[static_cast<std::size_t>(i)];
    acc += d * d;
  }
  return acc;
}

inline std::vector<double> embed(index_t n, const std::vector<index_t>& s,
                                 const std::vector<double>& z) {
  std::vector<double> full(static_cast<std::size_t>(n), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i)
    full[static_cast<std::size_t>(s[i])] = z[i];
  return full;
}

inline SignVector implicit_signs(const ImplicitGaussian& g, const SparseSignal& x,
                                 const std::vector<index_t>& support, double zero_tol) {
  SignVector y;
  y.bits.resize(static_cast<std::size_t>(g.rows));
  for (index_t r = 0; r < g.rows; ++r) {
    double acc = 0;
    for (index_t j : support)
      acc += g.entry(r, j) * x.entries[static_cast<std::size_t>(j)];
    y.bits[static_cast<std::size_t>(r)] = sign_of_value(acc, zero_tol);
  }
  return y;
}

struct ForallCode {
  BinaryTestMatrix a;
  bool verified = false;
};

/// Deterministic for-all stage-1 code: retry seeds until the list-disjunct
/// oracle accepts one (when n is small enough to check), otherwise take the
/// first draw and mark it unverified.
inline ForallCode build_forall_code(const SchemeConfig& cfg) {
  int d = gt::forall_code_degree(cfg.k, cfg.n);
  ForallCode out;
  for (std::uint64_t attempt = 0; attempt < 8; ++attempt) {
    auto code = gt::build_concat_matrix(cfg.n, cfg.k, d,
                                        rng::derive(code_seed(cfg), attempt));
    out.a = code.to_binary();
    if (cfg.n > cfg.forall_verify_limit) return out;  // accepted probabilistically
    if (gt::is_list_disjunct(out.a, cfg.k, cfg.k)) {
      out.verified = true;
      return out;
    }
  }
  return out;
}

}  // namespace detail

/// Rows i = 0..k-1 are powers node_j^i of nodes drawn uniformly from [1,2]
/// (distinct almost surely, so every k x k submatrix is invertible). For
/// k > 12 the powers get badly conditioned; pass gaussian=true to use
/// standard normal rows, which satisfy the same minor property a.s.
inline RealMatrix make_value_matrix(index_t k, index_t n, std::uint64_t seed,
                                    bool gaussian = false) {
  RealMatrix v(k, n, seed);
  if (gaussian) {
    for (index_t i = 0; i < k; ++i)
      for (index_t j = 0; j < n; ++j)
        v.at(i, j) = rng::gaussian(seed, static_cast<std::uint64_t>(i) * n + j);
    return v;
  }
  for (index_t j = 0; j < n; ++j) {
    double node = 1.0 + rng::uniform01(seed, static_cast<std::uint64_t>(j));
    double pw = 1.0;
    for (index_t i = 0; i < k; ++i) {
      v.at(i, j) = pw;
      pw *= node;
    }
  }
  return v;
}

// ---- scheme pipelines ------------------------------------------------------

/// Sign sketch hierarchy + gaussian block; heavy-hitter recovery then convex
/// estimation on the recovered set. Success is the delta-l2/l2 guarantee.
inline SchemeReport run_l2l2_foreach(const SparseSignal& x, const SchemeConfig& cfg) {
  if (x.n != cfg.n) throw std::invalid_argument("run_l2l2_foreach: dimension mismatch");
  if (!x.is_unit()) throw std::invalid_argument("run_l2l2_foreach: x must be unit norm");
  SchemeReport rep;
  rep.scheme = scheme_name(SchemeId::l2l2_foreach);
  rep.n = cfg.n;
  rep.k = cfg.k;
  rep.delta = cfg.delta;
  rep.seed = cfg.seed;

  auto t0 = detail::clock::now();
  index_t n2 = detail::next_pow2(cfg.n);
  auto scfg = hh::SketchConfig::make(n2, cfg.k, cfg.sketch, detail::sketch_seed(cfg));
  auto ensemble = hh::build_sketch(scfg);
  ImplicitGaussian phi{cfg.gaussian_rows(), n2, detail::phi_seed(cfg)};
  rep.measurements_used = scfg.total_rows + phi.rows;
  rep.build_ms = detail::ms_since(t0);

  t0 = detail::clock::now();
  std::vector<double> xe = x.entries;
  xe.resize(static_cast<std::size_t>(n2), 0.0);
  SignVector y_sketch = ensemble.measure_signs(xe, cfg.zero_tol);
  SparseSignal x2(n2, xe, cfg.k);
  std::vector<index_t> full;
  for (index_t j = 0; j < n2; ++j) full.push_back(j);
  SignVector y_phi = detail::implicit_signs(phi, x2, full, cfg.zero_tol);
  rep.encode_ms = detail::ms_since(t0);

  t0 = detail::clock::now();
  auto heavy = hh::recover_heavy(ensemble, y_sketch);
  rep.stage1_trimmed = heavy.trimmed;
  for (index_t j : heavy.items)
    if (j < cfg.n) rep.stage1_set.push_back(j);
  std::vector<double> z;
  if (!rep.stage1_set.empty())
    z = convex::solve_on_subset(phi, y_phi, rep.stage1_set, cfg.k, cfg.solver_tol);
  // decoding ends with the sparse pair (S, z_S); the dense embedding below
  // is output materialization
  rep.decode_ms = detail::ms_since(t0);
  rep.decode_candidate_checks = heavy.scored;
  rep.estimate = detail::embed(cfg.n, rep.stage1_set, z);

  rep.squared_error = detail::squared_error(rep.estimate, x);
  rep.error_bound = cfg.success_c * x.tail_norm_sq(cfg.k) + cfg.delta;
  rep.success = rep.squared_error <= rep.error_bound;
  auto required = hh::heavy_indices(x, cfg.k);
  bool captured = true;
  for (index_t j : required)
    captured = captured && std::binary_search(rep.stage1_set.begin(),
                                              rep.stage1_set.end(), j);
  rep.heavy_contract_ok =
      captured && static_cast<index_t>(rep.stage1_set.size()) <=
                      static_cast<index_t>(cfg.sketch.cap_per_k) * cfg.k;
  return rep;
}

/// Built matrices and encoded one-bit observations of the noiseless for-each
/// pipeline; shared between the scheme runner and the scaling baseline.
struct ForeachPipeline {
  gt::RecursiveGTMatrix code;
  ImplicitGaussian g1;
  ImplicitGaussian g2;
  SignVector y_pos, y_neg;  // paired signs of the masked code rows
  SignVector y_g2;
  std::vector<gt::TestOutcomeVector> per_node;  // group-testing view of the pairs
  double build_ms = 0;
  double encode_ms = 0;
};

inline ForeachPipeline encode_noiseless_foreach(const SparseSignal& x,
                                                const SchemeConfig& cfg) {
  if (x.n != cfg.n) throw std::invalid_argument("run_noiseless_foreach: dimension mismatch");
  if (!x.is_exactly_sparse())
    throw std::invalid_argument("run_noiseless_foreach: x must be exactly k-sparse");
  if (!x.is_unit()) throw std::invalid_argument("run_noiseless_foreach: x must be unit norm");
  ForeachPipeline p;

  auto t0 = detail::clock::now();
  gt::RecursiveParams params{cfg.c_d, cfg.d_rule, detail::code_seed(cfg)};
  p.code = gt::build_recursive_matrix(cfg.n, cfg.k, params);
  p.g1 = ImplicitGaussian{p.code.total_rows, cfg.n, detail::mask_seed(cfg)};
  p.g2 = ImplicitGaussian{cfg.gaussian_rows(), cfg.n, detail::final_seed(cfg)};
  p.build_ms = detail::ms_since(t0);

  t0 = detail::clock::now();
  auto support = x.support();
  std::vector<double> dots(static_cast<std::size_t>(p.code.total_rows), 0.0);
  for (index_t j : support)
    for (std::size_t v = 0; v < p.code.nodes.size(); ++v) {
      const auto& nd = p.code.nodes[v];
      index_t c = p.code.column_in_node(v, j);
      for (int b = 0; b < nd.code.d; ++b) {
        index_t r = nd.row_offset + nd.code.row_of(b, nd.code.symbol(c, b));
        dots[static_cast<std::size_t>(r)] +=
            p.g1.entry(r, j) * x.entries[static_cast<std::size_t>(j)];
      }
    }
  p.y_pos.bits.resize(dots.size());
  p.y_neg.bits.resize(dots.size());
  for (std::size_t i = 0; i < dots.size(); ++i) {
    p.y_pos.bits[i] = sign_of_value(dots[i], cfg.zero_tol);
    p.y_neg.bits[i] = sign_of_value(-dots[i], cfg.zero_tol);
  }
  p.y_g2 = detail::implicit_signs(p.g2, x, support, cfg.zero_tol);
  auto pair_outcomes = gt::outcomes_from_sign_pairs(p.y_pos, p.y_neg);
  p.per_node.resize(p.code.nodes.size());
  for (std::size_t v = 0; v < p.code.nodes.size(); ++v) {
    const auto& nd = p.code.nodes[v];
    p.per_node[v].positive.assign(
        pair_outcomes.positive.begin() + nd.row_offset,
        pair_outcomes.positive.begin() + nd.row_offset + nd.code.rows());
  }
  p.encode_ms = detail::ms_since(t0);
  return p;
}

/// Paired-sign group testing over the recursive matrix, then convex
/// estimation. Success is squared error <= delta (noiseless signals).
inline SchemeReport run_noiseless_foreach(const SparseSignal& x, const SchemeConfig& cfg) {
  SchemeReport rep;
  rep.scheme = scheme_name(SchemeId::noiseless_foreach);
  rep.n = cfg.n;
  rep.k = cfg.k;
  rep.delta = cfg.delta;
  rep.seed = cfg.seed;

  ForeachPipeline p = encode_noiseless_foreach(x, cfg);
  rep.measurements_used = 2 * p.code.total_rows + p.g2.rows;
  rep.build_ms = p.build_ms;
  rep.encode_ms = p.encode_ms;

  auto t0 = detail::clock::now();
  auto decoded = gt::recursive_decode(p.code, p.per_node);
  rep.stage1_set = decoded.items;
  rep.decode_candidate_checks = decoded.membership_checks;
  std::vector<double> z;
  if (!rep.stage1_set.empty())
    z = convex::solve_on_subset(p.g2, p.y_g2, rep.stage1_set, cfg.k, cfg.solver_tol);
  rep.decode_ms = detail::ms_since(t0);
  rep.estimate = detail::embed(cfg.n, rep.stage1_set, z);

  rep.squared_error = detail::squared_error(rep.estimate, x);
  rep.error_bound = cfg.delta;
  rep.success = rep.squared_error <= rep.error_bound;
  return rep;
}

/// One fixed (k,k)-list-disjunct code tensored with the value matrix;
/// zero-tests recover a superset of the support for every sparse signal.
inline SchemeReport run_noiseless_forall(const SparseSignal& x, const SchemeConfig& cfg) {
  if (x.n != cfg.n) throw std::invalid_argument("run_noiseless_forall: dimension mismatch");
  if (!x.is_exactly_sparse())
    throw std::invalid_argument("run_noiseless_forall: x must be exactly k-sparse");
  if (!x.is_unit()) throw std::invalid_argument("run_noiseless_forall: x must be unit norm");
  SchemeReport rep;
  rep.scheme = scheme_name(SchemeId::noiseless_forall);
  rep.n = cfg.n;
  rep.k = cfg.k;
  rep.delta = cfg.delta;
  rep.seed = cfg.seed;

  auto t0 = detail::clock::now();
  auto [a_bin, verified] = detail::build_forall_code(cfg);
  rep.stage1_verified = verified;
  RealMatrix v = make_value_matrix(cfg.k, cfg.n, detail::value_seed(cfg),
                                   cfg.gaussian_value_matrix || cfg.k > 12);
  ImplicitGaussian g2{cfg.gaussian_rows(), cfg.n, detail::final_seed(cfg)};
  rep.measurements_used = 2 * a_bin.rows * v.rows + g2.rows;
  rep.build_ms = detail::ms_since(t0);

  t0 = detail::clock::now();
  auto support = x.support();
  std::vector<double> dots(static_cast<std::size_t>(a_bin.rows * v.rows), 0.0);
  for (index_t j : support)
    for (index_t t : a_bin.column_supports[static_cast<std::size_t>(j)])
      for (index_t i = 0; i < v.rows; ++i)
        dots[static_cast<std::size_t>(t * v.rows + i)] +=
            v.at(i, j) * x.entries[static_cast<std::size_t>(j)];
  SignVector y_pos, y_neg;
  y_pos.bits.resize(dots.size());
  y_neg.bits.resize(dots.size());
  for (std::size_t i = 0; i < dots.size(); ++i) {
    y_pos.bits[i] = sign_of_value(dots[i], cfg.zero_tol);
    y_neg.bits[i] = sign_of_value(-dots[i], cfg.zero_tol);
  }
  SignVector y_g2 = detail::implicit_signs(g2, x, support, cfg.zero_tol);
  rep.encode_ms = detail::ms_since(t0);

  t0 = detail::clock::now();
  rep.stage1_set = gt::modified_decode(a_bin, v, y_pos, y_neg);
  rep.decode_candidate_checks = static_cast<std::uint64_t>(cfg.n);
  std::vector<double> z;
  if (!rep.stage1_set.empty())
    z = convex::solve_on_subset(g2, y_g2, rep.stage1_set, cfg.k, cfg.solver_tol);
  rep.decode_ms = detail::ms_since(t0);
  rep.estimate = detail::embed(cfg.n, rep.stage1_set, z);

  rep.squared_error = detail::squared_error(rep.estimate, x);
  rep.error_bound = cfg.delta;
  rep.success = rep.squared_error <= rep.error_bound;
  return rep;
}

/// Kautz-Singleton disjunct code tensored with the value matrix; the decoded
/// set must equal the support exactly. squared_error reports the symmetric
/// difference |S delta supp(x)|.
inline SchemeReport run_support_recovery(const SparseSignal& x, const SchemeConfig& cfg) {
  if (x.n != cfg.n) throw std::invalid_argument("run_support_recovery: dimension mismatch");
  if (!x.is_exactly_sparse())
    throw std::invalid_argument("run_support_recovery: x must be exactly k-sparse");
  SchemeReport rep;
  rep.scheme = scheme_name(SchemeId::support);
  rep.n = cfg.n;
  rep.k = cfg.k;
  rep.delta = cfg.delta;
  rep.seed = cfg.seed;

  auto t0 = detail::clock::now();
  BinaryTestMatrix b = gt::build_kautz_singleton(cfg.n, cfg.k);
  RealMatrix v = make_value_matrix(cfg.k, cfg.n, detail::value_seed(cfg),
                                   cfg.gaussian_value_matrix || cfg.k > 12);
  rep.measurements_used = 2 * b.rows * v.rows;
  rep.build_ms = detail::ms_since(t0);

  t0 = detail::clock::now();
  auto support = x.support();
  std::vector<double> dots(static_cast<std::size_t>(b.rows * v.rows), 0.0);
  for (index_t j : support)
    for (index_t t : b.column_supports[static_cast<std::size_t>(j)])
      for (index_t i = 0; i < v.rows; ++i)
        dots[static_cast<std::size_t>(t * v.rows + i)] +=
            v.at(i, j) * x.entries[static_cast<std::size_t>(j)];
  SignVector y_pos, y_neg;
  y_pos.bits.resize(dots.size());
  y_neg.bits.resize(dots.size());
  for (std::size_t i = 0; i < dots.size(); ++i) {
    y_pos.bits[i] = sign_of_value(dots[i], cfg.zero_tol);
    y_neg.bits[i] = sign_of_value(-dots[i], cfg.zero_tol);
  }
  rep.encode_ms = detail::ms_since(t0);

  t0 = detail::clock::now();
  rep.stage1_set = gt::modified_decode(b, v, y_pos, y_neg);
  rep.decode_candidate_checks = static_cast<std::uint64_t>(cfg.n);
  rep.decode_ms = detail::ms_since(t0);

  std::size_t inter = 0;
  for (index_t j : rep.stage1_set)
    if (std::binary_search(support.begin(), support.end(), j)) ++inter;
  rep.squared_error = static_cast<double>(rep.stage1_set.size() + support.size() - 2 * inter);
  rep.error_bound = 0.0;
  rep.success = rep.squared_error == 0.0;
  return rep;
}

inline SchemeReport run_scheme(const SparseSignal& x, const SchemeConfig& cfg) {
  switch (cfg.scheme) {
    case SchemeId::l2l2_foreach: return run_l2l2_foreach(x, cfg);
    case SchemeId::noiseless_foreach: return run_noiseless_foreach(x, cfg);
    case SchemeId::noiseless_forall: return run_noiseless_forall(x, cfg);
    case SchemeId::support: return run_support_recovery(x, cfg);
  }
  throw std::logic_error("run_scheme: bad scheme id");
}

/// Support-recovery entry point per contract: just the decoded index set.
inline std::vector<index_t> support_recovery_set(const SparseSignal& x,
                                                 const SchemeConfig& cfg) {
  return run_support_recovery(x, cfg).stage1_set;
}

// ---- dense materialization (desk scale; --dump-matrix and cross-checks) ----

inline RealMatrix materialize_sketch(const hh::SketchEnsemble& e) {
  const auto& cfg = e.cfg;
  RealMatrix m(cfg.total_rows, cfg.n, cfg.seed);
  for (int level = 0; level < cfg.levels; ++level) {
    index_t w = index_t{1} << level;
    for (int scheme = 0; scheme < cfg.schemes; ++scheme)
      for (int vote = 0; vote < cfg.cst.votes; ++vote)
        for (index_t a = 0; a < (cfg.n >> level); ++a) {
          index_t r = e.row_index(level, scheme, vote, e.bucket_of(level, scheme, vote, a));
          double sg = e.sign_of(level, scheme, vote, a);
          for (index_t j = a * w; j < (a + 1) * w; ++j)
            m.at(r, j) = sg * e.gaussian_of(level, scheme, j);
        }
  }
  return m;
}

/// The full measurement matrix of one trial, rows in measurement order.
/// Guarded: refuses to materialize anything above `max_entries`.
inline RealMatrix materialize_measurement_matrix(const SchemeConfig& cfg,
                                                 double max_entries = 5e7) {
  auto guard = [max_entries](index_t rows, index_t cols) {
    if (static_cast<double>(rows) * static_cast<double>(cols) > max_entries)
      throw std::invalid_argument("measurement matrix too large to materialize");
  };
  switch (cfg.scheme) {
    case SchemeId::l2l2_foreach: {
      index_t n2 = detail::next_pow2(cfg.n);
      auto scfg = hh::SketchConfig::make(n2, cfg.k, cfg.sketch, detail::sketch_seed(cfg));
      ImplicitGaussian phi{cfg.gaussian_rows(), n2, detail::phi_seed(cfg)};
      guard(scfg.total_rows + phi.rows, n2);
      RealMatrix top = materialize_sketch(hh::build_sketch(scfg));
      RealMatrix bot = phi.materialize();
      return row_direct_sum(std::vector<const RealMatrix*>{&top, &bot}).first;
    }
    case SchemeId::noiseless_foreach: {
      gt::RecursiveParams params{cfg.c_d, cfg.d_rule, detail::code_seed(cfg)};
      auto code = gt::build_recursive_matrix(cfg.n, cfg.k, params);
      ImplicitGaussian g1{code.total_rows, cfg.n, detail::mask_seed(cfg)};
      ImplicitGaussian g2{cfg.gaussian_rows(), cfg.n, detail::final_seed(cfg)};
      guard(2 * code.total_rows + g2.rows, cfg.n);
      RealMatrix masked = hadamard(code.to_binary_stacked(), g1.materialize());
      RealMatrix neg = masked;
      for (double& v : neg.entries) v = -v;
      RealMatrix tail = g2.materialize();
      return row_direct_sum(std::vector<const RealMatrix*>{&masked, &neg, &tail}).first;
    }
    case SchemeId::noiseless_forall: {
      auto a_bin = detail::build_forall_code(cfg).a;
      RealMatrix v = make_value_matrix(cfg.k, cfg.n, detail::value_seed(cfg),
                                       cfg.gaussian_value_matrix || cfg.k > 12);
      ImplicitGaussian g2{cfg.gaussian_rows(), cfg.n, detail::final_seed(cfg)};
      guard(2 * a_bin.rows * v.rows + g2.rows, cfg.n);
      RealMatrix tens = tensor_product(a_bin, v);
      RealMatrix neg = tens;
      for (double& x : neg.entries) x = -x;
      RealMatrix tail = g2.materialize();
      return row_direct_sum(std::vector<const RealMatrix*>{&tens, &neg, &tail}).first;
    }
    case SchemeId::support: {
      BinaryTestMatrix b = gt::build_kautz_singleton(cfg.n, cfg.k);
      RealMatrix v = make_value_matrix(cfg.k, cfg.n, detail::value_seed(cfg),
                                       cfg.gaussian_value_matrix || cfg.k > 12);
      guard(2 * b.rows * v.rows, cfg.n);
      RealMatrix tens = tensor_product(b, v);
      RealMatrix neg = tens;
      for (double& x : neg.entries) x = -x;
      return row_direct_sum(std::vector<const RealMatrix*>{&tens, &neg}).first;
    }
  }
  throw std::logic_error("materialize_measurement_matrix: bad scheme");
}

}  // namespace onebit::schemes
