#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "onebit/core.hpp"
#include "onebit/rng.hpp"

namespace onebit::gt {

/// Boolean OR test outcomes: outcome_i is positive iff the i-th test's
/// support intersects the defective set.
struct TestOutcomeVector {
  std::vector<std::uint8_t> positive;

  index_t size() const { return static_cast<index_t>(positive.size()); }
};

inline TestOutcomeVector outcomes_from_support(const BinaryTestMatrix& m,
                                               const std::vector<index_t>& support) {
  TestOutcomeVector out;
  out.positive.assign(static_cast<std::size_t>(m.rows), 0);
  for (index_t j : support)
    for (index_t r : m.column_supports[static_cast<std::size_t>(j)])
      out.positive[static_cast<std::size_t>(r)] = 1;
  return out;
}

/// Positive iff the measurement is nonzero: a zero dot product shows up as
/// sign(+z) = sign(-z) = +1 under the sign(0)=+1 convention.
inline TestOutcomeVector outcomes_from_sign_pairs(const SignVector& y_pos,
                                                  const SignVector& y_neg) {
  if (y_pos.size() != y_neg.size())
    throw std::invalid_argument("outcomes_from_sign_pairs: length mismatch");
  TestOutcomeVector out;
  out.positive.resize(static_cast<std::size_t>(y_pos.size()));
  for (index_t i = 0; i < y_pos.size(); ++i)
    out.positive[static_cast<std::size_t>(i)] = !(y_pos[i] == 1 && y_neg[i] == 1);
  return out;
}

/// Keep every item that appears in no negative test.
/// Cost O(sum_i |column_support(i)|).
inline std::vector<index_t> naive_decode(const BinaryTestMatrix& m,
                                         const TestOutcomeVector& outcomes) {
  if (outcomes.size() != m.rows)
    throw std::invalid_argument("naive_decode: outcome length != rows");
  std::vector<index_t> s;
  for (index_t j = 0; j < m.cols; ++j) {
    bool keep = true;
    for (index_t r : m.column_supports[static_cast<std::size_t>(j)])
      if (!outcomes.positive[static_cast<std::size_t>(r)]) {
        keep = false;
        break;
      }
    if (keep) s.push_back(j);
  }
  return s;
}

// ---- disjunctness oracles ----------------------------------------------
// Exhaustive, exponential in k; intended for small certified instances.

struct OracleBudget {
  double max_ops = 2e8;
};

namespace detail {

inline std::vector<std::vector<std::uint64_t>> column_masks(const BinaryTestMatrix& m) {
  std::size_t words = static_cast<std::size_t>((m.rows + 63) / 64);
  std::vector<std::vector<std::uint64_t>> masks(
      static_cast<std::size_t>(m.cols), std::vector<std::uint64_t>(words, 0));
  for (index_t c = 0; c < m.cols; ++c)
    for (index_t r : m.column_supports[static_cast<std::size_t>(c)])
      masks[static_cast<std::size_t>(c)][static_cast<std::size_t>(r / 64)] |=
          1ULL << (r % 64);
  return masks;
}

inline bool subset_of(const std::vector<std::uint64_t>& a,
                      const std::vector<std::uint64_t>& b) {
  for (std::size_t w = 0; w < a.size(); ++w)
    if (a[w] & ~b[w]) return false;
  return true;
}

inline bool next_combination(std::vector<index_t>& idx, index_t n) {
  index_t r = static_cast<index_t>(idx.size());
  for (index_t i = r - 1; i >= 0; --i) {
    if (idx[static_cast<std::size_t>(i)] < n - r + i) {
      ++idx[static_cast<std::size_t>(i)];
      for (index_t j = i + 1; j < r; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

inline double binomial(index_t n, index_t r) {
  double acc = 1;
  for (index_t i = 0; i < r; ++i) acc *= static_cast<double>(n - i) / (i + 1);
  return acc;
}

// Shared core: count, for every column set S of size s, how many columns
// outside S are covered by union(S); report whether some S covers >= need.
inline bool exists_covering_set(const BinaryTestMatrix& m, index_t s, index_t need,
                                const OracleBudget& budget) {
  index_t n = m.cols;
  if (s < 0 || need < 1 || need > n - s) return false;
  std::size_t words = static_cast<std::size_t>((m.rows + 63) / 64);
  double ops = binomial(n, s) * static_cast<double>(n) * static_cast<double>(words);
  if (ops > budget.max_ops)
    throw std::runtime_error("disjunctness oracle: instance exceeds configured budget");
  auto masks = column_masks(m);
  if (s == 0) {
    std::vector<std::uint64_t> empty(words, 0);
    index_t covered = 0;
    for (index_t c = 0; c < n; ++c)
      if (subset_of(masks[static_cast<std::size_t>(c)], empty)) ++covered;
    return covered >= need;
  }
  std::vector<index_t> idx(static_cast<std::size_t>(s));
  for (index_t i = 0; i < s; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::vector<std::uint64_t> uni(words);
  do {
    std::fill(uni.begin(), uni.end(), 0);
    for (index_t c : idx)
      for (std::size_t w = 0; w < words; ++w)
        uni[w] |= masks[static_cast<std::size_t>(c)][w];
    index_t covered = 0;
    for (index_t c = 0; c < n; ++c) {
      bool in_s = false;
      for (index_t sc : idx)
        if (sc == c) {
          in_s = true;
          break;
        }
      if (in_s) continue;
      if (subset_of(masks[static_cast<std::size_t>(c)], uni)) {
        ++covered;
        if (covered >= need) return true;
      }
    }
  } while (next_combination(idx, n));
  return false;
}

}  // namespace detail

/// True iff no column's support is covered by the union of any k others.
inline bool is_disjunct(const BinaryTestMatrix& m, index_t k,
                        const OracleBudget& budget = {}) {
  if (k < 1) throw std::invalid_argument("is_disjunct: k >= 1 required");
  index_t s = std::min(k, m.cols - 1);
  if (s < 1) return true;  // single column, nothing to cover it with
  return !detail::exists_covering_set(m, s, 1, budget);
}

/// True iff naive decoding on any support of size <= k returns at most l
/// extra items: no disjoint (S, T) with |S| <= k, |T| = l has every column
/// of T covered by union(S).
inline bool is_list_disjunct(const BinaryTestMatrix& m, index_t k, index_t l,
                             const OracleBudget& budget = {}) {
  if (k < 1 || l < 1)
    throw std::invalid_argument("is_list_disjunct: k, l >= 1 required");
  index_t s = std::min(k, m.cols - l);
  if (s < 0) return true;  // no disjoint pair of the required sizes exists
  return !detail::exists_covering_set(m, s, l, budget);
}

// ---- random concatenated code ------------------------------------------

enum class DRule { proof_consistent, paper_stated };

/// Outer code length for the random concatenated construction. The default
/// follows the union-bound exponent (k log k + log log_k n, scaled by c_d);
/// the alternative rule drops the k factor on the log k term.
inline int concat_code_degree(index_t k, index_t n, double c_d = 5.0,
                              DRule rule = DRule::proof_consistent) {
  double kk = static_cast<double>(std::max<index_t>(k, 2));
  double lkn = std::max(std::log(static_cast<double>(std::max<index_t>(n, 2))) /
                            std::log(kk),
                        1.0);
  double term2 = std::log2(std::max(lkn, 2.0));
  if (rule == DRule::proof_consistent)
    return static_cast<int>(
        std::ceil(c_d * (static_cast<double>(k) * std::log2(kk) + term2)));
  int d = static_cast<int>(std::ceil(5.0 * std::log2(kk))) +
          static_cast<int>(std::ceil(term2 / static_cast<double>(k)));
  return std::max(d, 1);
}

/// Degree for a single-level code meant to be (k,k)-list-disjunct over the
/// whole universe simultaneously (union bound over all column-set pairs).
inline int forall_code_degree(index_t k, index_t n) {
  return static_cast<int>(std::ceil(static_cast<double>(k) *
                                    std::log2(static_cast<double>(std::max<index_t>(n, 2))))) +
         8;
}

/// Identity inner code concatenated with a random outer code: d blocks of
/// q = 4k rows; column j has a single 1 per block at a seed-determined row.
/// Symbols are computed on demand, so nothing is materialized.
struct ConcatCodeMatrix {
  index_t m_cols = 0;
  index_t k = 1;
  int q = 4;
  int d = 1;
  std::uint64_t rng_seed = 0;

  index_t rows() const { return static_cast<index_t>(q) * d; }

  int symbol(index_t col, int block) const {
    return static_cast<int>(rng::uniform_below(
        rng_seed, static_cast<std::uint64_t>(col) * static_cast<std::uint64_t>(d) + block,
        static_cast<std::uint64_t>(q)));
  }

  index_t row_of(int block, int sym) const {
    return static_cast<index_t>(block) * q + sym;
  }

  void tests_of(index_t col, std::vector<index_t>& out) const {
    out.clear();
    for (int b = 0; b < d; ++b) out.push_back(row_of(b, symbol(col, b)));
  }

  std::vector<int> codeword(index_t col) const {
    std::vector<int> w(static_cast<std::size_t>(d));
    for (int b = 0; b < d; ++b) w[static_cast<std::size_t>(b)] = symbol(col, b);
    return w;
  }

  BinaryTestMatrix to_binary() const {
    std::vector<std::vector<index_t>> col_sup(static_cast<std::size_t>(m_cols));
    for (index_t c = 0; c < m_cols; ++c)
      for (int b = 0; b < d; ++b)
        col_sup[static_cast<std::size_t>(c)].push_back(row_of(b, symbol(c, b)));
    return BinaryTestMatrix::from_column_supports(rows(), m_cols, std::move(col_sup));
  }
};

inline ConcatCodeMatrix build_concat_matrix(index_t m_cols, index_t k, int d,
                                            std::uint64_t seed) {
  if (k < 1 || d < 1 || m_cols < 1)
    throw std::invalid_argument("build_concat_matrix: bad parameters");
  ConcatCodeMatrix m;
  m.m_cols = m_cols;
  m.k = k;
  m.q = static_cast<int>(4 * k);
  m.d = d;
  m.rng_seed = seed;
  return m;
}

// ---- recursive two-stage matrix ------------------------------------------

struct RecursiveParams {
  double c_d = 5.0;
  DRule rule = DRule::proof_consistent;
  std::uint64_t seed = 1;
};

struct RecursiveNode {
  index_t universe = 0;       // columns of this node's code
  index_t sqrt_universe = 0;  // 0 at leaves
  int child_r = -1;           // decodes the high digits
  int child_c = -1;           // decodes the low digits
  index_t divisor = 1;        // node column of global j = (j / divisor) % universe
  ConcatCodeMatrix code;
  index_t row_offset = 0;  // into the stacked test matrix
};

/// Recursion tree of concatenated codes: each level splits the index into
/// high/low halves, the node's own code filters the candidate pairs proposed
/// by its children. Codes are implicit; total_rows counts the stacked tests.
struct RecursiveGTMatrix {
  index_t n = 0;         // real universe; larger padded indices act as negatives
  index_t padded_n = 0;  // k_eff^(2^T) >= n, or n itself in the single-leaf case
  index_t k = 1;
  int degree = 1;
  std::vector<RecursiveNode> nodes;  // preorder: node, high subtree, low subtree
  index_t total_rows = 0;

  index_t column_in_node(std::size_t node, index_t j) const {
    const RecursiveNode& nd = nodes[node];
    return (j / nd.divisor) % nd.universe;
  }

  std::vector<TestOutcomeVector> outcomes_from_support(
      const std::vector<index_t>& support) const {
    std::vector<TestOutcomeVector> out(nodes.size());
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      out[v].positive.assign(static_cast<std::size_t>(nodes[v].code.rows()), 0);
      for (index_t j : support) {
        index_t c = column_in_node(v, j);
        for (int b = 0; b < nodes[v].code.d; ++b)
          out[v].positive[static_cast<std::size_t>(
              nodes[v].code.row_of(b, nodes[v].code.symbol(c, b)))] = 1;
      }
    }
    return out;
  }

  /// Stacked 0/1 matrix over the real n columns (desk scale only).
  BinaryTestMatrix to_binary_stacked() const {
    std::vector<std::vector<index_t>> col_sup(static_cast<std::size_t>(n));
    for (index_t j = 0; j < n; ++j)
      for (std::size_t v = 0; v < nodes.size(); ++v) {
        index_t c = column_in_node(v, j);
        for (int b = 0; b < nodes[v].code.d; ++b)
          col_sup[static_cast<std::size_t>(j)].push_back(
              nodes[v].row_offset + nodes[v].code.row_of(b, nodes[v].code.symbol(c, b)));
      }
    return BinaryTestMatrix::from_column_supports(total_rows, n, std::move(col_sup));
  }
};

namespace detail {

inline index_t isqrt_exact(index_t m) {
  auto r = static_cast<index_t>(std::llround(std::sqrt(static_cast<double>(m))));
  while (r * r > m) --r;
  while ((r + 1) * (r + 1) <= m) ++r;
  if (r * r != m) throw std::logic_error("recursive universe is not a perfect square");
  return r;
}

inline int build_recursive_nodes(RecursiveGTMatrix& out, index_t universe,
                                 index_t divisor, index_t k_eff,
                                 std::uint64_t seed) {
  int idx = static_cast<int>(out.nodes.size());
  out.nodes.emplace_back();
  {
    RecursiveNode& nd = out.nodes.back();
    nd.universe = universe;
    nd.divisor = divisor;
    nd.code = build_concat_matrix(universe, out.k, out.degree,
                                  rng::derive(seed, 0x6E6F6465ULL, out.nodes.size()));
    nd.row_offset = out.total_rows;
  }
  out.total_rows += out.nodes[static_cast<std::size_t>(idx)].code.rows();
  if (universe > k_eff * k_eff) {
    index_t s = isqrt_exact(universe);
    out.nodes[static_cast<std::size_t>(idx)].sqrt_universe = s;
    int r = build_recursive_nodes(out, s, divisor * s, k_eff, seed);
    out.nodes[static_cast<std::size_t>(idx)].child_r = r;
    int c = build_recursive_nodes(out, s, divisor, k_eff, seed);
    out.nodes[static_cast<std::size_t>(idx)].child_c = c;
  }
  return idx;
}

}  // namespace detail

inline RecursiveGTMatrix build_recursive_matrix(index_t n, index_t k,
                                                const RecursiveParams& params = {}) {
  if (n < 2 || k < 1) throw std::invalid_argument("build_recursive_matrix: bad n or k");
  RecursiveGTMatrix out;
  out.n = n;
  out.k = k;
  index_t k_eff = std::max<index_t>(k, 2);
  index_t padded = n;
  if (n > k_eff * k_eff) {
    padded = k_eff * k_eff;
    while (padded < n) {
      if (padded > (index_t{1} << 31))
        throw std::invalid_argument("build_recursive_matrix: universe too large");
      padded *= padded;
    }
  }
  out.padded_n = padded;
  out.degree = concat_code_degree(k, padded, params.c_d, params.rule);
  detail::build_recursive_nodes(out, padded, 1, k_eff, params.seed);
  return out;
}

struct RecursiveDecodeResult {
  std::vector<index_t> items;
  std::uint64_t membership_checks = 0;  // candidate-column test evaluations
};

namespace detail {

inline bool column_all_positive(const ConcatCodeMatrix& code, index_t col,
                                const TestOutcomeVector& outcomes) {
  for (int b = 0; b < code.d; ++b)
    if (!outcomes.positive[static_cast<std::size_t>(code.row_of(b, code.symbol(col, b)))])
      return false;
  return true;
}

inline std::vector<index_t> recursive_decode_node(
    const RecursiveGTMatrix& a, std::size_t v,
    const std::vector<TestOutcomeVector>& outcomes, std::uint64_t& checks) {
  const RecursiveNode& nd = a.nodes[v];
  std::vector<index_t> result;
  if (nd.child_r < 0) {
    for (index_t c = 0; c < nd.universe; ++c) {
      ++checks;
      if (column_all_positive(nd.code, c, outcomes[v])) result.push_back(c);
    }
    return result;
  }
  auto hi = recursive_decode_node(a, static_cast<std::size_t>(nd.child_r), outcomes, checks);
  auto lo = recursive_decode_node(a, static_cast<std::size_t>(nd.child_c), outcomes, checks);
  for (index_t h : hi)
    for (index_t l : lo) {
      index_t c = h * nd.sqrt_universe + l;
      ++checks;
      if (column_all_positive(nd.code, c, outcomes[v])) result.push_back(c);
    }
  return result;
}

}  // namespace detail

/// Bottom-up decode over the recursion tree; never inspects more than
/// 4k^2 candidates per internal node. Items >= n (padding) are dropped.
inline RecursiveDecodeResult recursive_decode(
    const RecursiveGTMatrix& a, const std::vector<TestOutcomeVector>& outcomes) {
  if (outcomes.size() != a.nodes.size())
    throw std::invalid_argument("recursive_decode: outcomes for every node required");
  for (std::size_t v = 0; v < a.nodes.size(); ++v)
    if (outcomes[v].size() != a.nodes[v].code.rows())
      throw std::invalid_argument("recursive_decode: outcome length mismatch");
  RecursiveDecodeResult res;
  auto items = detail::recursive_decode_node(a, 0, outcomes, res.membership_checks);
  for (index_t j : items)
    if (j < a.n) res.items.push_back(j);
  std::sort(res.items.begin(), res.items.end());
  return res;
}

/// Contrast baseline: test every real column against every node's outcomes.
/// Same output as recursive_decode, linear cost in n.
inline RecursiveDecodeResult full_scan_decode(
    const RecursiveGTMatrix& a, const std::vector<TestOutcomeVector>& outcomes) {
  RecursiveDecodeResult res;
  for (index_t j = 0; j < a.n; ++j) {
    ++res.membership_checks;
    bool keep = true;
    for (std::size_t v = 0; v < a.nodes.size() && keep; ++v)
      keep = detail::column_all_positive(a.nodes[v].code, a.column_in_node(v, j),
                                         outcomes[v]);
    if (keep) res.items.push_back(j);
  }
  return res;
}

// ---- Kautz-Singleton construction -----------------------------------------

namespace detail {

inline bool is_prime(index_t x) {
  if (x < 2) return false;
  for (index_t p = 2; p * p <= x; ++p)
    if (x % p == 0) return false;
  return true;
}

inline int outer_length_for(index_t q, index_t n) {
  int len = 1;
  index_t reach = q;
  while (reach < n) {
    reach *= q;
    ++len;
    if (len > 62) throw std::invalid_argument("kautz_singleton: n too large");
  }
  return len;  // smallest L with q^L >= n
}

}  // namespace detail

/// Smallest prime q admitting a k-disjunct Reed-Solomon/identity
/// concatenation for n columns: q >= k*(L-1)+1 with L = ceil(log_q n).
inline index_t kautz_singleton_field_size(index_t n, index_t k) {
  for (index_t q = 2;; ++q) {
    if (!detail::is_prime(q)) continue;
    int len = detail::outer_length_for(q, n);
    if (q >= k * (len - 1) + 1) return q;
  }
}

/// Reed-Solomon outer code (degree < L polynomials over F_q, evaluated at all
/// q points) concatenated with the identity inner code. q^2 rows, column
/// weight q; k-disjunct whenever q >= k*(L-1)+1, which the automatic field
/// size guarantees. A forced q must be prime; disjunctness is then up to the
/// caller to verify.
inline BinaryTestMatrix build_kautz_singleton(index_t n, index_t k, index_t forced_q = 0) {
  if (n < 2 || k < 1) throw std::invalid_argument("build_kautz_singleton: bad n or k");
  index_t q = forced_q == 0 ? kautz_singleton_field_size(n, k) : forced_q;
  if (!detail::is_prime(q))
    throw std::invalid_argument("build_kautz_singleton: q must be prime");
  int len = detail::outer_length_for(q, n);
  std::vector<std::vector<index_t>> col_sup(static_cast<std::size_t>(n));
  std::vector<index_t> coeff(static_cast<std::size_t>(len));
  for (index_t j = 0; j < n; ++j) {
    index_t rem = j;
    for (int t = 0; t < len; ++t) {
      coeff[static_cast<std::size_t>(t)] = rem % q;
      rem /= q;
    }
    for (index_t e = 0; e < q; ++e) {
      index_t val = 0;
      for (int t = len - 1; t >= 0; --t)
        val = (val * e + coeff[static_cast<std::size_t>(t)]) % q;
      col_sup[static_cast<std::size_t>(j)].push_back(e * q + val);
    }
  }
  return BinaryTestMatrix::from_column_supports(q * q, n, std::move(col_sup));
}

// ---- modified decoding (tensored sign measurements) -----------------------

/// Decode from sign((a (x) v) x) and sign(-(a (x) v) x): a test of `a` reads
/// as zero iff all v.rows tensored measurements have both paired bits +1;
/// items hitting a zero test are excluded, everything else is returned.
inline std::vector<index_t> modified_decode(const BinaryTestMatrix& a,
                                            const RealMatrix& v,
                                            const SignVector& y_pos,
                                            const SignVector& y_neg) {
  if (v.cols != a.cols) throw std::invalid_argument("modified_decode: column mismatch");
  index_t rows = a.rows * v.rows;
  if (y_pos.size() != rows || y_neg.size() != rows)
    throw std::invalid_argument("modified_decode: sign vector length mismatch");
  std::vector<std::uint8_t> test_is_zero(static_cast<std::size_t>(a.rows), 1);
  for (index_t j = 0; j < a.rows; ++j)
    for (index_t m = 0; m < v.rows; ++m) {
      index_t r = j * v.rows + m;
      if (!(y_pos[r] == 1 && y_neg[r] == 1)) {
        test_is_zero[static_cast<std::size_t>(j)] = 0;
        break;
      }
    }
  std::vector<index_t> s;
  for (index_t i = 0; i < a.cols; ++i) {
    bool belongs = true;
    for (index_t j : a.column_supports[static_cast<std::size_t>(i)])
      if (test_is_zero[static_cast<std::size_t>(j)]) {
        belongs = false;
        break;
      }
    if (belongs) s.push_back(i);
  }
  return s;
}

}  // namespace onebit::gt
