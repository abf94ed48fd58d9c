#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <vector>

#include "onebit/core.hpp"
#include "onebit/group_testing.hpp"
#include "onebit/rng.hpp"

using namespace onebit;

namespace {

BinaryTestMatrix identity(index_t n) {
  std::vector<std::vector<index_t>> rows(static_cast<std::size_t>(n));
  for (index_t i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = {i};
  return BinaryTestMatrix::from_row_supports(n, n, std::move(rows));
}

BinaryTestMatrix bernoulli(index_t rows, index_t cols, double p, std::uint64_t seed) {
  std::vector<std::vector<index_t>> row_sup(static_cast<std::size_t>(rows));
  for (index_t r = 0; r < rows; ++r)
    for (index_t c = 0; c < cols; ++c)
      if (rng::uniform01(seed, static_cast<std::uint64_t>(r * cols + c)) < p)
        row_sup[static_cast<std::size_t>(r)].push_back(c);
  return BinaryTestMatrix::from_row_supports(rows, cols, std::move(row_sup));
}

BinaryTestMatrix restrict_columns(const BinaryTestMatrix& m,
                                  const std::vector<index_t>& cols) {
  std::vector<std::vector<index_t>> col_sup;
  for (index_t c : cols) col_sup.push_back(m.column_supports[static_cast<std::size_t>(c)]);
  return BinaryTestMatrix::from_column_supports(m.rows, static_cast<index_t>(cols.size()),
                                                std::move(col_sup));
}

void for_each_subset(index_t n, index_t size,
                     const std::function<void(const std::vector<index_t>&)>& fn) {
  if (size == 0) {
    fn({});
    return;
  }
  std::vector<index_t> idx(static_cast<std::size_t>(size));
  for (index_t i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
  do {
    fn(idx);
  } while (gt::detail::next_combination(idx, n));
}

// definition-level enumerators, independent of the library's bitset route
bool literal_is_disjunct(const BinaryTestMatrix& m, index_t k) {
  bool ok = true;
  for (index_t s = 1; s <= std::min(k, m.cols - 1) && ok; ++s)
    for_each_subset(m.cols, s, [&](const std::vector<index_t>& sset) {
      for (index_t j = 0; j < m.cols && ok; ++j) {
        if (std::find(sset.begin(), sset.end(), j) != sset.end()) continue;
        bool separated = false;
        for (index_t r = 0; r < m.rows && !separated; ++r) {
          if (!m.entry(r, j)) continue;
          bool hits_s = false;
          for (index_t c : sset) hits_s = hits_s || m.entry(r, c);
          separated = !hits_s;
        }
        if (!separated) ok = false;
      }
    });
  return ok;
}

bool literal_is_list_disjunct(const BinaryTestMatrix& m, index_t k, index_t l) {
  bool ok = true;
  for (index_t s = 0; s <= std::min(k, m.cols - l) && ok; ++s)
    for_each_subset(m.cols, s, [&](const std::vector<index_t>& sset) {
      // T ranges over size-l subsets of the complement
      std::vector<index_t> rest;
      for (index_t c = 0; c < m.cols; ++c)
        if (std::find(sset.begin(), sset.end(), c) == sset.end()) rest.push_back(c);
      for_each_subset(static_cast<index_t>(rest.size()), l,
                      [&](const std::vector<index_t>& pick) {
                        if (!ok) return;
                        bool found = false;
                        for (index_t r = 0; r < m.rows && !found; ++r) {
                          bool hits_s = false;
                          for (index_t c : sset) hits_s = hits_s || m.entry(r, c);
                          if (hits_s) continue;
                          for (index_t pi : pick)
                            if (m.entry(r, rest[static_cast<std::size_t>(pi)])) found = true;
                        }
                        if (!found) ok = false;
                      });
    });
  return ok;
}

}  // namespace

TEST_CASE("naive decoding on tiny instances") {
  auto eye = identity(3);
  gt::TestOutcomeVector o;
  o.positive = {0, 1, 0};
  CHECK(gt::naive_decode(eye, o) == std::vector<index_t>{1});

  auto allones = BinaryTestMatrix::from_row_supports(1, 5, {{0, 1, 2, 3, 4}});
  gt::TestOutcomeVector pos;
  pos.positive = {1};
  CHECK(gt::naive_decode(allones, pos) == std::vector<index_t>{0, 1, 2, 3, 4});

  gt::TestOutcomeVector bad;
  bad.positive = {1, 0};
  CHECK_THROWS_AS(gt::naive_decode(eye, bad), std::invalid_argument);
}

TEST_CASE("a verified 1-disjunct random matrix decodes every singleton exactly") {
  BinaryTestMatrix m;
  bool found = false;
  for (std::uint64_t seed = 0; seed < 60000 && !found; ++seed) {
    m = bernoulli(10, 12, 0.5, seed);
    found = gt::is_disjunct(m, 1);
  }
  REQUIRE(found);
  for (index_t j = 0; j < m.cols; ++j) {
    auto s = gt::naive_decode(m, gt::outcomes_from_support(m, {j}));
    CHECK(s == std::vector<index_t>{j});
  }
}

TEST_CASE("is_disjunct on canonical cases") {
  auto eye = identity(5);
  for (index_t k = 1; k <= 4; ++k) CHECK(gt::is_disjunct(eye, k));
  auto allones = BinaryTestMatrix::from_row_supports(1, 4, {{0, 1, 2, 3}});
  CHECK_FALSE(gt::is_disjunct(allones, 1));
  CHECK_THROWS_AS(gt::is_disjunct(eye, 0), std::invalid_argument);

  // the exhaustive oracle refuses instances beyond its budget
  auto big = bernoulli(30, 60, 0.3, 1);
  gt::OracleBudget tiny{100.0};
  CHECK_THROWS_AS(gt::is_disjunct(big, 3, tiny), std::runtime_error);
  CHECK_THROWS_AS(gt::is_list_disjunct(big, 3, 3, tiny), std::runtime_error);
}

TEST_CASE("oracles agree with definition-level enumeration") {
  auto ks = gt::build_kautz_singleton(12, 2, 3);  // forced small field
  CHECK(gt::is_disjunct(ks, 2) == literal_is_disjunct(ks, 2));
  CHECK(gt::is_list_disjunct(ks, 2, 2) == literal_is_list_disjunct(ks, 2, 2));

  for (std::uint64_t seed : {2ull, 5ull, 9ull}) {
    auto m = bernoulli(14, 10, 1.0 / 3.0, seed);
    for (index_t k = 1; k <= 2; ++k)
      CHECK(gt::is_disjunct(m, k) == literal_is_disjunct(m, k));
    CHECK(gt::is_list_disjunct(m, 1, 1) == literal_is_list_disjunct(m, 1, 1));
    CHECK(gt::is_list_disjunct(m, 2, 2) == literal_is_list_disjunct(m, 2, 2));
  }
}

TEST_CASE("list-disjunctness basics") {
  auto eye = identity(4);
  for (index_t k = 1; k <= 3; ++k)
    for (index_t l = 1; l <= 3; ++l) CHECK(gt::is_list_disjunct(eye, k, l));

  auto zeros = BinaryTestMatrix::from_row_supports(4, 6, {{}, {}, {}, {}});
  for (index_t k = 1; k <= 3; ++k)
    for (index_t l = 1; l <= 3; ++l) CHECK_FALSE(gt::is_list_disjunct(zeros, k, l));

  auto m = bernoulli(20, 16, 1.0 / 3.0, 17);
  CHECK(gt::is_list_disjunct(m, 2, 2) == literal_is_list_disjunct(m, 2, 2));
}

TEST_CASE("lemma 1: disjunct matrices decode every small support exactly") {
  std::vector<BinaryTestMatrix> mats{identity(6), gt::build_kautz_singleton(14, 2)};
  for (auto& m : mats) {
    REQUIRE(gt::is_disjunct(m, 2));
    for (index_t s = 0; s <= 2; ++s)
      for_each_subset(m.cols, s, [&](const std::vector<index_t>& supp) {
        std::vector<index_t> sv(supp.begin(), supp.end());
        auto out = gt::naive_decode(m, gt::outcomes_from_support(m, sv));
        CHECK(out == sv);
      });
  }
}

TEST_CASE("lemma 2: list-disjunct matrices decode small supports to short lists") {
  BinaryTestMatrix m;
  bool found = false;
  for (std::uint64_t seed = 0; seed < 100 && !found; ++seed) {
    m = bernoulli(18, 12, 1.0 / 3.0, seed);
    found = gt::is_list_disjunct(m, 2, 2);
  }
  REQUIRE(found);
  for (index_t s = 0; s <= 2; ++s)
    for_each_subset(m.cols, s, [&](const std::vector<index_t>& supp) {
      std::vector<index_t> sv(supp.begin(), supp.end());
      auto out = gt::naive_decode(m, gt::outcomes_from_support(m, sv));
      CHECK(std::includes(out.begin(), out.end(), sv.begin(), sv.end()));
      CHECK(static_cast<index_t>(out.size()) <= static_cast<index_t>(sv.size()) + 2);
    });
}

TEST_CASE("outer code length rules") {
  // default rule carries the k factor on the log k term; the alternative drops it
  int d_proof = gt::concat_code_degree(3, 6561);
  int d_paper = gt::concat_code_degree(3, 6561, 5.0, gt::DRule::paper_stated);
  CHECK(d_proof == 39);
  CHECK(d_paper < d_proof);
  CHECK(d_paper >= 1);
  CHECK(gt::concat_code_degree(1, 65536) >= 1);  // k=1 stays well defined
  // for-all rule grows with k log n
  CHECK(gt::forall_code_degree(2, 64) == 20);
}

TEST_CASE("concat code structure") {
  auto c = gt::build_concat_matrix(3, 1, 2, 5);
  CHECK(c.q == 4);
  CHECK(c.rows() == 8);
  auto bin = c.to_binary();
  CHECK(bin.rows == 8);
  CHECK(bin.cols == 3);
  for (index_t j = 0; j < 3; ++j) {
    const auto& sup = bin.column_supports[static_cast<std::size_t>(j)];
    REQUIRE(sup.size() == 2);          // column weight d
    CHECK(sup[0] < 4);                 // one per 4-row block
    CHECK(sup[1] >= 4);
    CHECK(sup[1] < 8);
  }
  CHECK_THROWS_AS(gt::build_concat_matrix(3, 0, 2, 5), std::invalid_argument);
}

TEST_CASE("random 16-column restrictions of the concat code are usually (2,2)-list-disjunct") {
  int good = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    auto code = gt::build_concat_matrix(64, 2, 12, 1000 + s);
    auto bin = code.to_binary();
    std::vector<index_t> cols;
    std::uint64_t pick_key = rng::derive(99, s), ctr = 0;
    while (cols.size() < 16) {
      auto c = static_cast<index_t>(rng::uniform_below(pick_key, ctr++, 64));
      if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
    }
    if (gt::is_list_disjunct(restrict_columns(bin, cols), 2, 2)) ++good;
  }
  CHECK(good >= 180);  // >= 0.9 of seeds
}

TEST_CASE("recursive matrix shapes") {
  auto base = gt::build_recursive_matrix(9, 3, {5.0, gt::DRule::proof_consistent, 1});
  CHECK(base.nodes.size() == 1);  // n = k^2 is the recursion floor
  CHECK(base.padded_n == 9);
  CHECK(base.total_rows == base.nodes[0].code.rows());

  auto two = gt::build_recursive_matrix(81, 3, {5.0, gt::DRule::proof_consistent, 1});
  CHECK(two.nodes.size() == 3);  // root + two leaves
  CHECK(two.total_rows == 3 * two.nodes[0].code.rows());
  // high/low digit maps
  CHECK(two.column_in_node(0, 47) == 47);
  auto r_child = static_cast<std::size_t>(two.nodes[0].child_r);
  auto c_child = static_cast<std::size_t>(two.nodes[0].child_c);
  CHECK(two.column_in_node(r_child, 47) == 47 / 9);
  CHECK(two.column_in_node(c_child, 47) == 47 % 9);

  auto big = gt::build_recursive_matrix(65536, 4, {5.0, gt::DRule::proof_consistent, 1});
  CHECK(big.nodes.size() == 7);
  int d = gt::concat_code_degree(4, 65536);
  CHECK(d == 55);
  CHECK(big.total_rows == 7 * 16 * d);
  // measurement budget: ratio to k*log2(n) is ~96 for the default rule
  CHECK(big.total_rows <= 2 * 97 * 4 * 16);

  auto degenerate = gt::build_recursive_matrix(7, 3, {5.0, gt::DRule::proof_consistent, 1});
  CHECK(degenerate.nodes.size() == 1);
  CHECK(degenerate.nodes[0].universe == 7);
}

TEST_CASE("recursive decode: no defectives, base case, and small equivalences") {
  auto m = gt::build_recursive_matrix(81, 3, {5.0, gt::DRule::proof_consistent, 3});
  auto empty = gt::recursive_decode(m, m.outcomes_from_support({}));
  CHECK(empty.items.empty());

  auto base = gt::build_recursive_matrix(9, 3, {5.0, gt::DRule::proof_consistent, 4});
  std::vector<index_t> supp{1, 4, 7};
  auto out = gt::recursive_decode(base, base.outcomes_from_support(supp));
  auto naive = gt::naive_decode(base.nodes[0].code.to_binary(),
                                gt::outcomes_from_support(base.nodes[0].code.to_binary(), supp));
  CHECK(out.items == naive);

  // recursive and full-scan decoders agree on random supports
  for (std::uint64_t t = 0; t < 25; ++t) {
    std::vector<index_t> s;
    std::uint64_t key = rng::derive(777, t), ctr = 0;
    while (s.size() < 3) {
      auto c = static_cast<index_t>(rng::uniform_below(key, ctr++, 81));
      if (std::find(s.begin(), s.end(), c) == s.end()) s.push_back(c);
    }
    std::sort(s.begin(), s.end());
    auto oc = m.outcomes_from_support(s);
    auto rec = gt::recursive_decode(m, oc);
    auto scan = gt::full_scan_decode(m, oc);
    CHECK(rec.items == scan.items);
    CHECK(std::includes(rec.items.begin(), rec.items.end(), s.begin(), s.end()));
  }
}

TEST_CASE("recursive decode at n=6561 stays within list and candidate budgets") {
  auto m = gt::build_recursive_matrix(6561, 3, {5.0, gt::DRule::proof_consistent, 11});
  CHECK(m.nodes.size() == 7);
  int ok = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    std::vector<index_t> s;
    std::uint64_t key = rng::derive(31337, t), ctr = 0;
    while (s.size() < 3) {
      auto c = static_cast<index_t>(rng::uniform_below(key, ctr++, 6561));
      if (std::find(s.begin(), s.end(), c) == s.end()) s.push_back(c);
    }
    std::sort(s.begin(), s.end());
    auto res = gt::recursive_decode(m, m.outcomes_from_support(s));
    CHECK(res.membership_checks <= 7 * 4 * 3 * 3);
    bool superset = std::includes(res.items.begin(), res.items.end(), s.begin(), s.end());
    if (superset && static_cast<index_t>(res.items.size()) <= 6) ++ok;
  }
  CHECK(ok >= 48);
}

TEST_CASE("kautz-singleton construction") {
  auto b1 = gt::build_kautz_singleton(64, 1);
  CHECK(gt::is_disjunct(b1, 1));
  index_t q = gt::kautz_singleton_field_size(64, 1);
  CHECK(b1.rows == q * q);
  for (auto& sup : b1.column_supports) CHECK(static_cast<index_t>(sup.size()) == q);

  auto b2 = gt::build_kautz_singleton(27, 2, 7);
  CHECK(gt::is_disjunct(b2, 2));
  CHECK(b2.rows == 49);

  auto b3 = gt::build_kautz_singleton(27, 2);  // automatic field size
  CHECK(gt::is_disjunct(b3, 2));

  CHECK_THROWS_AS(gt::build_kautz_singleton(27, 2, 6), std::invalid_argument);  // q not prime
}

TEST_CASE("modified decode zero-detection") {
  using schemesig = std::vector<double>;
  auto encode_pair = [](const BinaryTestMatrix& a, const RealMatrix& v,
                        const schemesig& x) {
    auto tens = tensor_product(a, v);
    SparseSignal xs(static_cast<index_t>(x.size()), x,
                    std::max<index_t>(1, static_cast<index_t>(x.size()) / 2));
    SignVector y_pos = sign_encode(tens, xs);
    RealMatrix neg = tens;
    for (double& e : neg.entries) e = -e;
    SignVector y_neg = sign_encode(neg, xs);
    return std::pair{y_pos, y_neg};
  };

  // no defectives: every test reads zero, everything is excluded
  auto b = gt::build_kautz_singleton(8, 1);
  RealMatrix v1(1, 8, std::vector<double>(8, 1.0));
  auto [zp, zn] = encode_pair(b, v1, schemesig(8, 0.0));
  CHECK(gt::modified_decode(b, v1, zp, zn).empty());

  // k=1 reduces to classic group testing
  for (index_t j = 0; j < 8; ++j) {
    schemesig x(8, 0.0);
    x[static_cast<std::size_t>(j)] = j % 2 ? -1.7 : 0.4;
    auto [yp, yn] = encode_pair(b, v1, x);
    CHECK(gt::modified_decode(b, v1, yp, yn) == std::vector<index_t>{j});
  }

  // k=2 with Vandermonde rows: exact support recovery, including signals
  // engineered to zero out the first tensored row
  auto b2 = gt::build_kautz_singleton(32, 2);
  REQUIRE(gt::is_disjunct(b2, 2));
  RealMatrix v2(2, 32);
  for (index_t j = 0; j < 32; ++j) {
    double node = 1.0 + rng::uniform01(404, static_cast<std::uint64_t>(j));
    v2.at(0, j) = 1.0;
    v2.at(1, j) = node;
  }
  for (std::uint64_t t = 0; t < 100; ++t) {
    std::uint64_t key = rng::derive(606, t);
    index_t i = static_cast<index_t>(rng::uniform_below(key, 0, 32));
    index_t j = static_cast<index_t>(rng::uniform_below(key, 1, 32));
    if (i == j) j = (j + 1) % 32;
    schemesig x(32, 0.0);
    if (t % 4 == 0) {
      // exact cancellation against the all-ones row
      x[static_cast<std::size_t>(i)] = 0.5;
      x[static_cast<std::size_t>(j)] = -0.5;
    } else {
      x[static_cast<std::size_t>(i)] = rng::gaussian(key, 2) + 2.0;
      x[static_cast<std::size_t>(j)] = rng::gaussian(key, 3) - 2.0;
    }
    auto [yp, yn] = encode_pair(b2, v2, x);
    std::vector<index_t> expect{std::min(i, j), std::max(i, j)};
    CHECK(gt::modified_decode(b2, v2, yp, yn) == expect);
  }
}

TEST_CASE("sign pairs convert to boolean outcomes") {
  SignVector yp, yn;
  yp.bits = {1, 1, -1, 1};
  yn.bits = {1, -1, 1, -1};
  auto o = gt::outcomes_from_sign_pairs(yp, yn);
  CHECK(o.positive == std::vector<std::uint8_t>{0, 1, 1, 1});
  SignVector bad;
  bad.bits = {1};
  CHECK_THROWS_AS(gt::outcomes_from_sign_pairs(yp, bad), std::invalid_argument);
}
