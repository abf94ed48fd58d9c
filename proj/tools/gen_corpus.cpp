// Regenerates the certified-matrix corpus under tests/corpus: small binary
// matrices together with oracle-computed disjunctness verdicts, used as
// regression inputs by the acceptance suite.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "onebit/core.hpp"
#include "onebit/group_testing.hpp"
#include "onebit/rng.hpp"

using namespace onebit;

static BinaryTestMatrix identity(index_t n) {
  std::vector<std::vector<index_t>> rows(static_cast<std::size_t>(n));
  for (index_t i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = {i};
  return BinaryTestMatrix::from_row_supports(n, n, std::move(rows));
}

static BinaryTestMatrix bernoulli(index_t rows, index_t cols, double p,
                                  std::uint64_t seed) {
  std::vector<std::vector<index_t>> row_sup(static_cast<std::size_t>(rows));
  for (index_t r = 0; r < rows; ++r)
    for (index_t c = 0; c < cols; ++c)
      if (rng::uniform01(seed, static_cast<std::uint64_t>(r * cols + c)) < p)
        row_sup[static_cast<std::size_t>(r)].push_back(c);
  return BinaryTestMatrix::from_row_supports(rows, cols, std::move(row_sup));
}

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "tests/corpus";

  struct Entry {
    std::string name;
    BinaryTestMatrix m;
  };
  std::vector<Entry> entries;
  entries.push_back({"identity_3", identity(3)});
  entries.push_back({"identity_8", identity(8)});
  entries.push_back({"allones_1x6",
                     BinaryTestMatrix::from_row_supports(1, 6, {{0, 1, 2, 3, 4, 5}})});
  entries.push_back({"zeros_4x6", BinaryTestMatrix::from_row_supports(4, 6, {{}, {}, {}, {}})});
  entries.push_back({"ks_n12_k2_q3", gt::build_kautz_singleton(12, 2, 3)});
  entries.push_back({"ks_n14_k2", gt::build_kautz_singleton(14, 2)});
  entries.push_back({"ks_n14_k3", gt::build_kautz_singleton(14, 3)});
  entries.push_back({"bern13_20x14_s3", bernoulli(20, 14, 1.0 / 3.0, 3)});
  entries.push_back({"bern13_16x12_s7", bernoulli(16, 12, 1.0 / 3.0, 7)});
  entries.push_back({"bern12_10x12_s5", bernoulli(10, 12, 0.5, 5)});
  entries.push_back({"concat_k2_d8_n14", gt::build_concat_matrix(14, 2, 8, 11).to_binary()});
  // a matrix that is (2,2)-list-disjunct without being 2-disjunct, so the
  // superset decoding really does carry extras
  for (std::uint64_t seed = 0;; ++seed) {
    auto m = bernoulli(14, 12, 1.0 / 3.0, seed);
    if (gt::is_list_disjunct(m, 2, 2) && !gt::is_disjunct(m, 2)) {
      entries.push_back({"bern_listonly_14x12", m});
      break;
    }
  }

  std::ofstream manifest(dir + "/manifest.csv");
  if (!manifest) {
    std::fprintf(stderr, "cannot open %s/manifest.csv\n", dir.c_str());
    return 1;
  }
  manifest << "file,k,l,disjunct,list_disjunct\n";
  for (const auto& e : entries) {
    write_matrix_file(dir + "/" + e.name + ".mat", e.m);
    for (index_t k = 1; k <= 3; ++k) {
      index_t l = k;
      bool dis = gt::is_disjunct(e.m, k);
      bool lis = gt::is_list_disjunct(e.m, k, l);
      manifest << e.name << ".mat," << k << ',' << l << ',' << (dis ? 1 : 0) << ','
               << (lis ? 1 : 0) << '\n';
    }
  }
  std::printf("wrote %zu matrices + manifest to %s\n", entries.size(), dir.c_str());
  return 0;
}
