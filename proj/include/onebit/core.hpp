#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace onebit {

using index_t = std::int64_t;

/// Real n-vector with sparsity metadata; the signal being recovered.
struct SparseSignal {
  index_t n = 0;
  std::vector<double> entries;
  index_t declared_k = 1;

  SparseSignal() = default;
  SparseSignal(index_t n_, std::vector<double> e, index_t k)
      : n(n_), entries(std::move(e)), declared_k(k) {
    if (static_cast<index_t>(entries.size()) != n)
      throw std::invalid_argument("SparseSignal: entries length != n");
    if (n <= 0 || declared_k <= 0 || declared_k > n)
      throw std::invalid_argument("SparseSignal: bad dimensions");
  }

  std::vector<index_t> support() const {
    std::vector<index_t> s;
    for (index_t i = 0; i < n; ++i)
      if (entries[i] != 0.0) s.push_back(i);
    return s;
  }

  double l2_norm_sq() const {
    double acc = 0;
    for (double v : entries) acc += v * v;
    return acc;
  }
  double l2_norm() const { return std::sqrt(l2_norm_sq()); }

  bool is_exactly_sparse() const {
    index_t nnz = 0;
    for (double v : entries)
      if (v != 0.0) ++nnz;
    return nnz <= declared_k;
  }

  bool is_unit(double tol = 1e-9) const { return std::abs(l2_norm() - 1.0) <= tol; }

  // squared l2 mass outside the k largest-magnitude coordinates
  double tail_norm_sq(index_t k) const {
    if (k >= n) return 0.0;
    std::vector<double> sq(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) sq[i] = entries[i] * entries[i];
    std::nth_element(sq.begin(), sq.begin() + (sq.size() - k), sq.end());
    double acc = 0;
    for (std::size_t i = 0; i + k < sq.size(); ++i) acc += sq[i];
    return acc;
  }
};

/// Output of the one-bit channel; entries are exactly +1 or -1.
struct SignVector {
  std::vector<std::int8_t> bits;

  index_t size() const { return static_cast<index_t>(bits.size()); }
  std::int8_t operator[](index_t i) const { return bits[static_cast<std::size_t>(i)]; }
};

struct RealMatrix {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<double> entries;  // row-major
  std::uint64_t rng_seed = 0;   // 0 if deterministic

  RealMatrix() = default;
  RealMatrix(index_t r, index_t c, std::uint64_t seed = 0)
      : rows(r), cols(c), entries(static_cast<std::size_t>(r * c), 0.0), rng_seed(seed) {}
  RealMatrix(index_t r, index_t c, std::vector<double> e, std::uint64_t seed = 0)
      : rows(r), cols(c), entries(std::move(e)), rng_seed(seed) {
    if (static_cast<index_t>(entries.size()) != rows * cols)
      throw std::invalid_argument("RealMatrix: entry count != rows*cols");
  }

  double& at(index_t r, index_t c) { return entries[static_cast<std::size_t>(r * cols + c)]; }
  double at(index_t r, index_t c) const {
    return entries[static_cast<std::size_t>(r * cols + c)];
  }
  double entry(index_t r, index_t c) const { return at(r, c); }
};

/// 0/1 test matrix stored as dual support indices: decoders iterate
/// "tests where item i participates" directly off column_supports.
struct BinaryTestMatrix {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<std::vector<index_t>> column_supports;  // per column: rows with a 1
  std::vector<std::vector<index_t>> row_supports;     // per row: columns with a 1

  static BinaryTestMatrix from_row_supports(index_t rows, index_t cols,
                                            std::vector<std::vector<index_t>> row_sup) {
    BinaryTestMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_supports = std::move(row_sup);
    if (static_cast<index_t>(m.row_supports.size()) != rows)
      throw std::invalid_argument("BinaryTestMatrix: row support count != rows");
    m.column_supports.assign(static_cast<std::size_t>(cols), {});
    for (index_t r = 0; r < rows; ++r) {
      auto& sup = m.row_supports[static_cast<std::size_t>(r)];
      std::sort(sup.begin(), sup.end());
      for (index_t c : sup) {
        if (c < 0 || c >= cols)
          throw std::invalid_argument("BinaryTestMatrix: column index out of range");
        m.column_supports[static_cast<std::size_t>(c)].push_back(r);
      }
    }
    return m;
  }

  static BinaryTestMatrix from_column_supports(index_t rows, index_t cols,
                                               std::vector<std::vector<index_t>> col_sup) {
    std::vector<std::vector<index_t>> row_sup(static_cast<std::size_t>(rows));
    if (static_cast<index_t>(col_sup.size()) != cols)
      throw std::invalid_argument("BinaryTestMatrix: column support count != cols");
    for (index_t c = 0; c < cols; ++c)
      for (index_t r : col_sup[static_cast<std::size_t>(c)]) {
        if (r < 0 || r >= rows)
          throw std::invalid_argument("BinaryTestMatrix: row index out of range");
        row_sup[static_cast<std::size_t>(r)].push_back(c);
      }
    return from_row_supports(rows, cols, std::move(row_sup));
  }

  bool entry(index_t r, index_t c) const {
    const auto& sup = column_supports[static_cast<std::size_t>(c)];
    return std::binary_search(sup.begin(), sup.end(), r);
  }

  RealMatrix to_real() const {
    RealMatrix m(rows, cols);
    for (index_t r = 0; r < rows; ++r)
      for (index_t c : row_supports[static_cast<std::size_t>(r)]) m.at(r, c) = 1.0;
    return m;
  }
};

inline std::int8_t sign_of_value(double v, double zero_tol = 0.0) {
  return v >= -zero_tol ? std::int8_t{1} : std::int8_t{-1};
}

inline SignVector sign_encode_values(const std::vector<double>& values,
                                     double zero_tol = 0.0) {
  SignVector y;
  y.bits.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    y.bits[i] = sign_of_value(values[i], zero_tol);
  return y;
}

/// One-bit channel: bit_i = +1 iff <row_i, x> >= -zero_tol. The sign(0)=+1
/// convention is load-bearing for the zero-detection decoders; dot products of
/// disjoint supports are exactly 0 in floating point, so the default
/// zero_tol = 0 detects them exactly.
inline SignVector sign_encode(const RealMatrix& phi, const SparseSignal& x,
                              double zero_tol = 0.0) {
  if (phi.cols != x.n) throw std::invalid_argument("sign_encode: dimension mismatch");
  if (zero_tol < 0.0) throw std::invalid_argument("sign_encode: negative zero_tol");
  SignVector y;
  y.bits.resize(static_cast<std::size_t>(phi.rows));
  for (index_t r = 0; r < phi.rows; ++r) {
    double acc = 0;
    const double* row = phi.entries.data() + r * phi.cols;
    for (index_t c = 0; c < phi.cols; ++c) acc += row[c] * x.entries[static_cast<std::size_t>(c)];
    y.bits[static_cast<std::size_t>(r)] = sign_of_value(acc, zero_tol);
  }
  return y;
}

inline RealMatrix hadamard(const RealMatrix& a, const RealMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("hadamard: dimension mismatch");
  RealMatrix out(a.rows, a.cols);
  for (std::size_t i = 0; i < out.entries.size(); ++i)
    out.entries[i] = a.entries[i] * b.entries[i];
  return out;
}

inline RealMatrix hadamard(const BinaryTestMatrix& a, const RealMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("hadamard: dimension mismatch");
  RealMatrix out(a.rows, a.cols);
  for (index_t r = 0; r < a.rows; ++r)
    for (index_t c : a.row_supports[static_cast<std::size_t>(r)]) out.at(r, c) = b.at(r, c);
  return out;
}

/// Maps (block, local row) -> global row of a vertical concatenation.
struct RowBlockMap {
  std::vector<index_t> offsets;  // offsets[b] = first global row of block b

  index_t global_row(std::size_t block, index_t local) const {
    return offsets[block] + local;
  }
  std::size_t block_count() const { return offsets.size(); }
};

inline std::pair<RealMatrix, RowBlockMap> row_direct_sum(
    const std::vector<const RealMatrix*>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("row_direct_sum: empty block list");
  index_t cols = blocks.front()->cols;
  index_t rows = 0;
  RowBlockMap map;
  for (const RealMatrix* b : blocks) {
    if (b->cols != cols) throw std::invalid_argument("row_direct_sum: column mismatch");
    map.offsets.push_back(rows);
    rows += b->rows;
  }
  RealMatrix out(rows, cols);
  index_t at = 0;
  for (const RealMatrix* b : blocks) {
    std::copy(b->entries.begin(), b->entries.end(),
              out.entries.begin() + static_cast<std::ptrdiff_t>(at * cols));
    at += b->rows;
  }
  return {std::move(out), std::move(map)};
}

inline std::pair<BinaryTestMatrix, RowBlockMap> row_direct_sum(
    const std::vector<const BinaryTestMatrix*>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("row_direct_sum: empty block list");
  index_t cols = blocks.front()->cols;
  index_t rows = 0;
  RowBlockMap map;
  std::vector<std::vector<index_t>> row_sup;
  for (const BinaryTestMatrix* b : blocks) {
    if (b->cols != cols) throw std::invalid_argument("row_direct_sum: column mismatch");
    map.offsets.push_back(rows);
    rows += b->rows;
    row_sup.insert(row_sup.end(), b->row_supports.begin(), b->row_supports.end());
  }
  return {BinaryTestMatrix::from_row_supports(rows, cols, std::move(row_sup)),
          std::move(map)};
}

/// Row-wise tensor product: rows indexed by pairs (i, i') in row-major order
/// (a-row outer, v-row inner); row (i,i') is the coordinate-wise product of
/// row i of `a` and row i' of `v`.
inline RealMatrix tensor_product(const BinaryTestMatrix& a, const RealMatrix& v) {
  if (a.cols != v.cols) throw std::invalid_argument("tensor_product: column mismatch");
  RealMatrix out(a.rows * v.rows, a.cols);
  for (index_t i = 0; i < a.rows; ++i)
    for (index_t ip = 0; ip < v.rows; ++ip) {
      index_t r = i * v.rows + ip;
      for (index_t c : a.row_supports[static_cast<std::size_t>(i)])
        out.at(r, c) = v.at(ip, c);
    }
  return out;
}

inline std::vector<double> matvec(const RealMatrix& m, const std::vector<double>& x) {
  if (static_cast<index_t>(x.size()) != m.cols)
    throw std::invalid_argument("matvec: dimension mismatch");
  std::vector<double> out(static_cast<std::size_t>(m.rows), 0.0);
  for (index_t r = 0; r < m.rows; ++r) {
    double acc = 0;
    const double* row = m.entries.data() + r * m.cols;
    for (index_t c = 0; c < m.cols; ++c) acc += row[c] * x[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = acc;
  }
  return out;
}

// ---- serialization ----------------------------------------------------
// Textual format: header "rows cols kind seed" then row-major entries;
// binary matrices as 0/1 tokens, real as decimal floats (17 significant
// digits, round-trip exact).

inline void write_matrix(std::ostream& os, const RealMatrix& m) {
  os << m.rows << ' ' << m.cols << " real " << m.rng_seed << '\n';
  char buf[64];
  for (index_t r = 0; r < m.rows; ++r) {
    for (index_t c = 0; c < m.cols; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m.at(r, c));
      os << buf << (c + 1 == m.cols ? '\n' : ' ');
    }
  }
}

inline void write_matrix(std::ostream& os, const BinaryTestMatrix& m) {
  os << m.rows << ' ' << m.cols << " binary 0\n";
  for (index_t r = 0; r < m.rows; ++r) {
    for (index_t c = 0; c < m.cols; ++c)
      os << (m.entry(r, c) ? '1' : '0') << (c + 1 == m.cols ? '\n' : ' ');
  }
}

struct LoadedMatrix {
  enum class Kind { real, binary } kind = Kind::real;
  RealMatrix real;
  BinaryTestMatrix binary;
};

inline LoadedMatrix load_matrix(std::istream& is) {
  index_t rows, cols;
  std::string kind;
  std::uint64_t seed;
  if (!(is >> rows >> cols >> kind >> seed))
    throw std::runtime_error("load_matrix: bad header");
  LoadedMatrix out;
  if (kind == "real") {
    out.kind = LoadedMatrix::Kind::real;
    out.real = RealMatrix(rows, cols, seed);
    for (auto& e : out.real.entries)
      if (!(is >> e)) throw std::runtime_error("load_matrix: truncated real entries");
  } else if (kind == "binary") {
    out.kind = LoadedMatrix::Kind::binary;
    std::vector<std::vector<index_t>> row_sup(static_cast<std::size_t>(rows));
    for (index_t r = 0; r < rows; ++r)
      for (index_t c = 0; c < cols; ++c) {
        int v;
        if (!(is >> v) || (v != 0 && v != 1))
          throw std::runtime_error("load_matrix: bad binary entry");
        if (v) row_sup[static_cast<std::size_t>(r)].push_back(c);
      }
    out.binary = BinaryTestMatrix::from_row_supports(rows, cols, std::move(row_sup));
  } else {
    throw std::runtime_error("load_matrix: unknown kind '" + kind + "'");
  }
  return out;
}

inline void write_matrix_file(const std::string& path, const RealMatrix& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_matrix(os, m);
}

inline void write_matrix_file(const std::string& path, const BinaryTestMatrix& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_matrix(os, m);
}

inline LoadedMatrix load_matrix_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return load_matrix(is);
}

}  // namespace onebit
