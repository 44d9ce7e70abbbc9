#pragma once

// Dense binary matrix algebra over GF(2). Rows are packed into 64-bit
// words; all arithmetic is mod 2.

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace wiretap::gf2 {

class BitMatrix {
 public:
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64),
        bits_(rows * words_per_row_, 0) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("BitMatrix: dimensions must be positive");
    }
  }

  static BitMatrix identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  static BitMatrix from_rows(
      const std::vector<std::vector<int>>& entries) {
    if (entries.empty() || entries.front().empty()) {
      throw std::invalid_argument("BitMatrix: empty initializer");
    }
    BitMatrix m(entries.size(), entries.front().size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].size() != m.cols_) {
        throw std::invalid_argument("BitMatrix: ragged initializer");
      }
      for (std::size_t j = 0; j < m.cols_; ++j) {
        m.set(i, j, entries[i][j] != 0);
      }
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t r, std::size_t c) const {
    return (word(r, c / 64) >> (c % 64)) & 1u;
  }

  void set(std::size_t r, std::size_t c, bool v) {
    std::uint64_t mask = std::uint64_t{1} << (c % 64);
    if (v) {
      word(r, c / 64) |= mask;
    } else {
      word(r, c / 64) &= ~mask;
    }
  }

  // XORs row `src` into row `dst`.
  void add_row(std::size_t dst, std::size_t src) {
    auto* d = row_data(dst);
    const auto* s = row_data(src);
    for (std::size_t w = 0; w < words_per_row_; ++w) d[w] ^= s[w];
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    auto* pa = row_data(a);
    auto* pb = row_data(b);
    for (std::size_t w = 0; w < words_per_row_; ++w) std::swap(pa[w], pb[w]);
  }

  bool row_is_zero(std::size_t r) const {
    const auto* p = row_data(r);
    for (std::size_t w = 0; w < words_per_row_; ++w) {
      if (p[w] != 0) return false;
    }
    return true;
  }

  bool operator==(const BitMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ &&
           bits_ == other.bits_;
  }

  std::uint64_t* row_data(std::size_t r) { return &bits_[r * words_per_row_]; }
  const std::uint64_t* row_data(std::size_t r) const {
    return &bits_[r * words_per_row_];
  }
  std::size_t words_per_row() const { return words_per_row_; }

 private:
  std::uint64_t& word(std::size_t r, std::size_t w) {
    return bits_[r * words_per_row_ + w];
  }
  std::uint64_t word(std::size_t r, std::size_t w) const {
    return bits_[r * words_per_row_ + w];
  }

  std::size_t rows_;
  std::size_t cols_;
  std::size_t words_per_row_;
  std::vector<std::uint64_t> bits_;
};

inline BitMatrix multiply(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("gf2::multiply: dimension mismatch");
  }
  // c[i] = XOR of rows b[j] where a[i][j] = 1.
  BitMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto* ci = c.row_data(i);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (!a.get(i, j)) continue;
      const auto* bj = b.row_data(j);
      for (std::size_t w = 0; w < c.words_per_row(); ++w) ci[w] ^= bj[w];
    }
  }
  return c;
}

inline BitMatrix transpose(const BitMatrix& m) {
  BitMatrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m.get(i, j)) t.set(j, i, true);
    }
  }
  return t;
}

// Multiplies a packed bit row-vector (as a 1xN matrix row) by m.
inline std::vector<std::uint8_t> multiply_vec(
    const std::vector<std::uint8_t>& v, const BitMatrix& m) {
  if (v.size() != m.rows()) {
    throw std::invalid_argument("gf2::multiply_vec: dimension mismatch");
  }
  std::vector<std::uint64_t> acc(m.words_per_row(), 0);
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!v[j]) continue;
    const auto* row = m.row_data(j);
    for (std::size_t w = 0; w < acc.size(); ++w) acc[w] ^= row[w];
  }
  std::vector<std::uint8_t> out(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    out[c] = static_cast<std::uint8_t>((acc[c / 64] >> (c % 64)) & 1u);
  }
  return out;
}

inline std::size_t rank(BitMatrix m) {
  std::size_t r = 0;
  for (std::size_t col = 0; col < m.cols() && r < m.rows(); ++col) {
    std::size_t pivot = r;
    while (pivot < m.rows() && !m.get(pivot, col)) ++pivot;
    if (pivot == m.rows()) continue;
    m.swap_rows(r, pivot);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i != r && m.get(i, col)) m.add_row(i, r);
    }
    ++r;
  }
  return r;
}

// Inverse via GF(2) LU-style elimination on [m | I]. Empty result means
// singular.
inline std::optional<BitMatrix> lu_invert(const BitMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("gf2::lu_invert: matrix must be square");
  }
  const std::size_t n = m.rows();
  BitMatrix a = m;
  BitMatrix inv = BitMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && !a.get(pivot, col)) ++pivot;
    if (pivot == n) return std::nullopt;
    a.swap_rows(col, pivot);
    inv.swap_rows(col, pivot);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != col && a.get(i, col)) {
        a.add_row(i, col);
        inv.add_row(i, col);
      }
    }
  }
  return inv;
}

inline constexpr int kRandomInvertibleAttempts = 64;

// Draws uniform k x k matrices until one is invertible. The success
// probability per draw is > 0.288 for any k, so 64 attempts failing
// indicates a broken generator.
inline BitMatrix random_invertible(std::size_t k, std::mt19937_64& rng) {
  if (k == 0) {
    throw std::invalid_argument("gf2::random_invertible: k must be >= 1");
  }
  for (int attempt = 0; attempt < kRandomInvertibleAttempts; ++attempt) {
    BitMatrix m(k, k);
    for (std::size_t i = 0; i < k; ++i) {
      auto* row = m.row_data(i);
      for (std::size_t w = 0; w < m.words_per_row(); ++w) row[w] = rng();
      // Mask tail bits beyond column k.
      if (k % 64 != 0) {
        row[m.words_per_row() - 1] &= (std::uint64_t{1} << (k % 64)) - 1;
      }
    }
    if (rank(m) == k) return m;
  }
  throw std::runtime_error(
      "gf2::random_invertible: attempt budget exhausted");
}

}  // namespace wiretap::gf2
