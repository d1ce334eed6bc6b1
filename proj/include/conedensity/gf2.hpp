#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace conedensity::gf2 {

// Dense bit vector over GF(2).
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v = true) {
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (v) words_[i >> 6] |= bit; else words_[i >> 6] &= ~bit;
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  BitVec& operator^=(const BitVec& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    return *this;
  }
  bool any() const;
  std::size_t popcount() const;
  // Index of the lowest set bit, or size() when empty.
  std::size_t first_set() const;
  std::vector<std::size_t> ones() const;

  friend bool operator==(const BitVec&, const BitVec&) = default;

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

// Row-major dense matrix over GF(2).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVec(cols)) {}

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  bool get(std::size_t r, std::size_t c) const { return rows_[r].get(c); }
  void set(std::size_t r, std::size_t c, bool v = true) { rows_[r].set(c, v); }
  void flip(std::size_t r, std::size_t c) { rows_[r].flip(c); }
  BitVec& row(std::size_t r) { return rows_[r]; }
  const BitVec& row(std::size_t r) const { return rows_[r]; }
  void append_row(BitVec r) { rows_.push_back(std::move(r)); }

  BitVec apply(const BitVec& x) const;  // y = M x

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix&, const Matrix&) = default;

  bool is_zero() const;
  static Matrix identity(std::size_t n);

 private:
  std::size_t cols_ = 0;
  std::vector<BitVec> rows_;
};

enum class Kernel { Serial, Parallel };

// Reduced row echelon form in place; returns pivot column per nonzero row.
// Both kernels produce identical output; Parallel distributes the row sweep
// of each pivot over OpenMP threads.
std::vector<std::size_t> rref(Matrix& m, Kernel kernel = Kernel::Parallel);

std::size_t rank(Matrix m);

// Basis of { x : M x = 0 }.
std::vector<BitVec> nullspace(const Matrix& m);

// Some x with M x = b, if one exists.
std::optional<BitVec> solve(const Matrix& m, const BitVec& b);

Matrix transpose(const Matrix& m);
// nullopt for singular or non-square input.
std::optional<Matrix> inverse(const Matrix& m);

// Incremental span used to pick representatives of a quotient space.
class Span {
 public:
  explicit Span(std::size_t dim) : dim_(dim) {}
  // Adds v; returns false when v was already in the span.
  bool insert(const BitVec& v);
  bool contains(const BitVec& v) const;
  std::size_t dim() const { return basis_.size(); }
  // Canonical representative of v modulo the span.
  BitVec reduce(BitVec v) const;

 private:
  std::size_t dim_;
  std::vector<BitVec> basis_;       // each with a distinct leading bit
  std::vector<std::size_t> lead_;
};

}  // namespace conedensity::gf2
