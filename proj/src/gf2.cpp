#include "conedensity/gf2.hpp"

#include <bit>
#include <stdexcept>

namespace conedensity::gf2 {

bool BitVec::any() const {
  for (auto w : words_)
    if (w) return true;
  return false;
}

std::size_t BitVec::popcount() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::size_t BitVec::first_set() const {
  for (std::size_t w = 0; w < words_.size(); ++w)
    if (words_[w]) return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
  return n_;
}

std::vector<std::size_t> BitVec::ones() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    auto word = words_[w];
    while (word) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
      word &= word - 1;
    }
  }
  return out;
}

BitVec Matrix::apply(const BitVec& x) const {
  if (x.size() != cols_) throw std::invalid_argument("gf2::Matrix::apply: size mismatch");
  BitVec y(rows());
  for (std::size_t r = 0; r < rows(); ++r) {
    std::uint64_t acc = 0;
    const auto& a = rows_[r].words();
    const auto& b = x.words();
    for (std::size_t w = 0; w < a.size(); ++w) acc ^= a[w] & b[w];
    if (std::popcount(acc) & 1) y.set(r);
  }
  return y;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("gf2 matrix product: shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k : a.row(r).ones()) out.row(r) ^= b.row(k);
  return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("gf2 matrix sum: shape mismatch");
  Matrix out = a;
  for (std::size_t r = 0; r < a.rows(); ++r) out.row(r) ^= b.row(r);
  return out;
}

bool Matrix::is_zero() const {
  for (const auto& r : rows_)
    if (r.any()) return false;
  return true;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i);
  return m;
}

std::vector<std::size_t> rref(Matrix& m, Kernel kernel) {
  std::vector<std::size_t> pivots;
  const std::size_t nrows = m.rows();
  std::size_t next = 0;
  for (std::size_t col = 0; col < m.cols() && next < nrows; ++col) {
    std::size_t p = next;
    while (p < nrows && !m.get(p, col)) ++p;
    if (p == nrows) continue;
    std::swap(m.row(p), m.row(next));
    const BitVec pivot_row = m.row(next);
    const auto pivot_index = static_cast<long>(next);
    if (kernel == Kernel::Parallel) {
#pragma omp parallel for schedule(static)
      for (long r = 0; r < static_cast<long>(nrows); ++r)
        if (r != pivot_index && m.get(static_cast<std::size_t>(r), col))
          m.row(static_cast<std::size_t>(r)) ^= pivot_row;
    } else {
      for (long r = 0; r < static_cast<long>(nrows); ++r)
        if (r != pivot_index && m.get(static_cast<std::size_t>(r), col))
          m.row(static_cast<std::size_t>(r)) ^= pivot_row;
    }
    pivots.push_back(col);
    ++next;
  }
  return pivots;
}

std::size_t rank(Matrix m) { return rref(m).size(); }

std::vector<BitVec> nullspace(const Matrix& m) {
  Matrix r = m;
  auto pivots = rref(r);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<BitVec> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    BitVec x(m.cols());
    x.set(free);
    for (std::size_t i = 0; i < pivots.size(); ++i)
      if (r.get(i, free)) x.set(pivots[i]);
    basis.push_back(std::move(x));
  }
  return basis;
}

std::optional<BitVec> solve(const Matrix& m, const BitVec& b) {
  if (b.size() != m.rows()) throw std::invalid_argument("gf2::solve: size mismatch");
  Matrix aug(m.rows(), m.cols() + 1);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (auto c : m.row(r).ones()) aug.set(r, c);
    if (b.get(r)) aug.set(r, m.cols());
  }
  auto pivots = rref(aug);
  BitVec x(m.cols());
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    if (pivots[i] == m.cols()) return std::nullopt;
    if (aug.get(i, m.cols())) x.set(pivots[i]);
  }
  return x;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (auto c : m.row(r).ones()) t.set(c, r);
  return t;
}

std::optional<Matrix> inverse(const Matrix& m) {
  const std::size_t n = m.rows();
  if (m.cols() != n) return std::nullopt;
  Matrix aug(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (auto c : m.row(r).ones()) aug.set(r, c);
    aug.set(r, n + r);
  }
  auto pivots = rref(aug, Kernel::Serial);
  if (pivots.size() < n || (n > 0 && pivots[n - 1] >= n)) return std::nullopt;
  Matrix inv(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (aug.get(r, n + c)) inv.set(r, c);
  return inv;
}

BitVec Span::reduce(BitVec v) const {
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (v.get(lead_[i])) v ^= basis_[i];
  return v;
}

bool Span::insert(const BitVec& v) {
  if (v.size() != dim_) throw std::invalid_argument("gf2::Span: size mismatch");
  BitVec r = reduce(v);
  const auto lead = r.first_set();
  if (lead == r.size()) return false;
  // keep the basis fully reduced so a single pass in reduce() suffices
  for (auto& b : basis_)
    if (b.get(lead)) b ^= r;
  basis_.push_back(std::move(r));
  lead_.push_back(lead);
  return true;
}

bool Span::contains(const BitVec& v) const { return !reduce(v).any(); }

}  // namespace conedensity::gf2
