#include "mupir/gf2.hpp"

#include <bit>

#include "mupir/errors.hpp"

namespace mupir {

namespace {
constexpr long long kWordBits = 64;

long long word_count(long long len) { return (len + kWordBits - 1) / kWordBits; }
}  // namespace

BitVector::BitVector(long long len) : len_(len), words_(word_count(len), 0) {
  if (len < 0) throw InvalidParameter("BitVector length must be non-negative");
}

BitVector::BitVector(std::initializer_list<int> bits) : BitVector(static_cast<long long>(bits.size())) {
  long long i = 0;
  for (int b : bits) set(i++, b);
}

BitVector BitVector::from_bits(const std::vector<int>& bits) {
  BitVector v(static_cast<long long>(bits.size()));
  for (long long i = 0; i < v.len_; ++i) v.set(i, bits[static_cast<std::size_t>(i)]);
  return v;
}

int BitVector::get(long long i) const {
  if (i < 0 || i >= len_) throw OutOfRange("BitVector index out of range");
  return static_cast<int>((words_[static_cast<std::size_t>(i / kWordBits)] >> (i % kWordBits)) & 1u);
}

void BitVector::set(long long i, int bit) {
  if (i < 0 || i >= len_) throw OutOfRange("BitVector index out of range");
  if (bit != 0 && bit != 1) throw InvalidParameter("bit must be 0 or 1");
  std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
  auto& w = words_[static_cast<std::size_t>(i / kWordBits)];
  w = bit ? (w | mask) : (w & ~mask);
}

void BitVector::flip(long long i) { set(i, 1 - get(i)); }

BitVector& BitVector::operator^=(const BitVector& other) {
  if (other.len_ != len_) throw DimensionMismatch("BitVector XOR length mismatch");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

int BitVector::dot(const BitVector& other) const {
  if (other.len_ != len_) throw DimensionMismatch("BitVector dot length mismatch");
  std::uint64_t acc = 0;
  for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & other.words_[w];
  return static_cast<int>(std::popcount(acc) & 1u);
}

BitVector BitVector::slice(long long begin, long long end) const {
  if (begin < 0 || end < begin || end > len_) throw OutOfRange("BitVector slice out of range");
  BitVector out(end - begin);
  for (long long i = begin; i < end; ++i) out.set(i - begin, get(i));
  return out;
}

void BitVector::append(const BitVector& other) {
  long long base = len_;
  len_ += other.len_;
  words_.resize(static_cast<std::size_t>(word_count(len_)), 0);
  for (long long i = 0; i < other.len_; ++i) set(base + i, other.get(i));
}

bool BitVector::is_zero() const {
  for (auto w : words_)
    if (w != 0) return false;
  return true;
}

bool BitVector::operator==(const BitVector& other) const {
  return len_ == other.len_ && words_ == other.words_;
}

std::vector<int> BitVector::to_bits() const {
  std::vector<int> out(static_cast<std::size_t>(len_));
  for (long long i = 0; i < len_; ++i) out[static_cast<std::size_t>(i)] = get(i);
  return out;
}

BitMatrix::BitMatrix(int rows, int cols) : cols_(cols) {
  if (rows < 0 || cols < 0) throw InvalidParameter("BitMatrix dimensions must be non-negative");
  rows_.assign(static_cast<std::size_t>(rows), BitVector(cols));
}

BitMatrix::BitMatrix(int rows, int cols, std::initializer_list<int> entries) : BitMatrix(rows, cols) {
  if (static_cast<long long>(entries.size()) != static_cast<long long>(rows) * cols)
    throw DimensionMismatch("BitMatrix entry count mismatch");
  auto it = entries.begin();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) set(r, c, *it++);
}

BitMatrix BitMatrix::from_rows(std::vector<BitVector> rows) {
  BitMatrix m;
  if (!rows.empty()) {
    m.cols_ = static_cast<int>(rows.front().size());
    for (const auto& r : rows)
      if (r.size() != m.cols_) throw DimensionMismatch("BitMatrix rows of unequal length");
  }
  m.rows_ = std::move(rows);
  return m;
}

BitMatrix BitMatrix::identity(int n) {
  BitMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

void BitMatrix::append_row(BitVector row) {
  if (rows_.empty())
    cols_ = static_cast<int>(row.size());
  else if (row.size() != cols_)
    throw DimensionMismatch("BitMatrix row length mismatch");
  rows_.push_back(std::move(row));
}

BitMatrix BitMatrix::permute_rows(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != rows()) throw DimensionMismatch("permutation size mismatch");
  std::vector<BitVector> out;
  out.reserve(perm.size());
  for (int p : perm) out.push_back(rows_[static_cast<std::size_t>(p)]);
  return from_rows(std::move(out));
}

bool BitMatrix::operator==(const BitMatrix& other) const {
  return cols_ == other.cols_ && rows_ == other.rows_;
}

namespace {

// Row-echelon elimination over GF(2), applied to the matrix rows and in
// lockstep to an optional right-hand-side bit per row. Returns pivot columns.
std::vector<long long> eliminate(std::vector<BitVector>& rows, std::vector<int>* rhs) {
  std::vector<long long> pivots;
  long long cols = rows.empty() ? 0 : rows.front().size();
  std::size_t rank_rows = 0;
  for (long long c = 0; c < cols && rank_rows < rows.size(); ++c) {
    std::size_t pivot = rank_rows;
    while (pivot < rows.size() && rows[pivot].get(c) == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank_rows], rows[pivot]);
    if (rhs) std::swap((*rhs)[rank_rows], (*rhs)[pivot]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank_rows && rows[r].get(c) == 1) {
        rows[r] ^= rows[rank_rows];
        if (rhs) (*rhs)[r] ^= (*rhs)[rank_rows];
      }
    }
    pivots.push_back(c);
    ++rank_rows;
  }
  return pivots;
}

}  // namespace

int rank(const BitMatrix& m) {
  std::vector<BitVector> rows;
  rows.reserve(static_cast<std::size_t>(m.rows()));
  for (int r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
  return static_cast<int>(eliminate(rows, nullptr).size());
}

BitMatrix invert(const BitMatrix& m) {
  if (m.rows() != m.cols()) throw SingularMatrix("invert requires a square matrix");
  int n = m.rows();
  // Gauss-Jordan on [m | I].
  std::vector<BitVector> aug;
  aug.reserve(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    BitVector row = m.row(r);
    BitVector unit(n);
    unit.set(r, 1);
    row.append(unit);
    aug.push_back(std::move(row));
  }
  auto pivots = eliminate(aug, nullptr);
  // All n pivots must land in the left block, or m itself is rank-deficient.
  if (static_cast<int>(pivots.size()) < n || pivots[static_cast<std::size_t>(n - 1)] >= n)
    throw SingularMatrix("matrix is singular over GF(2)");
  BitMatrix inv(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) inv.set(r, c, aug[static_cast<std::size_t>(r)].get(n + c));
  return inv;
}

BitVector solve(const BitMatrix& m, const BitVector& rhs) {
  if (m.rows() != m.cols()) throw SingularMatrix("solve requires a square matrix");
  if (rhs.size() != m.rows()) throw DimensionMismatch("solve rhs length mismatch");
  int n = m.rows();
  std::vector<BitVector> rows;
  std::vector<int> b(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    rows.push_back(m.row(r));
    b[static_cast<std::size_t>(r)] = rhs.get(r);
  }
  auto pivots = eliminate(rows, &b);
  if (static_cast<int>(pivots.size()) != n) throw SingularMatrix("matrix is singular over GF(2)");
  BitVector x(n);
  for (int r = 0; r < n; ++r) x.set(pivots[static_cast<std::size_t>(r)], b[static_cast<std::size_t>(r)]);
  return x;
}

BitVector mat_vec(const BitMatrix& m, const BitVector& v) {
  if (v.size() != m.cols()) throw DimensionMismatch("mat_vec dimension mismatch");
  BitVector out(m.rows());
  for (int r = 0; r < m.rows(); ++r) out.set(r, m.row(r).dot(v));
  return out;
}

BitMatrix y_matrix(int n) {
  if (n < 2) throw InvalidParameter("y_matrix requires n >= 2");
  BitMatrix m(n, n);
  for (int i = 0; i < n - 1; ++i) {
    m.set(i, i, 1);
    m.set(i, n - 1, 1);
  }
  m.set(n - 1, n - 1, 1);
  return m;
}

BitMatrix y_prime_matrix(int n) {
  if (n < 2) throw InvalidParameter("y_prime_matrix requires n >= 2");
  BitMatrix m(n, n - 1);
  for (int i = 0; i < n - 1; ++i) m.set(i, i, 1);
  return m;
}

std::pair<BitMatrix, std::uint64_t> random_row_permutation(const BitMatrix& m, Rng& rng) {
  std::vector<int> perm = rng.permutation(m.rows());
  return {m.permute_rows(perm), rank_permutation(perm)};
}

std::optional<BitVector> recover_coordinates(const BitMatrix& eqs, const BitVector& rhs_bits,
                                             const std::vector<long long>& coords) {
  if (rhs_bits.size() != eqs.rows()) throw DimensionMismatch("recover_coordinates rhs mismatch");
  std::vector<BitVector> rows;
  std::vector<int> b(static_cast<std::size_t>(eqs.rows()));
  for (int r = 0; r < eqs.rows(); ++r) {
    rows.push_back(eqs.row(r));
    b[static_cast<std::size_t>(r)] = rhs_bits.get(r);
  }
  auto pivots = eliminate(rows, &b);
  BitVector out(static_cast<long long>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) {
    long long c = coords[i];
    // After full reduction, coordinate c is determined iff it is a pivot
    // column whose row has no other nonzero entries.
    bool found = false;
    for (std::size_t p = 0; p < pivots.size(); ++p) {
      if (pivots[p] != c) continue;
      BitVector residual = rows[p];
      residual.flip(c);
      if (residual.is_zero()) {
        out.set(static_cast<long long>(i), b[p]);
        found = true;
      }
      break;
    }
    if (!found) return std::nullopt;
  }
  return out;
}

}  // namespace mupir
