#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

#include "mupir/rng.hpp"

namespace mupir {

// Dense GF(2) row vector, bits packed into 64-bit words. Addition is XOR.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(long long len);
  BitVector(std::initializer_list<int> bits);
  static BitVector from_bits(const std::vector<int>& bits);

  long long size() const { return len_; }
  int get(long long i) const;
  void set(long long i, int bit);
  void flip(long long i);

  BitVector& operator^=(const BitVector& other);
  friend BitVector operator^(BitVector a, const BitVector& b) {
    a ^= b;
    return a;
  }

  // GF(2) inner product: parity of the AND of the two vectors.
  int dot(const BitVector& other) const;

  // Concatenation and slicing, used for message block layouts.
  BitVector slice(long long begin, long long end) const;
  void append(const BitVector& other);

  bool is_zero() const;
  bool operator==(const BitVector& other) const;
  std::vector<int> to_bits() const;

 private:
  long long len_ = 0;
  std::vector<std::uint64_t> words_;
  friend class BitMatrix;
};

// Dense GF(2) matrix stored as a list of row BitVectors. Sizes in this
// library never exceed a few hundred rows/columns.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(int rows, int cols);
  BitMatrix(int rows, int cols, std::initializer_list<int> entries);
  static BitMatrix from_rows(std::vector<BitVector> rows);
  static BitMatrix identity(int n);

  int rows() const { return static_cast<int>(rows_.size()); }
  int cols() const { return cols_; }
  int get(int r, long long c) const { return rows_[r].get(c); }
  void set(int r, long long c, int bit) { rows_[r].set(c, bit); }
  const BitVector& row(int r) const { return rows_[r]; }
  BitVector& row(int r) { return rows_[r]; }
  void append_row(BitVector row);

  BitMatrix permute_rows(const std::vector<int>& perm) const;
  bool operator==(const BitMatrix& other) const;

 private:
  int cols_ = 0;
  std::vector<BitVector> rows_;
};

// GF(2) row rank via Gaussian elimination (first-nonzero pivoting).
int rank(const BitMatrix& m);

// Inverse of a square matrix; throws SingularMatrix when rank < dimension.
BitMatrix invert(const BitMatrix& m);

// Solves m * x = rhs for square full-rank m; throws SingularMatrix.
BitVector solve(const BitMatrix& m, const BitVector& rhs);

// Matrix-vector product; throws DimensionMismatch if v.size() != m.cols().
BitVector mat_vec(const BitMatrix& m, const BitVector& v);

// The N x N full-rank matrix [[I_{N-1}, 1^T], [0, 1]]: rows e_i + e_N for
// i < N, last row e_N. Throws InvalidParameter for n < 2.
BitMatrix y_matrix(int n);

// The N x (N-1) matrix [I_{N-1}; 0]: rows e_1..e_{N-1} then the zero row.
BitMatrix y_prime_matrix(int n);

// Reorders the rows of m by a uniformly chosen permutation and returns the
// permutation's index in the lexicographic enumeration of all rows()!
// permutations. Deterministic given the rng state.
std::pair<BitMatrix, std::uint64_t> random_row_permutation(const BitMatrix& m, Rng& rng);

// Given consistent equations eqs * x = rhs_bits (possibly underdetermined),
// recovers the values x[c] for the requested coordinates, provided each unit
// functional e_c lies in the row space of eqs. Returns nullopt if any
// requested coordinate is not recoverable.
std::optional<BitVector> recover_coordinates(const BitMatrix& eqs, const BitVector& rhs_bits,
                                             const std::vector<long long>& coords);

}  // namespace mupir
