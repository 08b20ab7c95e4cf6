#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mupir/system.hpp"

namespace mupir {

// Cache-aided interference alignment schemes for K = 2 messages and
// K_u = 2 users over N >= 2 databases.
//
// Corner 1 achieves (M, R) = ((N-1)/(2N), (N+1)/N) with coded caches of
// N-1 sum bits per user and per-message-half answer combinations.
// Corner 2 achieves (M, R) = (2(N-1)/(2N-1), (N+1)/(2N-1)) with uncoded
// caches and one full-length combination per non-final database.
//
// Database coefficients are drawn per demand case from the rows of
// y_matrix(N) (corner 1) or y_prime_matrix(N) (corner 2): two i.i.d.
// uniform row picks plus two independent uniform row permutations, with
// the demand's alignment equalities filling in the remaining vectors.
// The cases (2,1) and (2,2) are the (1,2) and (1,1) constructions with
// the roles of the two messages swapped: u <-> v, g1 <-> g2, g3 <-> g4
// for corner 1, and the corresponding index-half swaps for corner 2.

// Corner-1 answer coefficients. u[n][j], v[n][j] multiply the first
// (j = 0) or second (j = 1) half of message A resp. B in DB n's two
// combinations; g[0..3] are DB N's four coefficient vectors.
struct Cia1Coefficients {
  int num_dbs = 0;
  std::vector<std::array<BitVector, 2>> u;  // N-1 entries of length N
  std::vector<std::array<BitVector, 2>> v;
  std::array<BitVector, 4> g;
};

// Corner-2 answer coefficients, all of length 2N-1 with final coordinate 1.
struct Cia2Coefficients {
  int num_dbs = 0;
  std::vector<BitVector> u;  // N-1 entries
  std::vector<BitVector> v;
  BitVector g1, g2;
};

// Number of equiprobable randomness realizations per demand: N^2 * (N!)^2.
std::uint64_t cia_realization_count(int num_dbs);

Cia1Coefficients cia1_coefficients_at(const DemandVector& demand, int num_dbs, std::uint64_t realization);
Cia1Coefficients cia1_coefficients(const DemandVector& demand, int num_dbs, Rng& rng);
Cia2Coefficients cia2_coefficients_at(const DemandVector& demand, int num_dbs, std::uint64_t realization);
Cia2Coefficients cia2_coefficients(const DemandVector& demand, int num_dbs, Rng& rng);

// Answers for one 2N-bit (corner 1) or (2N-1)-bit (corner 2) message block.
// a, b are the two message blocks. Corner 1: DB n < N emits 2 bits, DB N
// emits 4; corner 2: DB n < N emits 1 bit, DB N emits 2.
std::vector<BitVector> cia1_answers(const Cia1Coefficients& coeffs, const BitVector& a, const BitVector& b);
std::vector<BitVector> cia2_answers(const Cia2Coefficients& coeffs, const BitVector& a, const BitVector& b);

// Decodes one user's demanded message block from the per-database answer
// bits and that user's cache bits for the block. Throws DecodeFailure if a
// stacked coefficient system is singular.
BitVector cia1_decode(int user, const DemandVector& demand, const Cia1Coefficients& coeffs,
                      const std::vector<BitVector>& answers, const BitVector& cache_bits);
BitVector cia2_decode(int user, const DemandVector& demand, const Cia2Coefficients& coeffs,
                      const std::vector<BitVector>& answers, const BitVector& cache_bits);

// Demand-specific construction soundness: the six stacked coefficient
// matrices (including the two privacy-motivated ones) are full-rank, and the
// demand's alignment equalities hold.
bool check_fullrank_cia1(const Cia1Coefficients& coeffs, const DemandVector& demand);
bool check_alignment_cia1(const Cia1Coefficients& coeffs, const DemandVector& demand);
bool check_fullrank_cia2(const Cia2Coefficients& coeffs, const DemandVector& demand);
bool check_alignment_cia2(const Cia2Coefficients& coeffs, const DemandVector& demand);

// Scheme instances. message_len must be a multiple of the corner's block
// length (2N resp. 2N-1); longer messages run block repetition with fresh
// randomness per block. The randomness domain is enumerable for one block.
SchemePtr cia1_scheme(int num_dbs, long long message_len);
SchemePtr cia2_scheme(int num_dbs, long long message_len);

}  // namespace mupir
