#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mupir/system.hpp"

namespace mupir {

// Capacity-achieving single-user PIR engine over N databases and K messages
// of N^K symbols each. Queries are block-structured symbol sums: block 1
// requests one fresh symbol of every message at every database; in block k,
// every desired-free (k-1)-atom generated at another database is replayed
// together with one fresh symbol of the demanded message, and fresh
// desired-free k-atoms are added so that every k-subset of messages appears
// (N-1)^(k-1) times per database. Fresh symbol indices come from per-message
// counters and are mapped through K independent uniform permutations, which
// is what makes the visible index patterns demand-independent.

// One requested symbol sum: a set of distinct messages (ascending) and one
// symbol index per message, parallel to `messages`. All indices 0-based.
struct QueryAtom {
  std::vector<int> messages;
  std::vector<long long> indices;

  bool operator==(const QueryAtom& other) const {
    return messages == other.messages && indices == other.indices;
  }
};

struct SjPlan {
  int num_messages = 0;  // K
  int num_dbs = 0;       // N
  int theta = 0;         // demanded message, 0-based
  long long symbols = 0; // N^K
  std::vector<std::vector<QueryAtom>> per_db;  // canonical order per DB
  std::vector<std::vector<long long>> perms;   // K permutations of [symbols]
};

// Per-database atom count: sum over k of C(K,k) * (N-1)^(k-1).
long long sj_download_per_db(int num_messages, int num_dbs);
long long sj_symbols(int num_messages, int num_dbs);  // N^K

// Number of equiprobable permutation tuples ((N^K)!)^K, or 0 when it does
// not fit in 64 bits (seeded draws only).
std::uint64_t sj_realization_count(int num_messages, int num_dbs);

SjPlan sj_plan(int num_messages, int num_dbs, int theta, Rng& rng);
SjPlan sj_plan_at(int num_messages, int num_dbs, int theta, std::uint64_t realization);
// Plan with caller-provided permutations (the product design derives its own
// independent permutation streams per coded message).
SjPlan sj_plan_with_perms(int num_messages, int num_dbs, int theta,
                          std::vector<std::vector<long long>> perms);

// XOR of the referenced message symbols, one bit per atom in plan order.
BitVector sj_answer(const SjPlan& plan, int db, const std::vector<BitVector>& messages);
BitVector sj_answer_atoms(const std::vector<QueryAtom>& atoms, const std::vector<BitVector>& messages);

// Recovers all symbols of the demanded message by cancelling side
// information. Works from the atom lists alone, so the product design can
// decode from published queries. Throws DecodeFailure on inconsistency.
BitVector sj_decode(int theta, long long symbols, const std::vector<std::vector<QueryAtom>>& per_db,
                    const std::vector<BitVector>& answer_bits);
BitVector sj_decode_plan(const SjPlan& plan, const std::vector<BitVector>& answer_bits);

// Demand-independent shape of one database's atom list: the sequence of
// (block size, message subset) pairs without symbol indices.
std::string sj_structural_projection(const std::vector<QueryAtom>& atoms);

std::string sj_atoms_to_json(const std::vector<QueryAtom>& atoms);
std::vector<QueryAtom> sj_atoms_from_json_fragment(const char*& cursor);

// Single-user scheme wrapper (Ku = 1, M = 0) exposing the engine through the
// common harness, with an enumerable domain for small permutation spaces.
SchemePtr sj_scheme(int num_messages, int num_dbs);

}  // namespace mupir
