#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "mupir/gf2.hpp"
#include "mupir/rational.hpp"
#include "mupir/rng.hpp"

namespace mupir {

struct SystemParams {
  int num_messages = 0;   // K
  int num_users = 0;      // Ku
  int num_dbs = 0;        // N
  long long message_len = 0;  // L in bits
  Rat cache_size;         // M, in message units, 0 <= M <= K

  // Cached bits per user; throws if M*L is not an integer.
  long long cache_bits() const;
  void validate() const;
};

struct MessageLibrary {
  SystemParams params;
  std::vector<BitVector> messages;  // K messages, each of length L

  void validate() const;
};

// Fills K messages of length L from a seeded generator.
MessageLibrary random_library(const SystemParams& params, std::uint64_t seed);

// User demands; entries are 1-based message indices in [1, K].
struct DemandVector {
  std::vector<int> thetas;

  int message_index(int user) const { return thetas[static_cast<std::size_t>(user)] - 1; }
  bool operator==(const DemandVector& other) const { return thetas == other.thetas; }
  bool operator<(const DemandVector& other) const { return thetas < other.thetas; }
  std::string to_string() const;
};

// All K^Ku demand vectors in lexicographic order.
std::vector<DemandVector> all_demands(int num_messages, int num_users);
// The demand vectors with pairwise distinct entries, lexicographic.
std::vector<DemandVector> distinct_demands(int num_messages, int num_users);

// Structured cache description: either raw library bit positions or GF(2)
// combinations of the concatenated message-bit layout (W_1 | W_2 | ... | W_K).
struct UncodedIndices {
  std::vector<std::pair<int, long long>> entries;  // (message index, bit index), 0-based
};
struct LinearCombos {
  BitMatrix coeffs;  // one row per cached bit, over K*L columns
};
using CacheDescription = std::variant<UncodedIndices, LinearCombos>;

struct CacheContent {
  int user = 0;  // 0-based
  BitVector stored_bits;
  CacheDescription description;
};

// Evaluates a cache description against the library; used to check that the
// description reproduces stored_bits.
BitVector evaluate_cache_description(const CacheDescription& desc, const MessageLibrary& lib);

// A query is its canonical serialization: a scheme-tagged JSON string in a
// fixed total order, so byte equality equals semantic equality.
struct Query {
  int db = 0;  // 0-based
  std::string payload;

  bool operator==(const Query& other) const { return db == other.db && payload == other.payload; }
};

std::string canonical_query_bytes(const Query& q);
Query parse_query_bytes(const std::string& bytes);

struct Answer {
  int db = 0;  // 0-based
  BitVector bits;
};

struct Transcript {
  SystemParams params;
  DemandVector demand;
  std::uint64_t seed = 0;  // seed, or realization index for enumerated runs
  std::vector<CacheContent> caches;
  std::vector<Query> queries;
  std::vector<Answer> answers;
  std::vector<BitVector> decoded;
  long long download_bits = 0;
  Rat load;
};

// Common interface implemented by every concrete scheme. All operations are
// pure: instances carry no mutable state and are safe to share across threads.
class Scheme {
 public:
  virtual ~Scheme() = default;

  virtual std::string name() const = 0;
  virtual const SystemParams& params() const = 0;

  // Placement is deterministic in every scheme in this library.
  virtual std::vector<CacheContent> place(const MessageLibrary& lib) const = 0;

  // Randomness domain. Enumerable schemes expose equiprobable realizations
  // indexed 0..realization_count-1. A count of 0 means the domain is not
  // index-addressable (e.g. a permutation space too large for 64 bits);
  // such schemes support only seeded draws.
  virtual std::uint64_t realization_count(const DemandVector& demand) const = 0;
  bool enumerable(const DemandVector& demand) const { return realization_count(demand) != 0; }
  virtual std::vector<Query> queries_at(const DemandVector& demand, std::uint64_t realization) const = 0;
  virtual std::vector<Query> queries_seeded(const DemandVector& demand, std::uint64_t seed) const;

  virtual Answer answer(const Query& query, const MessageLibrary& lib) const = 0;

  virtual BitVector decode(int user, const DemandVector& demand, const std::vector<Query>& queries,
                           const std::vector<Answer>& answers, const CacheContent& cache) const = 0;

  // The demand vectors this scheme accepts, in canonical order.
  virtual std::vector<DemandVector> demand_set() const;
  virtual void check_demand(const DemandVector& demand) const;
};

using SchemePtr = std::shared_ptr<const Scheme>;

// Executes placement, query generation, answering and decoding end to end.
Transcript run_transcript(const Scheme& scheme, const MessageLibrary& lib, const DemandVector& demand,
                          std::uint64_t seed);
// Same, but with an explicit realization of the scheme's randomness domain.
Transcript run_transcript_at(const Scheme& scheme, const MessageLibrary& lib, const DemandVector& demand,
                             std::uint64_t realization);

std::string transcript_to_json(const Transcript& t);

// Full-replication baseline: every user caches the same M/K fraction of each
// message and DB 1 broadcasts the rest. Load K(1 - M/K); queries constant.
SchemePtr naive_scheme(const SystemParams& params);

// Deliberately non-private scheme that embeds the demand vector in its
// queries; used to exercise the failure path of the privacy auditor.
SchemePtr strawman_scheme(const SystemParams& params);

}  // namespace mupir
