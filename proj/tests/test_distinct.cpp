#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mupir/audit.hpp"
#include "mupir/distinct.hpp"
#include "mupir/errors.hpp"

using namespace mupir;

namespace {

// All 2^6 libraries with L = 3 bits per message.
MessageLibrary library_from_mask(const SystemParams& params, int mask) {
  MessageLibrary lib;
  lib.params = params;
  BitVector a(3), b(3);
  for (int i = 0; i < 3; ++i) {
    a.set(i, (mask >> i) & 1);
    b.set(i, (mask >> (3 + i)) & 1);
  }
  lib.messages = {a, b};
  return lib;
}

const std::vector<DemandVector> kDistinct = distinct_demands(2, 2);

}  // namespace

TEST_CASE("variant pairing table") {
  DemandVector d12{{1, 2}}, d21{{2, 1}};
  CHECK(DistinctVariantTable::db2_variant(0, d12) == 0);
  CHECK(DistinctVariantTable::db2_variant(1, d12) == 1);
  CHECK(DistinctVariantTable::db2_variant(0, d21) == 1);
  CHECK(DistinctVariantTable::db2_variant(1, d21) == 0);
  CHECK_THROWS_AS(DistinctVariantTable::db2_variant(0, DemandVector{{1, 1}}), InvalidDemand);
}

TEST_CASE("corner 1: caches, load and exhaustive decode") {
  auto scheme = dd_corner1_scheme();
  CHECK(scheme->params().cache_size == Rat(1, 3));
  for (int mask = 0; mask < 64; ++mask) {
    auto lib = library_from_mask(scheme->params(), mask);
    auto caches = scheme->place(lib);
    CHECK(caches[0].stored_bits.get(0) == (lib.messages[0].get(0) ^ lib.messages[1].get(0)));
    CHECK(caches[1].stored_bits.get(0) == (lib.messages[0].get(1) ^ lib.messages[1].get(1)));
    for (const auto& demand : kDistinct) {
      for (std::uint64_t coin = 0; coin < 2; ++coin) {
        Transcript t = run_transcript_at(*scheme, lib, demand, coin);
        CHECK(t.download_bits == 4);
        CHECK(t.load == Rat(4, 3));
        for (int u = 0; u < 2; ++u)
          CHECK(t.decoded[static_cast<std::size_t>(u)] ==
                lib.messages[static_cast<std::size_t>(demand.message_index(u))]);
      }
    }
  }
}

TEST_CASE("corner 2: caches, load and exhaustive decode") {
  auto scheme = dd_corner2_scheme();
  CHECK(scheme->params().cache_size == Rat(2, 3));
  for (int mask = 0; mask < 64; ++mask) {
    auto lib = library_from_mask(scheme->params(), mask);
    auto caches = scheme->place(lib);
    CHECK(caches[0].stored_bits.to_bits() ==
          std::vector<int>{lib.messages[0].get(0), lib.messages[1].get(0)});
    CHECK(caches[1].stored_bits.to_bits() ==
          std::vector<int>{lib.messages[0].get(1), lib.messages[1].get(1)});
    for (const auto& demand : kDistinct) {
      for (std::uint64_t coin = 0; coin < 2; ++coin) {
        Transcript t = run_transcript_at(*scheme, lib, demand, coin);
        CHECK(t.download_bits == 3);
        CHECK(t.load == Rat(1));
        for (int u = 0; u < 2; ++u)
          CHECK(t.decoded[static_cast<std::size_t>(u)] ==
                lib.messages[static_cast<std::size_t>(demand.message_index(u))]);
      }
    }
  }
}

TEST_CASE("per-db variant distribution is uniform for both demands") {
  for (auto scheme : {dd_corner1_scheme(), dd_corner2_scheme()}) {
    for (int db = 0; db < 2; ++db) {
      auto report = audit_privacy(*scheme, db, kDistinct, AuditMode::kExhaustive, 1);
      CHECK(report.pass);
      CHECK(report.distance == Rat(0));
      for (const auto& [theta, dist] : report.per_theta_distributions) {
        REQUIRE(dist.size() == 2);
        for (const auto& [bytes, prob] : dist) CHECK(prob == Rat(1, 2));
      }
    }
  }
}

TEST_CASE("equal demands are rejected") {
  auto scheme = dd_corner1_scheme();
  CHECK_THROWS_AS(scheme->queries_at(DemandVector{{1, 1}}, 0), InvalidDemand);
  CHECK_THROWS_AS(scheme->queries_at(DemandVector{{2, 2}}, 0), InvalidDemand);
  auto lib = library_from_mask(scheme->params(), 5);
  CHECK_THROWS_AS(run_transcript(*scheme, lib, DemandVector{{1, 1}}, 3), InvalidDemand);
}

TEST_CASE("corner 2 worked decode: (A11, A21) under demand (1,2)") {
  // User 1 recovers A3 from A_{1,1} after stripping B1 (cached) and B2+B3
  // (from DB 2), then A2 from A2+A3.
  auto scheme = dd_corner2_scheme();
  auto lib = library_from_mask(scheme->params(), 0b110101);
  Transcript t = run_transcript_at(*scheme, lib, DemandVector{{1, 2}}, 0);
  CHECK(t.queries[0].payload.find("\"variant\":1") != std::string::npos);
  CHECK(t.queries[1].payload.find("\"variant\":1") != std::string::npos);
  int a1 = lib.messages[0].get(0), a2 = lib.messages[0].get(1), a3 = lib.messages[0].get(2);
  int b1 = lib.messages[1].get(0), b2 = lib.messages[1].get(1), b3 = lib.messages[1].get(2);
  CHECK(t.answers[0].bits.get(0) == (a3 ^ b3 ^ b1 ^ b2));
  CHECK(t.answers[1].bits.get(0) == (a2 ^ a3));
  CHECK(t.answers[1].bits.get(1) == (b2 ^ b3));
  int rec_a3 = t.answers[0].bits.get(0) ^ b1 ^ t.answers[1].bits.get(1);
  CHECK(rec_a3 == a3);
  CHECK((t.answers[1].bits.get(0) ^ rec_a3) == a2);
}
