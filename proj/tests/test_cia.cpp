#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "mupir/cia.hpp"
#include "mupir/errors.hpp"
#include "mupir/system.hpp"

using namespace mupir;

namespace {

const std::vector<DemandVector> kAllDemands = all_demands(2, 2);

MessageLibrary library_for(const Scheme& scheme, std::uint64_t seed) {
  return random_library(scheme.params(), seed);
}

MessageLibrary zero_library_for(const Scheme& scheme) {
  MessageLibrary lib;
  lib.params = scheme.params();
  lib.messages.assign(2, BitVector(scheme.params().message_len));
  return lib;
}

bool is_row_of(const BitVector& v, const BitMatrix& m) {
  for (int r = 0; r < m.rows(); ++r)
    if (m.row(r) == v) return true;
  return false;
}

}  // namespace

TEST_CASE("cia1 placement stores the paper's cache combinations") {
  auto scheme = cia1_scheme(2, 4);
  CHECK(scheme->params().cache_size == Rat(1, 4));
  auto lib = library_for(*scheme, 3);
  auto caches = scheme->place(lib);
  REQUIRE(caches.size() == 2);
  CHECK(caches[0].stored_bits.size() == 1);
  CHECK(caches[0].stored_bits.get(0) == (lib.messages[0].get(0) ^ lib.messages[1].get(0)));
  CHECK(caches[1].stored_bits.get(0) == (lib.messages[0].get(2) ^ lib.messages[1].get(2)));

  auto scheme3 = cia1_scheme(3, 6);
  auto lib3 = library_for(*scheme3, 4);
  auto caches3 = scheme3->place(lib3);
  CHECK(caches3[0].stored_bits.size() == 2);
  for (int j = 0; j < 2; ++j) {
    CHECK(caches3[0].stored_bits.get(j) == (lib3.messages[0].get(j) ^ lib3.messages[1].get(j)));
    CHECK(caches3[1].stored_bits.get(j) == (lib3.messages[0].get(3 + j) ^ lib3.messages[1].get(3 + j)));
  }
  for (int n = 2; n <= 6; ++n) {
    auto s = cia1_scheme(n, 2 * n);
    auto caches_n = s->place(random_library(s->params(), 5));
    for (const auto& c : caches_n) CHECK(c.stored_bits.size() == s->params().cache_bits());
  }
}

TEST_CASE("cia1 coefficients: every vector is a row of Y_N and alignment holds") {
  for (int n = 2; n <= 4; ++n) {
    BitMatrix y = y_matrix(n);
    for (const auto& demand : kAllDemands) {
      Rng rng(static_cast<std::uint64_t>(n) * 100 + 7);
      for (int trial = 0; trial < 20; ++trial) {
        auto c = cia1_coefficients(demand, n, rng);
        for (int i = 0; i < n - 1; ++i)
          for (int j = 0; j < 2; ++j) {
            CHECK(is_row_of(c.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], y));
            CHECK(is_row_of(c.v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], y));
          }
        for (const auto& g : c.g) CHECK(is_row_of(g, y));
        CHECK(check_alignment_cia1(c, demand));
        CHECK(check_fullrank_cia1(c, demand));
      }
    }
  }
}

TEST_CASE("cia1 alignment for (1,2) pins u_{n,1} to g_1") {
  DemandVector d{{1, 2}};
  for (std::uint64_t r = 0; r < cia_realization_count(3); ++r) {
    auto c = cia1_coefficients_at(d, 3, r);
    for (const auto& pair : c.u) CHECK(pair[0] == c.g[0]);
    for (const auto& pair : c.v) CHECK(pair[1] == c.g[3]);
  }
}

TEST_CASE("cia1 DB1 coefficient tuple is uniform over (rows of Y_2)^4") {
  // 16 equiprobable realizations map bijectively onto the 16 possible
  // (u_11, u_12, v_11, v_12) tuples, for every demand.
  for (const auto& demand : kAllDemands) {
    std::set<std::string> seen;
    for (std::uint64_t r = 0; r < 16; ++r) {
      auto c = cia1_coefficients_at(demand, 2, r);
      std::string key;
      for (int bit = 0; bit < 2; ++bit) {
        key += std::to_string(c.u[0][static_cast<std::size_t>(bit)].get(0));
        key += std::to_string(c.u[0][static_cast<std::size_t>(bit)].get(1));
        key += std::to_string(c.v[0][static_cast<std::size_t>(bit)].get(0));
        key += std::to_string(c.v[0][static_cast<std::size_t>(bit)].get(1));
      }
      seen.insert(key);
    }
    CHECK(seen.size() == 16);
  }
}

TEST_CASE("cia1 answers: 2N+2 bits, exact load, zero library") {
  for (int n = 2; n <= 6; ++n) {
    auto scheme = cia1_scheme(n, 2 * n);
    auto lib = library_for(*scheme, 17);
    Transcript t = run_transcript(*scheme, lib, DemandVector{{1, 2}}, 9);
    CHECK(t.download_bits == 2 * n + 2);
    CHECK(t.load == Rat(n + 1, n));
  }
  auto scheme = cia1_scheme(2, 4);
  Transcript t = run_transcript(*scheme, zero_library_for(*scheme), DemandVector{{1, 2}}, 1);
  for (const auto& a : t.answers) CHECK(a.bits.is_zero());
  for (const auto& d : t.decoded) CHECK(d.is_zero());
}

TEST_CASE("cia1 decodes every demand over all 16 realizations (N=2)") {
  auto scheme = cia1_scheme(2, 4);
  for (std::uint64_t lib_seed = 0; lib_seed < 5; ++lib_seed) {
    auto lib = library_for(*scheme, lib_seed + 100);
    for (const auto& demand : kAllDemands) {
      for (std::uint64_t r = 0; r < 16; ++r) {
        Transcript t = run_transcript_at(*scheme, lib, demand, r);
        for (int u = 0; u < 2; ++u)
          CHECK(t.decoded[static_cast<std::size_t>(u)] ==
                lib.messages[static_cast<std::size_t>(demand.message_index(u))]);
      }
    }
  }
}

TEST_CASE("cia1 full-rank check rejects a tampered g_2") {
  DemandVector d{{1, 2}};
  int rejected = 0;
  for (std::uint64_t r = 0; r < 16; ++r) {
    auto c = cia1_coefficients_at(d, 2, r);
    c.g[1].flip(0);
    if (!check_fullrank_cia1(c, d) || !check_alignment_cia1(c, d)) ++rejected;
  }
  CHECK(rejected > 0);
}

TEST_CASE("cia2 placement stores uncoded halves") {
  auto scheme = cia2_scheme(2, 3);
  CHECK(scheme->params().cache_size == Rat(2, 3));
  auto lib = library_for(*scheme, 23);
  auto caches = scheme->place(lib);
  CHECK(caches[0].stored_bits.to_bits() ==
        std::vector<int>{lib.messages[0].get(0), lib.messages[1].get(0)});
  CHECK(caches[1].stored_bits.to_bits() ==
        std::vector<int>{lib.messages[0].get(1), lib.messages[1].get(1)});

  auto scheme3 = cia2_scheme(3, 5);
  auto lib3 = library_for(*scheme3, 24);
  auto caches3 = scheme3->place(lib3);
  CHECK(caches3[0].stored_bits.to_bits() ==
        std::vector<int>{lib3.messages[0].get(0), lib3.messages[0].get(1), lib3.messages[1].get(0),
                         lib3.messages[1].get(1)});
  CHECK(caches3[1].stored_bits.to_bits() ==
        std::vector<int>{lib3.messages[0].get(2), lib3.messages[0].get(3), lib3.messages[1].get(2),
                         lib3.messages[1].get(3)});
  for (int n = 2; n <= 6; ++n)
    CHECK(cia2_scheme(n, 2 * n - 1)->params().cache_bits() == 2 * (n - 1));
}

TEST_CASE("cia2 coefficients end in 1 and satisfy the demand conditions") {
  for (int n = 2; n <= 4; ++n) {
    for (const auto& demand : kAllDemands) {
      Rng rng(static_cast<std::uint64_t>(n) * 31 + 1);
      for (int trial = 0; trial < 20; ++trial) {
        auto c = cia2_coefficients(demand, n, rng);
        long long last = 2 * n - 2;
        for (const auto& v : c.u) CHECK(v.get(last) == 1);
        for (const auto& v : c.v) CHECK(v.get(last) == 1);
        CHECK(c.g1.get(last) == 1);
        CHECK(c.g2.get(last) == 1);
        CHECK(check_alignment_cia2(c, demand));
        CHECK(check_fullrank_cia2(c, demand));
      }
    }
  }
}

TEST_CASE("cia2 N=2 free coefficients are uniform bits") {
  // g_{1,1} and g_{2,2} are i.i.d. uniform over {0,1} for demand (1,2).
  DemandVector d{{1, 2}};
  std::map<std::pair<int, int>, int> hist;
  for (std::uint64_t r = 0; r < 16; ++r) {
    auto c = cia2_coefficients_at(d, 2, r);
    ++hist[{c.g1.get(0), c.g2.get(1)}];
  }
  REQUIRE(hist.size() == 4);
  for (const auto& [key, count] : hist) CHECK(count == 4);
  CHECK(cia_realization_count(2) == 16);
}

TEST_CASE("cia2 answers: N+1 bits and exact load") {
  for (int n = 2; n <= 6; ++n) {
    auto scheme = cia2_scheme(n, 2 * n - 1);
    auto lib = library_for(*scheme, 31);
    Transcript t = run_transcript(*scheme, lib, DemandVector{{2, 1}}, 5);
    CHECK(t.download_bits == n + 1);
    CHECK(t.load == Rat(n + 1, 2 * n - 1));
  }
  auto scheme = cia2_scheme(2, 3);
  Transcript t = run_transcript(*scheme, zero_library_for(*scheme), DemandVector{{1, 2}}, 2);
  for (const auto& a : t.answers) CHECK(a.bits.is_zero());
  for (const auto& d : t.decoded) CHECK(d.is_zero());
}

TEST_CASE("cia2 decodes every demand over all 16 realizations (N=2)") {
  auto scheme = cia2_scheme(2, 3);
  for (std::uint64_t lib_seed = 0; lib_seed < 5; ++lib_seed) {
    auto lib = library_for(*scheme, lib_seed + 40);
    for (const auto& demand : kAllDemands) {
      for (std::uint64_t r = 0; r < 16; ++r) {
        Transcript t = run_transcript_at(*scheme, lib, demand, r);
        for (int u = 0; u < 2; ++u)
          CHECK(t.decoded[static_cast<std::size_t>(u)] ==
                lib.messages[static_cast<std::size_t>(demand.message_index(u))]);
      }
    }
  }
}

TEST_CASE("multi-block repetition keeps rate and decodes") {
  auto scheme = cia1_scheme(2, 12);  // three blocks
  auto lib = library_for(*scheme, 77);
  for (const auto& demand : kAllDemands) {
    Transcript t = run_transcript(*scheme, lib, demand, 13);
    CHECK(t.load == Rat(3, 2));
    for (int u = 0; u < 2; ++u)
      CHECK(t.decoded[static_cast<std::size_t>(u)] ==
            lib.messages[static_cast<std::size_t>(demand.message_index(u))]);
  }
  CHECK(scheme->realization_count(DemandVector{{1, 2}}) == 0);

  auto scheme2 = cia2_scheme(3, 10);  // two blocks of 5
  auto lib2 = library_for(*scheme2, 78);
  Transcript t2 = run_transcript(*scheme2, lib2, DemandVector{{2, 2}}, 21);
  CHECK(t2.load == Rat(4, 5));
  CHECK(t2.decoded[0] == lib2.messages[1]);
}

TEST_CASE("cia parameter validation") {
  CHECK_THROWS_AS(cia1_scheme(1, 2), InvalidParameter);
  CHECK_THROWS_AS(cia1_scheme(2, 5), IndivisibleLength);
  CHECK_THROWS_AS(cia2_scheme(2, 4), IndivisibleLength);
  auto scheme = cia1_scheme(2, 4);
  CHECK_THROWS_AS(scheme->queries_seeded(DemandVector{{3, 1}}, 0), InvalidDemand);
  CHECK_THROWS_AS(scheme->queries_seeded(DemandVector{{1}}, 0), InvalidDemand);
}

TEST_CASE("cia transcripts are deterministic in the seed") {
  auto scheme = cia1_scheme(3, 6);
  auto lib = library_for(*scheme, 5);
  DemandVector d{{2, 1}};
  CHECK(transcript_to_json(run_transcript(*scheme, lib, d, 42)) ==
        transcript_to_json(run_transcript(*scheme, lib, d, 42)));
  CHECK(transcript_to_json(run_transcript(*scheme, lib, d, 42)) !=
        transcript_to_json(run_transcript(*scheme, lib, d, 43)));
}
