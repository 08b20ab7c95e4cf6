#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "mupir/audit.hpp"
#include "mupir/combin.hpp"
#include "mupir/errors.hpp"
#include "mupir/rational.hpp"
#include "mupir/sjpir.hpp"

using namespace mupir;

namespace {

std::vector<BitVector> random_messages(int count, long long len, Rng& rng) {
  std::vector<BitVector> msgs;
  for (int k = 0; k < count; ++k) {
    BitVector m(len);
    for (long long i = 0; i < len; ++i) m.set(i, static_cast<int>(rng.next_below(2)));
    msgs.push_back(std::move(m));
  }
  return msgs;
}

std::vector<std::vector<long long>> identity_perms(int count, long long len) {
  std::vector<std::vector<long long>> perms(static_cast<std::size_t>(count));
  for (auto& p : perms)
    for (long long i = 0; i < len; ++i) p.push_back(i);
  return perms;
}

}  // namespace

TEST_CASE("per-db download counts") {
  CHECK(sj_download_per_db(2, 2) == 3);
  CHECK(sj_download_per_db(3, 2) == 7);
  CHECK(sj_download_per_db(1, 2) == 1);
  // N * per_db / N^K equals the rate factor 1 + 1/N + ... + 1/N^(K-1).
  for (int k = 1; k <= 5; ++k)
    for (int n = 2; n <= 5; ++n) {
      Rat measured(n * sj_download_per_db(k, n), sj_symbols(k, n));
      Rat factor(0);
      for (int i = 0; i < k; ++i) factor += Rat(1, int_pow(n, i));
      CHECK(measured == factor);
    }
}

TEST_CASE("plan structure matches the counting identities") {
  for (int k = 1; k <= 4; ++k)
    for (int n = 2; n <= 3; ++n)
      for (int theta = 0; theta < k; ++theta) {
        Rng rng(static_cast<std::uint64_t>(k * 10 + n));
        SjPlan plan = sj_plan(k, n, theta, rng);
        long long demanded = 0;
        std::vector<bool> seen(static_cast<std::size_t>(plan.symbols), false);
        for (int db = 0; db < n; ++db) {
          const auto& atoms = plan.per_db[static_cast<std::size_t>(db)];
          CHECK(static_cast<long long>(atoms.size()) == sj_download_per_db(k, n));
          // Message symmetry: per block size, every subset appears
          // (N-1)^(size-1) times.
          std::map<std::vector<int>, long long> subset_count;
          for (const auto& a : atoms) ++subset_count[a.messages];
          for (const auto& [subset, count] : subset_count)
            CHECK(count == int_pow(n - 1, static_cast<int>(subset.size()) - 1));
          long long expected_subsets = 0;
          for (int size = 1; size <= k; ++size) expected_subsets += binomial(k, size);
          CHECK(static_cast<long long>(subset_count.size()) == expected_subsets);
          // Canonical order: block size ascending, subsets lexicographic.
          for (std::size_t i = 1; i < atoms.size(); ++i) {
            const auto& prev = atoms[i - 1];
            const auto& cur = atoms[i];
            bool ordered = prev.messages.size() < cur.messages.size() ||
                           (prev.messages.size() == cur.messages.size() && prev.messages <= cur.messages);
            CHECK(ordered);
          }
          for (const auto& a : atoms) {
            auto it = std::find(a.messages.begin(), a.messages.end(), theta);
            if (it == a.messages.end()) continue;
            long long idx = a.indices[static_cast<std::size_t>(it - a.messages.begin())];
            ++demanded;
            CHECK(!seen[static_cast<std::size_t>(idx)]);
            seen[static_cast<std::size_t>(idx)] = true;
          }
        }
        // Every demanded symbol appears in exactly one atom across all DBs.
        CHECK(demanded == plan.symbols);
      }
}

TEST_CASE("structural projection is demand-independent") {
  for (int k = 2; k <= 3; ++k)
    for (int n = 2; n <= 3; ++n) {
      std::vector<std::vector<std::string>> projections;
      for (int theta = 0; theta < k; ++theta) {
        Rng rng(91);
        SjPlan plan = sj_plan(k, n, theta, rng);
        std::vector<std::string> per_db;
        for (int db = 0; db < n; ++db)
          per_db.push_back(sj_structural_projection(plan.per_db[static_cast<std::size_t>(db)]));
        projections.push_back(std::move(per_db));
      }
      for (std::size_t theta = 1; theta < projections.size(); ++theta)
        CHECK(projections[theta] == projections[0]);
    }
}

TEST_CASE("hand-traced answers with identity permutations") {
  // K=2, N=2, demand A, A=(1,0,0,0), B=0: only the atom holding A's first
  // symbol evaluates to 1.
  SjPlan plan = sj_plan_with_perms(2, 2, 0, identity_perms(2, 4));
  std::vector<BitVector> msgs{BitVector{1, 0, 0, 0}, BitVector{0, 0, 0, 0}};
  CHECK(sj_answer(plan, 0, msgs).to_bits() == std::vector<int>{1, 0, 0});
  CHECK(sj_answer(plan, 1, msgs).to_bits() == std::vector<int>{0, 0, 0});
  std::vector<BitVector> answers{sj_answer(plan, 0, msgs), sj_answer(plan, 1, msgs)};
  CHECK(sj_decode_plan(plan, answers) == msgs[0]);
}

TEST_CASE("round-trip decode over random libraries and permutations") {
  for (int k = 2; k <= 3; ++k)
    for (int n = 2; n <= 3; ++n)
      for (int trial = 0; trial < 25; ++trial) {
        Rng rng(static_cast<std::uint64_t>(1000 * k + 100 * n + trial));
        int theta = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k)));
        SjPlan plan = sj_plan(k, n, theta, rng);
        auto msgs = random_messages(k, plan.symbols, rng);
        std::vector<BitVector> answers;
        for (int db = 0; db < n; ++db) answers.push_back(sj_answer(plan, db, msgs));
        CHECK(sj_decode_plan(plan, answers) == msgs[static_cast<std::size_t>(theta)]);
      }
}

TEST_CASE("all-zero library and K=1 degenerate cases") {
  Rng rng(4);
  SjPlan plan = sj_plan(2, 2, 1, rng);
  std::vector<BitVector> zero{BitVector(4), BitVector(4)};
  std::vector<BitVector> answers{sj_answer(plan, 0, zero), sj_answer(plan, 1, zero)};
  CHECK(sj_decode_plan(plan, answers).is_zero());

  // K = 1: one fresh symbol of the single message per DB; direct decode.
  Rng rng1(5);
  SjPlan single = sj_plan(1, 3, 0, rng1);
  for (int db = 0; db < 3; ++db) CHECK(single.per_db[static_cast<std::size_t>(db)].size() == 1);
  auto msgs = random_messages(1, 3, rng1);
  std::vector<BitVector> bits;
  for (int db = 0; db < 3; ++db) bits.push_back(sj_answer(single, db, msgs));
  CHECK(sj_decode_plan(single, bits) == msgs[0]);
}

TEST_CASE("sj scheme wrapper: realization space and transcripts") {
  auto scheme = sj_scheme(2, 2);
  CHECK(scheme->realization_count(DemandVector{{1}}) == 576);
  CHECK(sj_realization_count(2, 3) == 362880ull * 362880ull);
  CHECK(sj_realization_count(4, 2) == 0);  // (16!)^4 overflows

  auto lib = random_library(scheme->params(), 8);
  for (int theta = 1; theta <= 2; ++theta) {
    Transcript t = run_transcript(*scheme, lib, DemandVector{{theta}}, 11);
    CHECK(t.download_bits == 6);
    CHECK(t.load == Rat(3, 2));
    CHECK(t.decoded[0] == lib.messages[static_cast<std::size_t>(theta - 1)]);
  }
}

TEST_CASE("sj exhaustive privacy at K=2, N=2") {
  auto scheme = sj_scheme(2, 2);
  for (int db = 0; db < 2; ++db) {
    auto report = audit_privacy(*scheme, db, scheme->demand_set(), AuditMode::kExhaustive, 1);
    CHECK(report.pass);
    CHECK(report.distance == Rat(0));
    // 576 equiprobable realizations collapse onto 144 distinct queries.
    for (const auto& [theta, dist] : report.per_theta_distributions) {
      CHECK(dist.size() == 144);
      for (const auto& [bytes, prob] : dist) CHECK(prob == Rat(1, 144));
    }
  }
}

TEST_CASE("atom json round trip") {
  Rng rng(17);
  SjPlan plan = sj_plan(3, 2, 1, rng);
  for (int db = 0; db < 2; ++db) {
    std::string json = sj_atoms_to_json(plan.per_db[static_cast<std::size_t>(db)]);
    const char* p = json.c_str();
    auto parsed = sj_atoms_from_json_fragment(p);
    CHECK(parsed == plan.per_db[static_cast<std::size_t>(db)]);
  }
}

TEST_CASE("sj parameter validation") {
  CHECK_THROWS_AS(sj_plan_with_perms(0, 2, 0, {}), InvalidParameter);
  CHECK_THROWS_AS(sj_plan_with_perms(2, 1, 0, identity_perms(2, 2)), InvalidParameter);
  Rng rng(3);
  CHECK_THROWS_AS(sj_plan(2, 2, 2, rng), InvalidDemand);
  CHECK_THROWS_AS(sj_plan_at(4, 2, 0, 0), NotEnumerable);
}
