#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "mupir/audit.hpp"
#include "mupir/errors.hpp"
#include "mupir/system.hpp"

using namespace mupir;

namespace {

SystemParams naive_params(int num_messages, long long len, Rat m) {
  SystemParams p;
  p.num_messages = num_messages;
  p.num_users = 2;
  p.num_dbs = 2;
  p.message_len = len;
  p.cache_size = m;
  return p;
}

}  // namespace

TEST_CASE("demand enumeration") {
  auto all = all_demands(2, 2);
  REQUIRE(all.size() == 4);
  CHECK(all[0].thetas == std::vector<int>{1, 1});
  CHECK(all[3].thetas == std::vector<int>{2, 2});
  auto distinct = distinct_demands(2, 2);
  REQUIRE(distinct.size() == 2);
  CHECK(distinct[0].thetas == std::vector<int>{1, 2});
  CHECK(distinct[1].thetas == std::vector<int>{2, 1});
}

TEST_CASE("naive scheme flow") {
  auto params = naive_params(2, 4, Rat(0));
  auto scheme = naive_scheme(params);
  auto lib = random_library(params, 7);
  DemandVector theta{{1, 2}};
  Transcript t = run_transcript(*scheme, lib, theta, 3);
  CHECK(t.download_bits == 8);
  CHECK(t.load == Rat(2));
  CHECK(t.decoded[0] == lib.messages[0]);
  CHECK(t.decoded[1] == lib.messages[1]);
  for (const auto& c : t.caches) CHECK(c.stored_bits.size() == 0);

  // M = 1 caches half of each message; load drops to K - M = 1.
  auto half = naive_scheme(naive_params(2, 4, Rat(1)));
  Transcript t2 = run_transcript(*half, lib, theta, 3);
  CHECK(t2.load == Rat(1));
  CHECK(t2.decoded[0] == lib.messages[0]);
  CHECK(t2.caches[0].stored_bits.size() == 4);
}

TEST_CASE("cache descriptions reproduce stored bits") {
  auto params = naive_params(2, 6, Rat(1));
  auto scheme = naive_scheme(params);
  auto lib = random_library(params, 11);
  for (const auto& c : scheme->place(lib))
    CHECK(evaluate_cache_description(c.description, lib) == c.stored_bits);
}

TEST_CASE("transcript json shape and determinism") {
  auto params = naive_params(2, 4, Rat(0));
  auto scheme = naive_scheme(params);
  auto lib = random_library(params, 7);
  DemandVector theta{{2, 1}};
  std::string a = transcript_to_json(run_transcript(*scheme, lib, theta, 5));
  std::string b = transcript_to_json(run_transcript(*scheme, lib, theta, 5));
  CHECK(a == b);
  auto j = nlohmann::ordered_json::parse(a);
  auto it = j.begin();
  CHECK(it.key() == "params");
  CHECK(j["load"] == "2/1");
  CHECK(j["demand"] == std::vector<int>{2, 1});
  CHECK(j["download_bits"] == 8);
}

TEST_CASE("canonical query bytes round trip") {
  auto params = naive_params(2, 4, Rat(0));
  auto scheme = strawman_scheme(params);
  DemandVector theta{{1, 2}};
  auto queries = scheme->queries_at(theta, 0);
  for (const auto& q : queries) {
    CHECK(canonical_query_bytes(q) == canonical_query_bytes(q));
    Query parsed = parse_query_bytes(canonical_query_bytes(q));
    CHECK(parsed == q);
  }
  // The strawman leaks the demand: different demands give different bytes.
  auto other = scheme->queries_at(DemandVector{{2, 2}}, 0);
  CHECK(canonical_query_bytes(queries[0]) != canonical_query_bytes(other[0]));
}

TEST_CASE("strawman fails the exhaustive privacy audit with distance 1") {
  auto scheme = strawman_scheme(naive_params(2, 4, Rat(0)));
  auto report = audit_privacy(*scheme, 0, scheme->demand_set(), AuditMode::kExhaustive, 1);
  CHECK(!report.pass);
  CHECK(report.distance == Rat(1));
  CHECK(report.to_json().find("\"verdict\":\"fail\"") != std::string::npos);
}

TEST_CASE("naive scheme passes the exhaustive privacy audit") {
  auto scheme = naive_scheme(naive_params(2, 4, Rat(0)));
  for (int db = 0; db < 2; ++db) {
    auto report = audit_privacy(*scheme, db, scheme->demand_set(), AuditMode::kExhaustive, 1);
    CHECK(report.pass);
    CHECK(report.distance == Rat(0));
  }
}

TEST_CASE("measure_load flags demand-dependent download") {
  auto params = naive_params(2, 4, Rat(0));
  auto scheme = naive_scheme(params);
  auto lib = random_library(params, 9);
  auto report = measure_load(*scheme, lib, scheme->demand_set(), 2);
  CHECK(report.uniform);
  for (const auto& [demand, load] : report.loads) CHECK(load == Rat(2));
}

TEST_CASE("fault injection: corrupted answers are reported with the transcript") {
  // A scheme wrapper that flips one answer bit must fail verify_correctness.
  class Corrupted : public Scheme {
   public:
    explicit Corrupted(SchemePtr inner) : inner_(std::move(inner)) {}
    std::string name() const override { return inner_->name(); }
    const SystemParams& params() const override { return inner_->params(); }
    std::vector<CacheContent> place(const MessageLibrary& lib) const override { return inner_->place(lib); }
    std::uint64_t realization_count(const DemandVector& d) const override {
      return inner_->realization_count(d);
    }
    std::vector<Query> queries_at(const DemandVector& d, std::uint64_t r) const override {
      return inner_->queries_at(d, r);
    }
    Answer answer(const Query& q, const MessageLibrary& lib) const override {
      Answer a = inner_->answer(q, lib);
      if (q.db == 0 && a.bits.size() > 0) a.bits.flip(0);
      return a;
    }
    BitVector decode(int user, const DemandVector& d, const std::vector<Query>& qs,
                     const std::vector<Answer>& as, const CacheContent& cache) const override {
      return inner_->decode(user, d, qs, as, cache);
    }

   private:
    SchemePtr inner_;
  };

  auto params = naive_params(2, 4, Rat(0));
  Corrupted corrupted(naive_scheme(params));
  auto lib = random_library(params, 21);
  auto report = verify_correctness(corrupted, lib, corrupted.demand_set(), RandomnessSweep::Exhaustive(), 1);
  CHECK(!report.pass());
  REQUIRE(!report.failures.empty());
  CHECK(report.failures.front().transcript.decoded[0] !=
        lib.messages[static_cast<std::size_t>(report.failures.front().demand.message_index(0))]);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(naive_scheme(naive_params(2, 4, Rat(1, 3))), ParamMismatch);
  SystemParams bad = naive_params(2, 4, Rat(0));
  bad.num_dbs = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
}
