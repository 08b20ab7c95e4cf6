#include "mupir/audit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <future>
#include <json.hpp>
#include <thread>

#include "mupir/errors.hpp"

namespace mupir {

namespace {

constexpr std::size_t kMaxStoredFailures = 8;
constexpr int kSampledBuckets = 32;
constexpr std::uint64_t kMinSampleSize = 100000;

// Partition [0, total) into chunks and run the worker on each, merging the
// per-chunk results in index order so output does not depend on scheduling.
template <typename Result, typename Worker>
std::vector<Result> run_chunked(std::uint64_t total, const Worker& worker) {
  unsigned threads = std::thread::hardware_concurrency();
  std::uint64_t chunk = 250000;
  if (threads <= 1 || total <= chunk) return {worker(0, total)};
  std::vector<std::future<Result>> futures;
  for (std::uint64_t begin = 0; begin < total; begin += chunk) {
    std::uint64_t end = std::min(begin + chunk, total);
    futures.push_back(std::async(std::launch::async, [&worker, begin, end] { return worker(begin, end); }));
  }
  std::vector<Result> results;
  results.reserve(futures.size());
  for (auto& f : futures) results.push_back(f.get());
  return results;
}

}  // namespace

CorrectnessReport verify_correctness(const Scheme& scheme, const MessageLibrary& lib,
                                     const std::vector<DemandVector>& demand_set,
                                     const RandomnessSweep& sweep, std::uint64_t seed) {
  lib.validate();
  CorrectnessReport report;
  auto check = [&](const DemandVector& demand, const Transcript& t, std::uint64_t realization) {
    ++report.cases;
    for (int u = 0; u < scheme.params().num_users; ++u) {
      const BitVector& expected = lib.messages[static_cast<std::size_t>(demand.message_index(u))];
      if (t.decoded[static_cast<std::size_t>(u)] == expected) continue;
      ++report.failure_count;
      if (report.failures.size() < kMaxStoredFailures)
        report.failures.push_back({demand, realization, u, t});
    }
  };
  for (const auto& demand : demand_set) {
    if (sweep.exhaustive) {
      std::uint64_t count = scheme.realization_count(demand);
      if (count == 0) throw NotEnumerable("exhaustive correctness sweep needs an enumerable scheme");
      for (std::uint64_t r = 0; r < count; ++r) {
        try {
          check(demand, run_transcript_at(scheme, lib, demand, r), r);
        } catch (const DecodeFailure&) {
          ++report.cases;
          ++report.failure_count;
        }
      }
    } else {
      for (std::uint64_t i = 0; i < sweep.samples; ++i) {
        std::uint64_t s = Rng::derive(seed, "correctness/" + demand.to_string() + "/" + std::to_string(i));
        try {
          check(demand, run_transcript(scheme, lib, demand, s), s);
        } catch (const DecodeFailure&) {
          ++report.cases;
          ++report.failure_count;
        }
      }
    }
  }
  return report;
}

namespace {

using CountMap = std::map<std::string, std::uint64_t>;

Rat max_pairwise_tv(const std::vector<CountMap>& counts, std::uint64_t total) {
  Rat worst(0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = i + 1; j < counts.size(); ++j) {
      long long diff_sum = 0;
      auto it_a = counts[i].begin();
      auto it_b = counts[j].begin();
      while (it_a != counts[i].end() || it_b != counts[j].end()) {
        if (it_b == counts[j].end() || (it_a != counts[i].end() && it_a->first < it_b->first)) {
          diff_sum += static_cast<long long>(it_a->second);
          ++it_a;
        } else if (it_a == counts[i].end() || it_b->first < it_a->first) {
          diff_sum += static_cast<long long>(it_b->second);
          ++it_b;
        } else {
          diff_sum += std::abs(static_cast<long long>(it_a->second) - static_cast<long long>(it_b->second));
          ++it_a;
          ++it_b;
        }
      }
      Rat tv(diff_sum, 2 * static_cast<long long>(total));
      worst = std::max(worst, tv);
    }
  }
  return worst;
}

std::size_t bucket_of(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return static_cast<std::size_t>(h % kSampledBuckets);
}

}  // namespace

PrivacyReport audit_privacy(const Scheme& scheme, int db, const std::vector<DemandVector>& demand_set,
                            AuditMode mode, std::uint64_t seed, std::uint64_t samples, double threshold) {
  PrivacyReport report;
  report.scheme = scheme.name();
  report.db = db;
  if (demand_set.size() < 2) throw InvalidParameter("privacy audit needs at least two demands");

  if (mode == AuditMode::kExhaustive) {
    report.mode = "exhaustive";
    std::vector<CountMap> counts;
    std::uint64_t total = scheme.realization_count(demand_set.front());
    for (const auto& demand : demand_set) {
      std::uint64_t count = scheme.realization_count(demand);
      if (count == 0) throw NotEnumerable("exhaustive privacy audit needs an enumerable scheme");
      if (count != total) throw ParamMismatch("realization counts differ across demands");
      auto chunks = run_chunked<CountMap>(count, [&](std::uint64_t begin, std::uint64_t end) {
        CountMap local;
        for (std::uint64_t r = begin; r < end; ++r) {
          auto queries = scheme.queries_at(demand, r);
          ++local[canonical_query_bytes(queries.at(static_cast<std::size_t>(db)))];
        }
        return local;
      });
      CountMap merged = std::move(chunks.front());
      for (std::size_t i = 1; i < chunks.size(); ++i)
        for (const auto& [k, v] : chunks[i]) merged[k] += v;
      counts.push_back(std::move(merged));
    }
    for (std::size_t i = 0; i < demand_set.size(); ++i) {
      auto& dist = report.per_theta_distributions[demand_set[i].to_string()];
      for (const auto& [bytes, c] : counts[i]) dist[bytes] = Rat(static_cast<long long>(c), static_cast<long long>(total));
    }
    report.distance = max_pairwise_tv(counts, total);
    report.pass = report.distance == Rat(0);
    return report;
  }

  report.mode = "sampled";
  if (samples < kMinSampleSize) throw InvalidParameter("sampled privacy audit needs at least 1e5 samples");
  std::vector<std::array<std::uint64_t, kSampledBuckets>> buckets(demand_set.size());
  for (auto& b : buckets) b.fill(0);
  for (std::size_t d = 0; d < demand_set.size(); ++d) {
    for (std::uint64_t i = 0; i < samples; ++i) {
      std::uint64_t s = Rng::derive(seed, "privacy/" + demand_set[d].to_string() + "/" + std::to_string(i));
      auto queries = scheme.queries_seeded(demand_set[d], s);
      ++buckets[d][bucket_of(canonical_query_bytes(queries.at(static_cast<std::size_t>(db))))];
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    for (std::size_t j = i + 1; j < buckets.size(); ++j) {
      double tv = 0.0;
      for (int b = 0; b < kSampledBuckets; ++b)
        tv += std::abs(static_cast<double>(buckets[i][static_cast<std::size_t>(b)]) -
                       static_cast<double>(buckets[j][static_cast<std::size_t>(b)]));
      tv /= 2.0 * static_cast<double>(samples);
      worst = std::max(worst, tv);
    }
  }
  report.distance_estimate = worst;
  report.pass = worst <= threshold;
  return report;
}

std::string PrivacyReport::to_json() const {
  nlohmann::ordered_json j;
  j["scheme"] = scheme;
  j["db"] = db + 1;
  j["mode"] = mode;
  if (mode == "exhaustive")
    j["distance"] = rat_to_string(distance);
  else
    j["distance"] = distance_estimate;
  j["verdict"] = pass ? "pass" : "fail";
  j["counterexample"] = nullptr;
  return j.dump();
}

LoadReport measure_load(const Scheme& scheme, const MessageLibrary& lib,
                        const std::vector<DemandVector>& demand_set, std::uint64_t seed) {
  constexpr std::uint64_t kExhaustiveCap = 4096;
  constexpr std::uint64_t kSeededDraws = 8;
  LoadReport report;
  report.uniform = true;
  for (const auto& demand : demand_set) {
    std::uint64_t count = scheme.realization_count(demand);
    std::vector<Rat> loads;
    if (count != 0 && count <= kExhaustiveCap) {
      for (std::uint64_t r = 0; r < count; ++r)
        loads.push_back(run_transcript_at(scheme, lib, demand, r).load);
    } else {
      for (std::uint64_t i = 0; i < kSeededDraws; ++i) {
        std::uint64_t s = Rng::derive(seed, "load/" + demand.to_string() + "/" + std::to_string(i));
        loads.push_back(run_transcript(scheme, lib, demand, s).load);
      }
    }
    for (const auto& l : loads)
      if (l != loads.front()) report.uniform = false;
    report.loads.emplace_back(demand, loads.front());
  }
  for (const auto& [demand, load] : report.loads)
    if (load != report.loads.front().second) report.uniform = false;
  return report;
}

}  // namespace mupir
