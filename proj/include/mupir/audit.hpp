#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mupir/rational.hpp"
#include "mupir/system.hpp"

namespace mupir {

enum class AuditMode { kExhaustive, kSampled };

struct RandomnessSweep {
  bool exhaustive = true;
  std::uint64_t samples = 0;

  static RandomnessSweep Exhaustive() { return {true, 0}; }
  static RandomnessSweep Sampled(std::uint64_t count) { return {false, count}; }
};

struct CorrectnessFailure {
  DemandVector demand;
  std::uint64_t realization = 0;
  int user = 0;
  Transcript transcript;
};

struct CorrectnessReport {
  std::uint64_t cases = 0;
  std::uint64_t failure_count = 0;
  std::vector<CorrectnessFailure> failures;  // capped sample of the failures

  bool pass() const { return failure_count == 0; }
};

// Runs transcripts over demand_set x randomness and checks that every user
// decodes its demanded message exactly. Decode errors count as failures.
CorrectnessReport verify_correctness(const Scheme& scheme, const MessageLibrary& lib,
                                     const std::vector<DemandVector>& demand_set,
                                     const RandomnessSweep& sweep, std::uint64_t seed);

struct PrivacyReport {
  std::string scheme;
  int db = 0;  // 0-based
  std::string mode;
  // demand -> canonical query bytes -> exact probability (exhaustive mode).
  std::map<std::string, std::map<std::string, Rat>> per_theta_distributions;
  Rat distance;                    // exhaustive: exact max pairwise TV distance
  double distance_estimate = 0.0;  // sampled: bucketed plug-in estimate
  bool pass = false;

  std::string to_json() const;
};

// Exhaustive mode computes each demand's exact query distribution at one
// database from the enumerable randomness domain and passes iff all
// distributions are identical (total-variation distance exactly zero).
// Sampled mode draws `samples` query sets per demand and estimates the
// total-variation distance on a 32-bucket hash projection of the canonical
// query bytes (a lower bound on the true distance; the raw empirical TV
// is degenerate for large query spaces). Pass iff the estimate stays below
// `threshold` with at least 10^5 samples per demand.
PrivacyReport audit_privacy(const Scheme& scheme, int db, const std::vector<DemandVector>& demand_set,
                            AuditMode mode, std::uint64_t seed, std::uint64_t samples = 100000,
                            double threshold = 0.02);

struct LoadReport {
  std::vector<std::pair<DemandVector, Rat>> loads;
  bool uniform = false;
};

// Exact per-demand load D/L, checked for uniformity across the demand set
// (and across realizations within each demand).
LoadReport measure_load(const Scheme& scheme, const MessageLibrary& lib,
                        const std::vector<DemandVector>& demand_set, std::uint64_t seed);

}  // namespace mupir
