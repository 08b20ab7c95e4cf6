#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "mupir/rational.hpp"
#include "mupir/system.hpp"

namespace mupir {

// Piecewise-linear memory-load function given by its corner points, with
// M strictly increasing and R non-increasing.
struct RateCurve {
  std::vector<std::pair<Rat, Rat>> corners;

  explicit RateCurve(std::vector<std::pair<Rat, Rat>> points);
  Rat eval(const Rat& memory) const;  // OutOfRange outside the corner span
};

// Lower convex envelope of a finite point set, as a RateCurve over
// [min x, max x].
RateCurve lower_convex_envelope(std::vector<std::pair<Rat, Rat>> points);

// 1 + 1/N + ... + 1/N^(K-1), the single-user PIR rate factor.
Rat sj_rate_factor(int num_messages, int num_dbs);

// Achievable load of the interference-alignment scheme for K = Ku = 2:
// three segments meeting at (N-1)/(2N) and 2(N-1)/(2N-1).
Rat cia_load(const Rat& memory, int num_dbs);

// Optimal load under uncoded placement for K = Ku = 2.
Rat uncoded_optimal_load(const Rat& memory, int num_dbs);

// Product design load: min of the full-replication line K - M and the lower
// convex envelope of the integer-t corner points augmented with (0, K).
Rat pd_load(int num_messages, int num_users, int num_dbs, const Rat& memory);
RateCurve pd_envelope(int num_messages, int num_users, int num_dbs);

// Optimal distinct-demand trade-off for K = Ku = N = 2.
Rat distinct_optimal_load(const Rat& memory);

// Single-user cache-aided PIR converse: (1 - M/K)(1 + 1/N + ... + 1/N^(K-1)).
Rat single_user_pir_bound(int num_messages, int num_dbs, const Rat& memory);

// Quarter-scaled coded-caching converse: lower convex envelope over the
// integer grid t in {0,...,Ku} of (1/4) min{(Ku-t)/(t+1), K(1 - M/K)}.
// The t = 0 grid point is included so the bound is positive near M = 0.
Rat caching_converse_quarter(int num_messages, int num_users, int num_dbs, const Rat& memory);
RateCurve caching_converse_quarter_envelope(int num_messages, int num_users, int num_dbs);

// Best-known caching converse for K = Ku = 6: the lower convex envelope of
// {((7-l)/s, (s-1)/2 + l(l-1)/(2s)) : s in [1,6], l in [1,s]} plus (0, 6).
Rat yu_bound_6x6(const Rat& memory);

// Memory sharing: splits every message into a lambda-fraction prefix served
// by scheme A and a suffix served by scheme B, with independent randomness.
// lambda in {0, 1} returns the corresponding endpoint scheme unchanged.
using SchemeFactory = std::function<SchemePtr(long long message_len)>;
SchemePtr memory_share(const SchemeFactory& scheme_a, const SchemeFactory& scheme_b, const Rat& lambda,
                       long long total_len);

}  // namespace mupir
