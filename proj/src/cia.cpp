#include "mupir/cia.hpp"

#include <cstring>

#include "mupir/errors.hpp"
#include "mupir/json_util.hpp"

namespace mupir {

namespace {

// Demand cases for K = Ku = 2. Entries are 1-based message indices.
enum DemandCase { kD11 = 0, kD12 = 1, kD21 = 2, kD22 = 3 };

DemandCase demand_case(const DemandVector& d) {
  if (d.thetas.size() != 2) throw InvalidDemand("CIA schemes require exactly two users");
  int t1 = d.thetas[0], t2 = d.thetas[1];
  if (t1 < 1 || t1 > 2 || t2 < 1 || t2 > 2) throw InvalidDemand("CIA schemes require demands in [2]^2");
  return static_cast<DemandCase>((t1 - 1) * 2 + (t2 - 1));
}

const std::vector<BitVector>& y_rows(int n) {
  thread_local std::vector<std::vector<BitVector>> cache;
  if (static_cast<int>(cache.size()) <= n) cache.resize(static_cast<std::size_t>(n) + 1);
  auto& rows = cache[static_cast<std::size_t>(n)];
  if (rows.empty()) {
    BitMatrix y = y_matrix(n);
    for (int i = 0; i < n; ++i) rows.push_back(y.row(i));
  }
  return rows;
}

const std::vector<BitVector>& y_prime_rows(int n) {
  thread_local std::vector<std::vector<BitVector>> cache;
  if (static_cast<int>(cache.size()) <= n) cache.resize(static_cast<std::size_t>(n) + 1);
  auto& rows = cache[static_cast<std::size_t>(n)];
  if (rows.empty()) {
    BitMatrix y = y_prime_matrix(n);
    for (int i = 0; i < n; ++i) rows.push_back(y.row(i));
  }
  return rows;
}

struct RealizationParts {
  int pick1 = 0;
  int pick2 = 0;
  std::vector<int> perm1;
  std::vector<int> perm2;
};

RealizationParts split_realization(int n, std::uint64_t realization) {
  std::uint64_t f = factorial(n);
  if (realization >= cia_realization_count(n)) throw OutOfRange("realization index out of range");
  RealizationParts parts;
  parts.perm2 = unrank_permutation(n, realization % f);
  realization /= f;
  parts.perm1 = unrank_permutation(n, realization % f);
  realization /= f;
  parts.pick2 = static_cast<int>(realization % static_cast<std::uint64_t>(n));
  parts.pick1 = static_cast<int>(realization / static_cast<std::uint64_t>(n));
  return parts;
}

RealizationParts draw_realization(int n, Rng& rng) {
  RealizationParts parts;
  parts.pick1 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
  parts.pick2 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
  parts.perm1 = rng.permutation(n);
  parts.perm2 = rng.permutation(n);
  return parts;
}

}  // namespace

std::uint64_t cia_realization_count(int num_dbs) {
  if (num_dbs < 2) throw InvalidParameter("CIA schemes require N >= 2");
  std::uint64_t f = factorial(num_dbs);
  return static_cast<std::uint64_t>(num_dbs) * static_cast<std::uint64_t>(num_dbs) * f * f;
}

namespace {

Cia1Coefficients cia1_from_parts(const DemandVector& demand, int n, const RealizationParts& parts) {
  const auto& rows = y_rows(n);
  Cia1Coefficients c;
  c.num_dbs = n;
  c.u.resize(static_cast<std::size_t>(n - 1));
  c.v.resize(static_cast<std::size_t>(n - 1));
  auto fill_perm = [&](auto assign_row, const std::vector<int>& perm, BitVector& last) {
    for (int i = 0; i < n - 1; ++i) assign_row(i, rows[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
    last = rows[static_cast<std::size_t>(perm[static_cast<std::size_t>(n - 1)])];
  };
  auto u_col = [&](int j) { return [&, j](int i, const BitVector& r) { c.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = r; }; };
  auto v_col = [&](int j) { return [&, j](int i, const BitVector& r) { c.v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = r; }; };

  switch (demand_case(demand)) {
    case kD12:
      c.g[0] = rows[static_cast<std::size_t>(parts.pick1)];
      c.g[3] = rows[static_cast<std::size_t>(parts.pick2)];
      fill_perm(u_col(1), parts.perm1, c.g[2]);
      fill_perm(v_col(0), parts.perm2, c.g[1]);
      for (int i = 0; i < n - 1; ++i) {
        c.u[static_cast<std::size_t>(i)][0] = c.g[0];
        c.v[static_cast<std::size_t>(i)][1] = c.g[3];
      }
      break;
    case kD11:
      c.g[1] = rows[static_cast<std::size_t>(parts.pick1)];
      c.g[3] = rows[static_cast<std::size_t>(parts.pick2)];
      fill_perm(u_col(0), parts.perm1, c.g[0]);
      fill_perm(u_col(1), parts.perm2, c.g[2]);
      for (int i = 0; i < n - 1; ++i) {
        c.v[static_cast<std::size_t>(i)][0] = c.g[1];
        c.v[static_cast<std::size_t>(i)][1] = c.g[3];
      }
      break;
    case kD21:
      // The (1,2) construction with the two messages' roles swapped:
      // u <-> v, g1 <-> g2, g3 <-> g4.
      c.g[1] = rows[static_cast<std::size_t>(parts.pick1)];
      c.g[2] = rows[static_cast<std::size_t>(parts.pick2)];
      fill_perm(v_col(1), parts.perm1, c.g[3]);
      fill_perm(u_col(0), parts.perm2, c.g[0]);
      for (int i = 0; i < n - 1; ++i) {
        c.v[static_cast<std::size_t>(i)][0] = c.g[1];
        c.u[static_cast<std::size_t>(i)][1] = c.g[2];
      }
      break;
    case kD22:
      // The (1,1) construction under the same message swap.
      c.g[0] = rows[static_cast<std::size_t>(parts.pick1)];
      c.g[2] = rows[static_cast<std::size_t>(parts.pick2)];
      fill_perm(v_col(0), parts.perm1, c.g[1]);
      fill_perm(v_col(1), parts.perm2, c.g[3]);
      for (int i = 0; i < n - 1; ++i) {
        c.u[static_cast<std::size_t>(i)][0] = c.g[0];
        c.u[static_cast<std::size_t>(i)][1] = c.g[2];
      }
      break;
  }
  return c;
}

Cia2Coefficients cia2_from_parts(const DemandVector& demand, int n, const RealizationParts& parts) {
  const auto& rows = y_prime_rows(n);
  int half = n - 1;
  long long len = 2LL * n - 1;
  auto compose = [&](const BitVector& first, const BitVector& second) {
    BitVector out(len);
    for (int i = 0; i < half; ++i) {
      out.set(i, first.get(i));
      out.set(half + i, second.get(i));
    }
    out.set(len - 1, 1);
    return out;
  };

  Cia2Coefficients c;
  c.num_dbs = n;
  c.u.resize(static_cast<std::size_t>(n - 1));
  c.v.resize(static_cast<std::size_t>(n - 1));
  const BitVector& r1 = rows[static_cast<std::size_t>(parts.pick1)];
  const BitVector& r2 = rows[static_cast<std::size_t>(parts.pick2)];
  auto prow = [&](const std::vector<int>& perm, int i) -> const BitVector& {
    return rows[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
  };

  switch (demand_case(demand)) {
    case kD12:
      // g1 first half and g2 second half are the i.i.d. picks; the two
      // permutations fill the u second halves (with g1) and the v first
      // halves (with g2). Alignment copies the picks into every u_n / v_n.
      for (int i = 0; i < n - 1; ++i) {
        c.u[static_cast<std::size_t>(i)] = compose(r1, prow(parts.perm1, i));
        c.v[static_cast<std::size_t>(i)] = compose(prow(parts.perm2, i), r2);
      }
      c.g1 = compose(r1, prow(parts.perm1, n - 1));
      c.g2 = compose(prow(parts.perm2, n - 1), r2);
      break;
    case kD11:
      // Both halves of g2 are picks; the permutations fill both halves of
      // the u_n / g1 stacks. Alignment sets v_n = g2.
      for (int i = 0; i < n - 1; ++i) {
        c.u[static_cast<std::size_t>(i)] = compose(prow(parts.perm2, i), prow(parts.perm1, i));
        c.v[static_cast<std::size_t>(i)] = compose(r2, r1);
      }
      c.g1 = compose(prow(parts.perm2, n - 1), prow(parts.perm1, n - 1));
      c.g2 = compose(r2, r1);
      break;
    case kD21:
      for (int i = 0; i < n - 1; ++i) {
        c.u[static_cast<std::size_t>(i)] = compose(prow(parts.perm1, i), r1);
        c.v[static_cast<std::size_t>(i)] = compose(r2, prow(parts.perm2, i));
      }
      c.g1 = compose(prow(parts.perm1, n - 1), r1);
      c.g2 = compose(r2, prow(parts.perm2, n - 1));
      break;
    case kD22:
      for (int i = 0; i < n - 1; ++i) {
        c.u[static_cast<std::size_t>(i)] = compose(r2, r1);
        c.v[static_cast<std::size_t>(i)] = compose(prow(parts.perm1, i), prow(parts.perm2, i));
      }
      c.g1 = compose(r2, r1);
      c.g2 = compose(prow(parts.perm1, n - 1), prow(parts.perm2, n - 1));
      break;
  }
  return c;
}

}  // namespace

Cia1Coefficients cia1_coefficients_at(const DemandVector& demand, int num_dbs, std::uint64_t realization) {
  return cia1_from_parts(demand, num_dbs, split_realization(num_dbs, realization));
}

Cia1Coefficients cia1_coefficients(const DemandVector& demand, int num_dbs, Rng& rng) {
  return cia1_from_parts(demand, num_dbs, draw_realization(num_dbs, rng));
}

Cia2Coefficients cia2_coefficients_at(const DemandVector& demand, int num_dbs, std::uint64_t realization) {
  return cia2_from_parts(demand, num_dbs, split_realization(num_dbs, realization));
}

Cia2Coefficients cia2_coefficients(const DemandVector& demand, int num_dbs, Rng& rng) {
  return cia2_from_parts(demand, num_dbs, draw_realization(num_dbs, rng));
}

std::vector<BitVector> cia1_answers(const Cia1Coefficients& coeffs, const BitVector& a, const BitVector& b) {
  int n = coeffs.num_dbs;
  if (a.size() != 2 * n || b.size() != 2 * n) throw DimensionMismatch("cia1 block length must be 2N");
  BitVector a1 = a.slice(0, n), a2 = a.slice(n, 2 * n);
  BitVector b1 = b.slice(0, n), b2 = b.slice(n, 2 * n);
  std::vector<BitVector> answers;
  for (int db = 0; db < n - 1; ++db) {
    BitVector bits(2);
    bits.set(0, coeffs.u[static_cast<std::size_t>(db)][0].dot(a1) ^ coeffs.v[static_cast<std::size_t>(db)][0].dot(b1));
    bits.set(1, coeffs.u[static_cast<std::size_t>(db)][1].dot(a2) ^ coeffs.v[static_cast<std::size_t>(db)][1].dot(b2));
    answers.push_back(std::move(bits));
  }
  BitVector last(4);
  last.set(0, coeffs.g[0].dot(a1));
  last.set(1, coeffs.g[1].dot(b1));
  last.set(2, coeffs.g[2].dot(a2));
  last.set(3, coeffs.g[3].dot(b2));
  answers.push_back(std::move(last));
  return answers;
}

std::vector<BitVector> cia2_answers(const Cia2Coefficients& coeffs, const BitVector& a, const BitVector& b) {
  int n = coeffs.num_dbs;
  if (a.size() != 2 * n - 1 || b.size() != 2 * n - 1) throw DimensionMismatch("cia2 block length must be 2N-1");
  std::vector<BitVector> answers;
  for (int db = 0; db < n - 1; ++db) {
    BitVector bits(1);
    bits.set(0, coeffs.u[static_cast<std::size_t>(db)].dot(a) ^ coeffs.v[static_cast<std::size_t>(db)].dot(b));
    answers.push_back(std::move(bits));
  }
  BitVector last(2);
  last.set(0, coeffs.g1.dot(a));
  last.set(1, coeffs.g2.dot(b));
  answers.push_back(std::move(last));
  return answers;
}

namespace {

// Stacks the N-1 identity-block cache rows [I_{N-1}, 0] above one extra row.
BitMatrix identity_block_with(const BitVector& last_row, int n) {
  BitMatrix m(0, n);
  for (int j = 0; j < n - 1; ++j) {
    BitVector e(n);
    e.set(j, 1);
    m.append_row(std::move(e));
  }
  m.append_row(last_row);
  return m;
}

// Stacks the per-database vectors of one answer column above one g row and
// solves against the matching answer differences.
BitVector solve_stack(const std::vector<BitVector>& rows, const BitVector& last_row, const BitVector& rhs) {
  BitMatrix m(0, static_cast<int>(last_row.size()));
  for (const auto& r : rows) m.append_row(r);
  m.append_row(last_row);
  try {
    return solve(m, rhs);
  } catch (const SingularMatrix&) {
    throw DecodeFailure("stacked CIA coefficient matrix is singular");
  }
}

}  // namespace

BitVector cia1_decode(int user, const DemandVector& demand, const Cia1Coefficients& coeffs,
                      const std::vector<BitVector>& answers, const BitVector& cache_bits) {
  int n = coeffs.num_dbs;
  if (static_cast<int>(answers.size()) != n) throw DimensionMismatch("cia1 expects one answer per DB");
  const BitVector& last = answers[static_cast<std::size_t>(n - 1)];
  int an1 = last.get(0), an2 = last.get(1), an3 = last.get(2), an4 = last.get(3);

  auto column_rows = [&](bool use_u, int j) {
    std::vector<BitVector> rows;
    for (int i = 0; i < n - 1; ++i)
      rows.push_back(use_u ? coeffs.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                           : coeffs.v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    return rows;
  };
  auto diff_rhs = [&](int bit_index, int subtract, int final_bit) {
    BitVector rhs(n);
    for (int i = 0; i < n - 1; ++i)
      rhs.set(i, answers[static_cast<std::size_t>(i)].get(bit_index) ^ subtract);
    rhs.set(n - 1, final_bit);
    return rhs;
  };
  // Cache-assisted recovery of one message half: strip the decoded
  // interference from the N-1 cached combinations, then stack the cache
  // coefficient block above the matching g row.
  auto from_cache = [&](const BitVector& known_half, const BitVector& g_row, int g_bit) {
    BitVector rhs(n);
    for (int j = 0; j < n - 1; ++j) rhs.set(j, cache_bits.get(j) ^ known_half.get(j));
    rhs.set(n - 1, g_bit);
    try {
      return solve(identity_block_with(g_row, n), rhs);
    } catch (const SingularMatrix&) {
      throw DecodeFailure("cache-assisted CIA system is singular");
    }
  };

  BitVector out;
  switch (demand_case(demand)) {
    case kD12: {
      BitVector a2 = solve_stack(column_rows(true, 1), coeffs.g[2], diff_rhs(1, an4, an3));
      BitVector b1 = solve_stack(column_rows(false, 0), coeffs.g[1], diff_rhs(0, an1, an2));
      if (user == 0) {
        out = from_cache(b1, coeffs.g[0], an1);
        out.append(a2);
      } else {
        out = b1;
        out.append(from_cache(a2, coeffs.g[3], an4));
      }
      break;
    }
    case kD11: {
      out = solve_stack(column_rows(true, 0), coeffs.g[0], diff_rhs(0, an2, an1));
      out.append(solve_stack(column_rows(true, 1), coeffs.g[2], diff_rhs(1, an4, an3)));
      break;
    }
    case kD21: {
      BitVector a1 = solve_stack(column_rows(true, 0), coeffs.g[0], diff_rhs(0, an2, an1));
      BitVector b2 = solve_stack(column_rows(false, 1), coeffs.g[3], diff_rhs(1, an3, an4));
      if (user == 0) {
        out = from_cache(a1, coeffs.g[1], an2);
        out.append(b2);
      } else {
        out = a1;
        out.append(from_cache(b2, coeffs.g[2], an3));
      }
      break;
    }
    case kD22: {
      out = solve_stack(column_rows(false, 0), coeffs.g[1], diff_rhs(0, an1, an2));
      out.append(solve_stack(column_rows(false, 1), coeffs.g[3], diff_rhs(1, an3, an4)));
      break;
    }
  }
  return out;
}

BitVector cia2_decode(int user, const DemandVector& demand, const Cia2Coefficients& coeffs,
                      const std::vector<BitVector>& answers, const BitVector& cache_bits) {
  int n = coeffs.num_dbs;
  if (static_cast<int>(answers.size()) != n) throw DimensionMismatch("cia2 expects one answer per DB");
  int half = n - 1;
  long long len = 2LL * n - 1;
  int gn1 = answers[static_cast<std::size_t>(n - 1)].get(0);
  int gn2 = answers[static_cast<std::size_t>(n - 1)].get(1);

  // Cache layout per block: the user's A-half bits then its B-half bits.
  BitVector cached_a = cache_bits.slice(0, half);
  BitVector cached_b = cache_bits.slice(half, 2 * half);

  auto first_of = [&](const BitVector& v) { return v.slice(0, half); };
  auto second_of = [&](const BitVector& v) { return v.slice(half, 2 * half); };
  // [segment | final coordinate] rows used by the stacked N x N systems.
  auto with_last = [&](const BitVector& seg, const BitVector& full) {
    BitVector r = seg;
    BitVector lastbit(1);
    lastbit.set(0, full.get(len - 1));
    r.append(lastbit);
    return r;
  };

  DemandCase dc = demand_case(demand);
  int want = demand.message_index(user);  // 0 = A, 1 = B
  bool user_has_first_halves = (user == 0);

  // Per-database equations after stripping everything the user can compute:
  // rows over the unknown [segment, last-coordinate] of the wanted message.
  std::vector<BitVector> rows;
  BitVector rhs(n);
  BitVector g_row;
  int g_bit = 0;

  auto answer_bit = [&](int db) { return answers[static_cast<std::size_t>(db)].get(0); };

  if (dc == kD11 || dc == kD22) {
    // Equal demands: one DB-N bit is fully aligned with the v_n (resp. u_n)
    // side, so the cache is only needed to strip the user's known half.
    bool want_a = (dc == kD11);
    int aligned_bit = want_a ? gn2 : gn1;
    const BitVector& goal_g = want_a ? coeffs.g1 : coeffs.g2;
    int goal_bit = want_a ? gn1 : gn2;
    const BitVector& known = want_a ? cached_a : cached_b;
    for (int i = 0; i < n - 1; ++i) {
      const BitVector& w = want_a ? coeffs.u[static_cast<std::size_t>(i)] : coeffs.v[static_cast<std::size_t>(i)];
      int bit = answer_bit(i) ^ aligned_bit;
      if (user_has_first_halves) {
        bit ^= first_of(w).dot(known);
        rows.push_back(with_last(second_of(w), w));
      } else {
        bit ^= second_of(w).dot(known);
        rows.push_back(with_last(first_of(w), w));
      }
      rhs.set(i, bit);
    }
    if (user_has_first_halves) {
      g_row = with_last(second_of(goal_g), goal_g);
      g_bit = goal_bit ^ first_of(goal_g).dot(known);
    } else {
      g_row = with_last(first_of(goal_g), goal_g);
      g_bit = goal_bit ^ second_of(goal_g).dot(known);
    }
    rhs.set(n - 1, g_bit);
  } else {
    // Distinct demands: subtract the DB-N bit of the interfering message
    // (corrected by cached bits) from each combination, strip the cached
    // parts of the wanted message, and solve for the missing half.
    bool want_a = (want == 0);
    const BitVector& goal_g = want_a ? coeffs.g1 : coeffs.g2;
    const BitVector& other_g = want_a ? coeffs.g2 : coeffs.g1;
    int goal_bit = want_a ? gn1 : gn2;
    int other_bit = want_a ? gn2 : gn1;
    const BitVector& known_goal = want_a ? cached_a : cached_b;
    const BitVector& known_other = want_a ? cached_b : cached_a;

    // The interfering message's aligned combination, computable from the
    // cache: DB-N bit minus the cached-half contribution.
    int aligned_other;
    if (user_has_first_halves)
      aligned_other = other_bit ^ first_of(other_g).dot(known_other);
    else
      aligned_other = other_bit ^ second_of(other_g).dot(known_other);

    for (int i = 0; i < n - 1; ++i) {
      const BitVector& w = want_a ? coeffs.u[static_cast<std::size_t>(i)] : coeffs.v[static_cast<std::size_t>(i)];
      const BitVector& o = want_a ? coeffs.v[static_cast<std::size_t>(i)] : coeffs.u[static_cast<std::size_t>(i)];
      int bit = answer_bit(i) ^ aligned_other;
      if (user_has_first_halves) {
        bit ^= first_of(w).dot(known_goal) ^ first_of(o).dot(known_other);
        rows.push_back(with_last(second_of(w), w));
      } else {
        bit ^= second_of(w).dot(known_goal) ^ second_of(o).dot(known_other);
        rows.push_back(with_last(first_of(w), w));
      }
      rhs.set(i, bit);
    }
    if (user_has_first_halves) {
      g_row = with_last(second_of(goal_g), goal_g);
      g_bit = goal_bit ^ first_of(goal_g).dot(known_goal);
    } else {
      g_row = with_last(first_of(goal_g), goal_g);
      g_bit = goal_bit ^ second_of(goal_g).dot(known_goal);
    }
    rhs.set(n - 1, g_bit);
  }

  BitMatrix m(0, n);
  for (const auto& r : rows) m.append_row(r);
  m.append_row(g_row);
  BitVector solved;
  try {
    solved = solve(m, rhs);
  } catch (const SingularMatrix&) {
    throw DecodeFailure("stacked CIA coefficient matrix is singular");
  }

  // Reassemble the full message: cached half, solved half, final bit.
  const BitVector& known = (want == 0) ? cached_a : cached_b;
  BitVector out(len);
  if (user_has_first_halves) {
    for (int i = 0; i < half; ++i) out.set(i, known.get(i));
    for (int i = 0; i < half; ++i) out.set(half + i, solved.get(i));
  } else {
    for (int i = 0; i < half; ++i) out.set(i, solved.get(i));
    for (int i = 0; i < half; ++i) out.set(half + i, known.get(i));
  }
  out.set(len - 1, solved.get(half));
  return out;
}

namespace {

bool full_rank_square(BitMatrix m) { return rank(m) == m.cols(); }

BitMatrix stack_column(const std::vector<std::array<BitVector, 2>>& col, int j, const BitVector& g) {
  BitMatrix m(0, static_cast<int>(g.size()));
  for (const auto& pair : col) m.append_row(pair[static_cast<std::size_t>(j)]);
  m.append_row(g);
  return m;
}

}  // namespace

bool check_fullrank_cia1(const Cia1Coefficients& c, const DemandVector& demand) {
  int n = c.num_dbs;
  auto sid = [&](const BitVector& g) { return full_rank_square(identity_block_with(g, n)); };
  auto ustack = [&](int j, const BitVector& g) { return full_rank_square(stack_column(c.u, j, g)); };
  auto vstack = [&](int j, const BitVector& g) { return full_rank_square(stack_column(c.v, j, g)); };
  switch (demand_case(demand)) {
    case kD12:
      return sid(c.g[0]) && sid(c.g[3]) && ustack(1, c.g[2]) && vstack(0, c.g[1]) && sid(c.g[2]) && sid(c.g[1]);
    case kD11:
      return sid(c.g[0]) && sid(c.g[2]) && sid(c.g[1]) && sid(c.g[3]) && ustack(0, c.g[0]) && ustack(1, c.g[2]);
    case kD21:
      return sid(c.g[1]) && sid(c.g[2]) && vstack(1, c.g[3]) && ustack(0, c.g[0]) && sid(c.g[3]) && sid(c.g[0]);
    case kD22:
      return sid(c.g[1]) && sid(c.g[3]) && sid(c.g[0]) && sid(c.g[2]) && vstack(0, c.g[1]) && vstack(1, c.g[3]);
  }
  return false;
}

bool check_alignment_cia1(const Cia1Coefficients& c, const DemandVector& demand) {
  int n = c.num_dbs;
  auto all_u = [&](int j, const BitVector& g) {
    for (int i = 0; i < n - 1; ++i)
      if (!(c.u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == g)) return false;
    return true;
  };
  auto all_v = [&](int j, const BitVector& g) {
    for (int i = 0; i < n - 1; ++i)
      if (!(c.v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == g)) return false;
    return true;
  };
  switch (demand_case(demand)) {
    case kD12:
      return all_u(0, c.g[0]) && all_v(1, c.g[3]);
    case kD11:
      return all_v(0, c.g[1]) && all_v(1, c.g[3]);
    case kD21:
      return all_v(0, c.g[1]) && all_u(1, c.g[2]);
    case kD22:
      return all_u(0, c.g[0]) && all_u(1, c.g[2]);
  }
  return false;
}

namespace {

BitMatrix cia2_stack(const std::vector<BitVector>& vs, const BitVector& g, int from, int to, bool with_final) {
  long long len = g.size();
  auto segment = [&](const BitVector& v) {
    BitVector s = v.slice(from, to);
    if (with_final) {
      BitVector last(1);
      last.set(0, v.get(len - 1));
      s.append(last);
    }
    return s;
  };
  BitMatrix m(0, to - from + (with_final ? 1 : 0));
  for (const auto& v : vs) m.append_row(segment(v));
  m.append_row(segment(g));
  return m;
}

}  // namespace

bool check_fullrank_cia2(const Cia2Coefficients& c, const DemandVector& demand) {
  int n = c.num_dbs;
  int half = n - 1;
  long long len = 2LL * n - 1;
  // The four candidate stacks over [segment | final coordinate].
  auto u_second = [&] { return full_rank_square(cia2_stack(c.u, c.g1, half, static_cast<int>(len - 1), true)); };
  auto u_first = [&] { return full_rank_square(cia2_stack(c.u, c.g1, 0, half, true)); };
  auto v_second = [&] { return full_rank_square(cia2_stack(c.v, c.g2, half, static_cast<int>(len - 1), true)); };
  auto v_first = [&] { return full_rank_square(cia2_stack(c.v, c.g2, 0, half, true)); };
  switch (demand_case(demand)) {
    case kD12:
      return u_second() && v_first();
    case kD11:
      return u_second() && u_first();
    case kD21:
      return v_second() && u_first();
    case kD22:
      return v_second() && v_first();
  }
  return false;
}

bool check_alignment_cia2(const Cia2Coefficients& c, const DemandVector& demand) {
  int n = c.num_dbs;
  int half = n - 1;
  long long len = 2LL * n - 1;
  // Final coordinate of every coefficient vector is pinned to 1.
  for (const auto& v : c.u)
    if (v.get(len - 1) != 1) return false;
  for (const auto& v : c.v)
    if (v.get(len - 1) != 1) return false;
  if (c.g1.get(len - 1) != 1 || c.g2.get(len - 1) != 1) return false;

  auto all_u_equal = [&](int from, int to, const BitVector& g) {
    for (const auto& v : c.u)
      if (!(v.slice(from, to) == g.slice(from, to))) return false;
    return true;
  };
  auto all_v_equal = [&](int from, int to, const BitVector& g) {
    for (const auto& v : c.v)
      if (!(v.slice(from, to) == g.slice(from, to))) return false;
    return true;
  };
  switch (demand_case(demand)) {
    case kD12:
      return all_u_equal(0, half, c.g1) && all_v_equal(half, static_cast<int>(len - 1), c.g2);
    case kD11:
      return all_v_equal(0, static_cast<int>(len), c.g2);
    case kD21:
      return all_u_equal(half, static_cast<int>(len - 1), c.g1) && all_v_equal(0, half, c.g2);
    case kD22:
      return all_u_equal(0, static_cast<int>(len), c.g1);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Wire format helpers. Payloads are scanned directly: they sit on the hot
// path of the exhaustive decodability sweeps.

namespace {

std::string build_cia_payload(const char* scheme, int db, const std::vector<const BitVector*>& vecs) {
  std::string out;
  out.reserve(64 + vecs.size() * 24);
  out += "{\"scheme\":\"";
  out += scheme;
  out += "\",\"db\":";
  out += std::to_string(db + 1);
  out += ",\"vectors\":[";
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    if (i) out += ',';
    json_append_bitvector(out, *vecs[i]);
  }
  out += "]}";
  return out;
}

std::vector<BitVector> parse_cia_vectors(const std::string& payload) {
  const char* key = "\"vectors\":[";
  auto pos = payload.find(key);
  if (pos == std::string::npos) throw InvalidParameter("malformed CIA payload");
  const char* p = payload.c_str() + pos + std::strlen(key);
  std::vector<BitVector> out;
  while (*p != ']') {
    if (*p == ',') ++p;
    if (*p != '[') throw InvalidParameter("malformed CIA payload vector");
    ++p;
    std::vector<int> bits;
    while (*p != ']') {
      if (*p == ',') ++p;
      if (*p != '0' && *p != '1') throw InvalidParameter("CIA payload bits must be 0/1");
      bits.push_back(*p - '0');
      ++p;
    }
    ++p;
    out.push_back(BitVector::from_bits(bits));
  }
  return out;
}

// Common scaffolding for the two corner-point schemes: per-block coefficient
// construction over a block-repeated message layout.
class CiaSchemeBase : public Scheme {
 public:
  CiaSchemeBase(int num_dbs, long long message_len, long long block_len, Rat cache_size) : n_(num_dbs) {
    if (num_dbs < 2) throw InvalidParameter("CIA schemes require N >= 2");
    if (message_len <= 0 || message_len % block_len != 0)
      throw IndivisibleLength("message length must be a positive multiple of the CIA block length");
    blocks_ = message_len / block_len;
    block_len_ = block_len;
    params_.num_messages = 2;
    params_.num_users = 2;
    params_.num_dbs = num_dbs;
    params_.message_len = message_len;
    params_.cache_size = cache_size;
    params_.validate();
  }

  const SystemParams& params() const override { return params_; }

  std::uint64_t realization_count(const DemandVector& demand) const override {
    check_demand(demand);
    return blocks_ == 1 ? cia_realization_count(n_) : 0;
  }

  std::vector<Query> queries_at(const DemandVector& demand, std::uint64_t realization) const override {
    check_demand(demand);
    if (blocks_ != 1) throw NotEnumerable("multi-block CIA schemes support only seeded draws");
    std::vector<RealizationParts> parts{split_realization(n_, realization)};
    return emit_queries(demand, parts);
  }

  std::vector<Query> queries_seeded(const DemandVector& demand, std::uint64_t seed) const override {
    check_demand(demand);
    Rng rng(Rng::derive(seed, name()));
    std::vector<RealizationParts> parts;
    parts.reserve(static_cast<std::size_t>(blocks_));
    for (long long b = 0; b < blocks_; ++b) parts.push_back(draw_realization(n_, rng));
    return emit_queries(demand, parts);
  }

 protected:
  virtual std::vector<Query> emit_queries(const DemandVector& demand,
                                          const std::vector<RealizationParts>& parts) const = 0;

  void check_library(const MessageLibrary& lib) const {
    if (lib.params.num_messages != 2 || lib.params.message_len != params_.message_len)
      throw ParamMismatch("library does not match CIA scheme parameters");
  }

  int n_;
  long long blocks_ = 1;
  long long block_len_ = 0;
  SystemParams params_;
};

class Cia1Scheme : public CiaSchemeBase {
 public:
  Cia1Scheme(int num_dbs, long long message_len)
      : CiaSchemeBase(num_dbs, message_len, 2LL * num_dbs, Rat(num_dbs - 1, 2 * num_dbs)) {}

  std::string name() const override { return "cia1"; }

  std::vector<CacheContent> place(const MessageLibrary& lib) const override {
    check_library(lib);
    long long L = params_.message_len;
    std::vector<CacheContent> caches;
    for (int user = 0; user < 2; ++user) {
      // User 1 stores A_j + B_j over the first message half of each block,
      // user 2 the same over the second half.
      BitMatrix coeffs(0, static_cast<int>(2 * L));
      for (long long b = 0; b < blocks_; ++b) {
        for (int j = 0; j < n_ - 1; ++j) {
          BitVector row(2 * L);
          long long offset = b * block_len_ + (user == 0 ? 0 : n_) + j;
          row.set(offset, 1);
          row.set(L + offset, 1);
          coeffs.append_row(std::move(row));
        }
      }
      CacheContent c;
      c.user = user;
      c.description = LinearCombos{std::move(coeffs)};
      c.stored_bits = evaluate_cache_description(c.description, lib);
      caches.push_back(std::move(c));
    }
    return caches;
  }

  Answer answer(const Query& query, const MessageLibrary& lib) const override {
    check_library(lib);
    auto vecs = parse_cia_vectors(query.payload);
    if (static_cast<long long>(vecs.size()) != 4 * blocks_) throw DimensionMismatch("cia1 query vector count");
    bool is_last = query.db == n_ - 1;
    BitVector bits(blocks_ * (is_last ? 4 : 2));
    for (long long b = 0; b < blocks_; ++b) {
      BitVector a1 = lib.messages[0].slice(b * block_len_, b * block_len_ + n_);
      BitVector a2 = lib.messages[0].slice(b * block_len_ + n_, (b + 1) * block_len_);
      BitVector b1 = lib.messages[1].slice(b * block_len_, b * block_len_ + n_);
      BitVector b2 = lib.messages[1].slice(b * block_len_ + n_, (b + 1) * block_len_);
      const auto* v = &vecs[static_cast<std::size_t>(4 * b)];
      if (is_last) {
        bits.set(4 * b + 0, v[0].dot(a1));
        bits.set(4 * b + 1, v[1].dot(b1));
        bits.set(4 * b + 2, v[2].dot(a2));
        bits.set(4 * b + 3, v[3].dot(b2));
      } else {
        bits.set(2 * b + 0, v[0].dot(a1) ^ v[2].dot(b1));
        bits.set(2 * b + 1, v[1].dot(a2) ^ v[3].dot(b2));
      }
    }
    return Answer{query.db, std::move(bits)};
  }

  BitVector decode(int user, const DemandVector& demand, const std::vector<Query>& queries,
                   const std::vector<Answer>& answers, const CacheContent& cache) const override {
    check_demand(demand);
    std::vector<std::vector<BitVector>> per_db;
    per_db.reserve(queries.size());
    for (const auto& q : queries) per_db.push_back(parse_cia_vectors(q.payload));
    BitVector out;
    for (long long b = 0; b < blocks_; ++b) {
      Cia1Coefficients c;
      c.num_dbs = n_;
      c.u.resize(static_cast<std::size_t>(n_ - 1));
      c.v.resize(static_cast<std::size_t>(n_ - 1));
      for (int db = 0; db < n_ - 1; ++db) {
        const auto& vecs = per_db[static_cast<std::size_t>(db)];
        c.u[static_cast<std::size_t>(db)][0] = vecs[static_cast<std::size_t>(4 * b + 0)];
        c.u[static_cast<std::size_t>(db)][1] = vecs[static_cast<std::size_t>(4 * b + 1)];
        c.v[static_cast<std::size_t>(db)][0] = vecs[static_cast<std::size_t>(4 * b + 2)];
        c.v[static_cast<std::size_t>(db)][1] = vecs[static_cast<std::size_t>(4 * b + 3)];
      }
      const auto& gvecs = per_db[static_cast<std::size_t>(n_ - 1)];
      for (int j = 0; j < 4; ++j) c.g[static_cast<std::size_t>(j)] = gvecs[static_cast<std::size_t>(4 * b + j)];

      std::vector<BitVector> block_answers;
      for (int db = 0; db < n_ - 1; ++db)
        block_answers.push_back(answers[static_cast<std::size_t>(db)].bits.slice(2 * b, 2 * b + 2));
      block_answers.push_back(answers[static_cast<std::size_t>(n_ - 1)].bits.slice(4 * b, 4 * b + 4));
      BitVector block_cache = cache.stored_bits.slice(b * (n_ - 1), (b + 1) * (n_ - 1));
      out.append(cia1_decode(user, demand, c, block_answers, block_cache));
    }
    return out;
  }

 protected:
  std::vector<Query> emit_queries(const DemandVector& demand,
                                  const std::vector<RealizationParts>& parts) const override {
    std::vector<Cia1Coefficients> coeffs;
    coeffs.reserve(parts.size());
    for (const auto& p : parts) coeffs.push_back(cia1_from_parts(demand, n_, p));
    std::vector<Query> queries;
    for (int db = 0; db < n_; ++db) {
      std::vector<const BitVector*> vecs;
      for (const auto& c : coeffs) {
        if (db == n_ - 1) {
          for (const auto& g : c.g) vecs.push_back(&g);
        } else {
          vecs.push_back(&c.u[static_cast<std::size_t>(db)][0]);
          vecs.push_back(&c.u[static_cast<std::size_t>(db)][1]);
          vecs.push_back(&c.v[static_cast<std::size_t>(db)][0]);
          vecs.push_back(&c.v[static_cast<std::size_t>(db)][1]);
        }
      }
      queries.push_back(Query{db, build_cia_payload("cia1", db, vecs)});
    }
    return queries;
  }
};

class Cia2Scheme : public CiaSchemeBase {
 public:
  Cia2Scheme(int num_dbs, long long message_len)
      : CiaSchemeBase(num_dbs, message_len, 2LL * num_dbs - 1, Rat(2 * (num_dbs - 1), 2 * num_dbs - 1)) {}

  std::string name() const override { return "cia2"; }

  std::vector<CacheContent> place(const MessageLibrary& lib) const override {
    check_library(lib);
    std::vector<CacheContent> caches;
    for (int user = 0; user < 2; ++user) {
      // Uncoded: user 1 stores the first N-1 bits of each message per block,
      // user 2 the next N-1; nobody stores the final block bit.
      UncodedIndices idx;
      for (long long b = 0; b < blocks_; ++b) {
        long long base = b * block_len_ + (user == 0 ? 0 : n_ - 1);
        for (int k = 0; k < 2; ++k)
          for (int j = 0; j < n_ - 1; ++j) idx.entries.emplace_back(k, base + j);
      }
      CacheContent c;
      c.user = user;
      c.description = idx;
      c.stored_bits = evaluate_cache_description(c.description, lib);
      caches.push_back(std::move(c));
    }
    return caches;
  }

  Answer answer(const Query& query, const MessageLibrary& lib) const override {
    check_library(lib);
    auto vecs = parse_cia_vectors(query.payload);
    if (static_cast<long long>(vecs.size()) != 2 * blocks_) throw DimensionMismatch("cia2 query vector count");
    bool is_last = query.db == n_ - 1;
    BitVector bits(blocks_ * (is_last ? 2 : 1));
    for (long long b = 0; b < blocks_; ++b) {
      BitVector a = lib.messages[0].slice(b * block_len_, (b + 1) * block_len_);
      BitVector bb = lib.messages[1].slice(b * block_len_, (b + 1) * block_len_);
      const auto& v0 = vecs[static_cast<std::size_t>(2 * b)];
      const auto& v1 = vecs[static_cast<std::size_t>(2 * b + 1)];
      if (is_last) {
        bits.set(2 * b + 0, v0.dot(a));
        bits.set(2 * b + 1, v1.dot(bb));
      } else {
        bits.set(b, v0.dot(a) ^ v1.dot(bb));
      }
    }
    return Answer{query.db, std::move(bits)};
  }

  BitVector decode(int user, const DemandVector& demand, const std::vector<Query>& queries,
                   const std::vector<Answer>& answers, const CacheContent& cache) const override {
    check_demand(demand);
    std::vector<std::vector<BitVector>> per_db;
    per_db.reserve(queries.size());
    for (const auto& q : queries) per_db.push_back(parse_cia_vectors(q.payload));
    long long cache_block = 2LL * (n_ - 1);
    BitVector out;
    for (long long b = 0; b < blocks_; ++b) {
      Cia2Coefficients c;
      c.num_dbs = n_;
      c.u.resize(static_cast<std::size_t>(n_ - 1));
      c.v.resize(static_cast<std::size_t>(n_ - 1));
      for (int db = 0; db < n_ - 1; ++db) {
        c.u[static_cast<std::size_t>(db)] = per_db[static_cast<std::size_t>(db)][static_cast<std::size_t>(2 * b)];
        c.v[static_cast<std::size_t>(db)] = per_db[static_cast<std::size_t>(db)][static_cast<std::size_t>(2 * b + 1)];
      }
      c.g1 = per_db[static_cast<std::size_t>(n_ - 1)][static_cast<std::size_t>(2 * b)];
      c.g2 = per_db[static_cast<std::size_t>(n_ - 1)][static_cast<std::size_t>(2 * b + 1)];

      std::vector<BitVector> block_answers;
      for (int db = 0; db < n_ - 1; ++db)
        block_answers.push_back(answers[static_cast<std::size_t>(db)].bits.slice(b, b + 1));
      block_answers.push_back(answers[static_cast<std::size_t>(n_ - 1)].bits.slice(2 * b, 2 * b + 2));
      BitVector block_cache = cache.stored_bits.slice(b * cache_block, (b + 1) * cache_block);
      out.append(cia2_decode(user, demand, c, block_answers, block_cache));
    }
    return out;
  }

 protected:
  std::vector<Query> emit_queries(const DemandVector& demand,
                                  const std::vector<RealizationParts>& parts) const override {
    std::vector<Cia2Coefficients> coeffs;
    coeffs.reserve(parts.size());
    for (const auto& p : parts) coeffs.push_back(cia2_from_parts(demand, n_, p));
    std::vector<Query> queries;
    for (int db = 0; db < n_; ++db) {
      std::vector<const BitVector*> vecs;
      for (const auto& c : coeffs) {
        if (db == n_ - 1) {
          vecs.push_back(&c.g1);
          vecs.push_back(&c.g2);
        } else {
          vecs.push_back(&c.u[static_cast<std::size_t>(db)]);
          vecs.push_back(&c.v[static_cast<std::size_t>(db)]);
        }
      }
      queries.push_back(Query{db, build_cia_payload("cia2", db, vecs)});
    }
    return queries;
  }
};

}  // namespace

SchemePtr cia1_scheme(int num_dbs, long long message_len) {
  return std::make_shared<Cia1Scheme>(num_dbs, message_len);
}

SchemePtr cia2_scheme(int num_dbs, long long message_len) {
  return std::make_shared<Cia2Scheme>(num_dbs, message_len);
}

}  // namespace mupir
