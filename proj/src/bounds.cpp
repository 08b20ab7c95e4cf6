#include "mupir/bounds.hpp"

#include <algorithm>
#include <cstring>

#include "mupir/combin.hpp"
#include "mupir/errors.hpp"

namespace mupir {

RateCurve::RateCurve(std::vector<std::pair<Rat, Rat>> points) : corners(std::move(points)) {
  if (corners.empty()) throw InvalidParameter("RateCurve needs at least one corner");
  for (std::size_t i = 1; i < corners.size(); ++i) {
    if (!(corners[i - 1].first < corners[i].first))
      throw InvalidParameter("RateCurve corners must have strictly increasing memory");
    if (corners[i].second > corners[i - 1].second)
      throw InvalidParameter("RateCurve corners must have non-increasing load");
  }
}

Rat RateCurve::eval(const Rat& memory) const {
  if (memory < corners.front().first || memory > corners.back().first)
    throw OutOfRange("memory outside the curve domain");
  auto it = std::lower_bound(corners.begin(), corners.end(), memory,
                             [](const auto& c, const Rat& m) { return c.first < m; });
  if (it != corners.end() && it->first == memory) return it->second;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  return lo.second + (hi.second - lo.second) * (memory - lo.first) / (hi.first - lo.first);
}

RateCurve lower_convex_envelope(std::vector<std::pair<Rat, Rat>> points) {
  if (points.empty()) throw InvalidParameter("envelope of an empty point set");
  std::sort(points.begin(), points.end());
  // Keep the lowest point per memory value.
  std::vector<std::pair<Rat, Rat>> unique;
  for (const auto& p : points) {
    if (!unique.empty() && unique.back().first == p.first) continue;
    unique.push_back(p);
  }
  // Monotone-chain lower hull.
  std::vector<std::pair<Rat, Rat>> hull;
  for (const auto& p : unique) {
    while (hull.size() >= 2) {
      const auto& o = hull[hull.size() - 2];
      const auto& a = hull.back();
      Rat cross = (a.first - o.first) * (p.second - o.second) - (a.second - o.second) * (p.first - o.first);
      if (cross <= Rat(0))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  return RateCurve(std::move(hull));
}

Rat sj_rate_factor(int num_messages, int num_dbs) {
  if (num_messages < 1 || num_dbs < 2) throw InvalidParameter("rate factor requires K >= 1, N >= 2");
  Rat sum(0);
  for (int i = 0; i < num_messages; ++i) sum += Rat(1, int_pow(num_dbs, i));
  return sum;
}

Rat cia_load(const Rat& memory, int num_dbs) {
  int n = num_dbs;
  if (n < 2) throw InvalidParameter("cia_load requires N >= 2");
  if (memory < Rat(0) || memory > Rat(2)) throw OutOfRange("cia_load requires M in [0, 2]");
  Rat b1(n - 1, 2 * n);
  Rat b2(2 * (n - 1), 2 * n - 1);
  if (memory <= b1) return Rat(2) * (Rat(1) - memory);
  if (memory <= b2) return Rat(n + 1) * (Rat(3) - Rat(2) * memory) / Rat(2 * n + 1);
  return Rat(n + 1) * (Rat(2) - memory) / Rat(2 * n);
}

Rat uncoded_optimal_load(const Rat& memory, int num_dbs) {
  int n = num_dbs;
  if (n < 2) throw InvalidParameter("uncoded_optimal_load requires N >= 2");
  if (memory < Rat(0) || memory > Rat(2)) throw OutOfRange("uncoded_optimal_load requires M in [0, 2]");
  Rat b(2 * (n - 1), 2 * n - 1);
  if (memory <= b) return Rat(2) - Rat(3, 2) * memory;
  return Rat(n + 1) * (Rat(2) - memory) / Rat(2 * n);
}

RateCurve pd_envelope(int num_messages, int num_users, int num_dbs) {
  Rat factor = sj_rate_factor(num_messages, num_dbs);
  std::vector<std::pair<Rat, Rat>> points;
  points.emplace_back(Rat(0), Rat(num_messages));
  for (int t = 1; t <= num_users; ++t) {
    Rat m(static_cast<long long>(t) * num_messages, num_users);
    Rat r = Rat(num_users - t, t + 1) * factor;
    points.emplace_back(m, r);
  }
  return lower_convex_envelope(std::move(points));
}

Rat pd_load(int num_messages, int num_users, int num_dbs, const Rat& memory) {
  if (memory < Rat(0) || memory > Rat(num_messages)) throw OutOfRange("pd_load requires M in [0, K]");
  Rat naive = Rat(num_messages) - memory;
  Rat enveloped = pd_envelope(num_messages, num_users, num_dbs).eval(memory);
  return std::min(naive, enveloped);
}

Rat distinct_optimal_load(const Rat& memory) {
  if (memory < Rat(0) || memory > Rat(2)) throw OutOfRange("distinct_optimal_load requires M in [0, 2]");
  if (memory <= Rat(1, 3)) return Rat(2) * (Rat(1) - memory);
  if (memory <= Rat(2, 3)) return Rat(5, 3) - memory;
  return Rat(3) * (Rat(2) - memory) / Rat(4);
}

Rat single_user_pir_bound(int num_messages, int num_dbs, const Rat& memory) {
  if (memory < Rat(0) || memory > Rat(num_messages))
    throw OutOfRange("single_user_pir_bound requires M in [0, K]");
  return (Rat(1) - memory / Rat(num_messages)) * sj_rate_factor(num_messages, num_dbs);
}

RateCurve caching_converse_quarter_envelope(int num_messages, int num_users, int num_dbs) {
  (void)num_dbs;
  std::vector<std::pair<Rat, Rat>> points;
  for (int t = 0; t <= num_users; ++t) {
    Rat m(static_cast<long long>(t) * num_messages, num_users);
    Rat caching = Rat(num_users - t, t + 1);
    Rat replication = Rat(num_messages) - m;
    points.emplace_back(m, std::min(caching, replication) / Rat(4));
  }
  return lower_convex_envelope(std::move(points));
}

Rat caching_converse_quarter(int num_messages, int num_users, int num_dbs, const Rat& memory) {
  if (memory < Rat(0) || memory > Rat(num_messages))
    throw OutOfRange("caching_converse_quarter requires M in [0, K]");
  return caching_converse_quarter_envelope(num_messages, num_users, num_dbs).eval(memory);
}

Rat yu_bound_6x6(const Rat& memory) {
  if (memory < Rat(0) || memory > Rat(6)) throw OutOfRange("yu_bound_6x6 requires M in [0, 6]");
  std::vector<std::pair<Rat, Rat>> points;
  points.emplace_back(Rat(0), Rat(6));
  for (int s = 1; s <= 6; ++s)
    for (int l = 1; l <= s; ++l)
      points.emplace_back(Rat(7 - l, s), Rat(s - 1, 2) + Rat(static_cast<long long>(l) * (l - 1), 2 * s));
  return lower_convex_envelope(std::move(points)).eval(memory);
}

namespace {

// Rewrites a cache description over a sub-library (prefix or suffix split)
// into rows over the full concatenated layout.
std::vector<BitVector> description_rows_in_full_layout(const CacheDescription& desc, int num_messages,
                                                       long long part_len, long long full_len,
                                                       long long part_offset) {
  std::vector<BitVector> rows;
  if (std::holds_alternative<UncodedIndices>(desc)) {
    for (auto [k, bit] : std::get<UncodedIndices>(desc).entries) {
      BitVector row(static_cast<long long>(num_messages) * full_len);
      row.set(static_cast<long long>(k) * full_len + part_offset + bit, 1);
      rows.push_back(std::move(row));
    }
  } else {
    const auto& coeffs = std::get<LinearCombos>(desc).coeffs;
    for (int r = 0; r < coeffs.rows(); ++r) {
      BitVector row(static_cast<long long>(num_messages) * full_len);
      for (int k = 0; k < num_messages; ++k)
        for (long long i = 0; i < part_len; ++i)
          if (coeffs.get(r, static_cast<long long>(k) * part_len + i))
            row.set(static_cast<long long>(k) * full_len + part_offset + i, 1);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

class CompositeScheme : public Scheme {
 public:
  CompositeScheme(SchemePtr a, SchemePtr b, Rat lambda, long long total_len)
      : a_(std::move(a)), b_(std::move(b)), lambda_(std::move(lambda)) {
    const auto& pa = a_->params();
    const auto& pb = b_->params();
    if (pa.num_messages != pb.num_messages || pa.num_users != pb.num_users || pa.num_dbs != pb.num_dbs)
      throw ParamMismatch("memory sharing requires matching K, Ku, N");
    if (!(pa.cache_size < pb.cache_size))
      throw ParamMismatch("memory sharing expects M_A < M_B");
    if (pa.message_len + pb.message_len != total_len)
      throw IndivisibleLength("memory sharing length split mismatch");
    params_ = pa;
    params_.message_len = total_len;
    params_.cache_size = lambda_ * pa.cache_size + (Rat(1) - lambda_) * pb.cache_size;
    params_.validate();
  }

  std::string name() const override { return "share"; }
  const SystemParams& params() const override { return params_; }

  std::vector<DemandVector> demand_set() const override {
    auto set_b = b_->demand_set();
    std::vector<DemandVector> out;
    for (const auto& d : a_->demand_set())
      if (std::find(set_b.begin(), set_b.end(), d) != set_b.end()) out.push_back(d);
    return out;
  }

  std::vector<CacheContent> place(const MessageLibrary& lib) const override {
    auto [lib_a, lib_b] = split_library(lib);
    auto caches_a = a_->place(lib_a);
    auto caches_b = b_->place(lib_b);
    long long la = a_->params().message_len;
    std::vector<CacheContent> out;
    for (int u = 0; u < params_.num_users; ++u) {
      CacheContent c;
      c.user = u;
      c.stored_bits = caches_a[static_cast<std::size_t>(u)].stored_bits;
      c.stored_bits.append(caches_b[static_cast<std::size_t>(u)].stored_bits);
      BitMatrix coeffs(0, static_cast<int>(params_.num_messages * params_.message_len));
      for (auto& row : description_rows_in_full_layout(caches_a[static_cast<std::size_t>(u)].description,
                                                       params_.num_messages, la, params_.message_len, 0))
        coeffs.append_row(std::move(row));
      for (auto& row : description_rows_in_full_layout(caches_b[static_cast<std::size_t>(u)].description,
                                                       params_.num_messages, params_.message_len - la,
                                                       params_.message_len, la))
        coeffs.append_row(std::move(row));
      c.description = LinearCombos{std::move(coeffs)};
      out.push_back(std::move(c));
    }
    return out;
  }

  std::uint64_t realization_count(const DemandVector& demand) const override {
    return checked_mul(a_->realization_count(demand), b_->realization_count(demand));
  }

  std::vector<Query> queries_at(const DemandVector& demand, std::uint64_t realization) const override {
    std::uint64_t count_b = b_->realization_count(demand);
    if (count_b == 0 || realization_count(demand) == 0)
      throw NotEnumerable("composite scheme randomness is not enumerable");
    return merge(a_->queries_at(demand, realization / count_b), b_->queries_at(demand, realization % count_b));
  }

  std::vector<Query> queries_seeded(const DemandVector& demand, std::uint64_t seed) const override {
    return merge(a_->queries_seeded(demand, Rng::derive(seed, "share/a")),
                 b_->queries_seeded(demand, Rng::derive(seed, "share/b")));
  }

  Answer answer(const Query& query, const MessageLibrary& lib) const override {
    auto [qa, qb] = split_query(query);
    auto [lib_a, lib_b] = split_library(lib);
    Answer out;
    out.db = query.db;
    out.bits = a_->answer(qa, lib_a).bits;
    out.bits.append(b_->answer(qb, lib_b).bits);
    return out;
  }

  BitVector decode(int user, const DemandVector& demand, const std::vector<Query>& queries,
                   const std::vector<Answer>& answers, const CacheContent& cache) const override {
    std::vector<Query> qa, qb;
    std::vector<Answer> aa, ab;
    for (const auto& q : queries) {
      auto [sub_a, sub_b] = split_query(q);
      qa.push_back(std::move(sub_a));
      qb.push_back(std::move(sub_b));
    }
    // Answer bit counts of the A part are reproducible from the query
    // against a zero library of the right shape.
    auto zero_a = zero_library(a_->params());
    for (std::size_t i = 0; i < answers.size(); ++i) {
      long long split = a_->answer(qa[i], zero_a).bits.size();
      Answer part_a{answers[i].db, answers[i].bits.slice(0, split)};
      Answer part_b{answers[i].db, answers[i].bits.slice(split, answers[i].bits.size())};
      aa.push_back(std::move(part_a));
      ab.push_back(std::move(part_b));
    }
    long long cache_a_bits = a_->params().cache_bits();
    CacheContent ca{user, cache.stored_bits.slice(0, cache_a_bits), UncodedIndices{}};
    CacheContent cb{user, cache.stored_bits.slice(cache_a_bits, cache.stored_bits.size()), UncodedIndices{}};
    BitVector out = a_->decode(user, demand, qa, aa, ca);
    out.append(b_->decode(user, demand, qb, ab, cb));
    return out;
  }

 private:
  std::pair<MessageLibrary, MessageLibrary> split_library(const MessageLibrary& lib) const {
    long long la = a_->params().message_len;
    MessageLibrary lib_a, lib_b;
    lib_a.params = a_->params();
    lib_b.params = b_->params();
    for (const auto& m : lib.messages) {
      lib_a.messages.push_back(m.slice(0, la));
      lib_b.messages.push_back(m.slice(la, m.size()));
    }
    return {std::move(lib_a), std::move(lib_b)};
  }

  static MessageLibrary zero_library(const SystemParams& params) {
    MessageLibrary lib;
    lib.params = params;
    for (int k = 0; k < params.num_messages; ++k) lib.messages.emplace_back(params.message_len);
    return lib;
  }

  std::vector<Query> merge(const std::vector<Query>& qa, const std::vector<Query>& qb) const {
    std::vector<Query> out;
    for (std::size_t i = 0; i < qa.size(); ++i) {
      std::string payload = "{\"scheme\":\"share\",\"db\":" + std::to_string(qa[i].db + 1) + ",\"a\":";
      payload += qa[i].payload;
      payload += ",\"b\":";
      payload += qb[i].payload;
      payload += "}";
      out.push_back(Query{qa[i].db, std::move(payload)});
    }
    return out;
  }

  std::pair<Query, Query> split_query(const Query& query) const {
    auto extract = [&](const char* key) {
      auto pos = query.payload.find(key);
      if (pos == std::string::npos) throw InvalidParameter("malformed composite payload");
      std::size_t start = pos + std::strlen(key);
      int depth = 0;
      std::size_t i = start;
      for (; i < query.payload.size(); ++i) {
        char c = query.payload[i];
        if (c == '{') ++depth;
        if (c == '}') {
          --depth;
          if (depth == 0) break;
        }
      }
      return query.payload.substr(start, i - start + 1);
    };
    return {Query{query.db, extract("\"a\":")}, Query{query.db, extract("\"b\":")}};
  }

  SchemePtr a_, b_;
  Rat lambda_;
  SystemParams params_;
};

}  // namespace

SchemePtr memory_share(const SchemeFactory& scheme_a, const SchemeFactory& scheme_b, const Rat& lambda,
                       long long total_len) {
  if (lambda < Rat(0) || lambda > Rat(1)) throw InvalidParameter("lambda must be in [0, 1]");
  if (lambda == Rat(0)) return scheme_b(total_len);
  if (lambda == Rat(1)) return scheme_a(total_len);
  Rat len_a = lambda * Rat(total_len);
  if (len_a.denominator() != 1)
    throw IndivisibleLength("lambda * L must be an integer number of bits");
  SchemePtr a = scheme_a(len_a.numerator());
  SchemePtr b = scheme_b(total_len - len_a.numerator());
  return std::make_shared<CompositeScheme>(std::move(a), std::move(b), lambda, total_len);
}

}  // namespace mupir
