#include "mupir/distinct.hpp"

#include <cstring>

#include "mupir/errors.hpp"

namespace mupir {

namespace {

// Rows are over (A1,A2,A3,B1,B2,B3).
BitVector row(std::initializer_list<int> bits) { return BitVector(bits); }

}  // namespace

int DistinctVariantTable::db2_variant(int coin, const DemandVector& demand) {
  if (demand.thetas == std::vector<int>{1, 2}) return coin;
  if (demand.thetas == std::vector<int>{2, 1}) return 1 - coin;
  throw InvalidDemand("distinct-demand schemes accept only distinct demands");
}

DistinctVariantTable dd1_table() {
  DistinctVariantTable t;
  // DB 1, variant 1: (A3, B1+B2+B3); variant 2: (A1+A2+A3, B3).
  t.answer_defs[0][0] = {row({0, 0, 1, 0, 0, 0}), row({0, 0, 0, 1, 1, 1})};
  t.answer_defs[0][1] = {row({1, 1, 1, 0, 0, 0}), row({0, 0, 0, 0, 0, 1})};
  // DB 2, variant 1: (A2+A3, B2+B3); variant 2: (A1+A3, B1+B3).
  t.answer_defs[1][0] = {row({0, 1, 1, 0, 0, 0}), row({0, 0, 0, 0, 1, 1})};
  t.answer_defs[1][1] = {row({1, 0, 1, 0, 0, 0}), row({0, 0, 0, 1, 0, 1})};
  return t;
}

DistinctVariantTable dd2_table() {
  DistinctVariantTable t;
  // DB 1, variant 1: A3+B3+B1+B2; variant 2: A3+B3+A1+A2.
  t.answer_defs[0][0] = {row({0, 0, 1, 1, 1, 1})};
  t.answer_defs[0][1] = {row({1, 1, 1, 0, 0, 1})};
  // DB 2 variants as in the first corner.
  t.answer_defs[1][0] = {row({0, 1, 1, 0, 0, 0}), row({0, 0, 0, 0, 1, 1})};
  t.answer_defs[1][1] = {row({1, 0, 1, 0, 0, 0}), row({0, 0, 0, 1, 0, 1})};
  return t;
}

namespace {

class DistinctScheme : public Scheme {
 public:
  DistinctScheme(int corner) : corner_(corner), table_(corner == 1 ? dd1_table() : dd2_table()) {
    params_.num_messages = 2;
    params_.num_users = 2;
    params_.num_dbs = 2;
    params_.message_len = 3;
    params_.cache_size = corner == 1 ? Rat(1, 3) : Rat(2, 3);
    params_.validate();
  }

  std::string name() const override { return corner_ == 1 ? "dd1" : "dd2"; }
  const SystemParams& params() const override { return params_; }

  std::vector<DemandVector> demand_set() const override { return distinct_demands(2, 2); }

  std::vector<CacheContent> place(const MessageLibrary& lib) const override {
    if (lib.params.num_messages != 2 || lib.params.message_len != 3)
      throw ParamMismatch("distinct-demand schemes require K=2, L=3");
    std::vector<CacheContent> caches;
    for (int u = 0; u < 2; ++u) {
      CacheContent c;
      c.user = u;
      if (corner_ == 1) {
        // Z_u = { A_{u+1} + B_{u+1} }.
        BitMatrix coeffs(0, 6);
        BitVector r(6);
        r.set(u, 1);
        r.set(3 + u, 1);
        coeffs.append_row(std::move(r));
        c.description = LinearCombos{std::move(coeffs)};
      } else {
        // Z_u = { A_{u+1}, B_{u+1} }.
        UncodedIndices idx;
        idx.entries.emplace_back(0, u);
        idx.entries.emplace_back(1, u);
        c.description = idx;
      }
      c.stored_bits = evaluate_cache_description(c.description, lib);
      caches.push_back(std::move(c));
    }
    return caches;
  }

  std::uint64_t realization_count(const DemandVector& demand) const override {
    check_demand(demand);
    return 2;
  }

  std::vector<Query> queries_at(const DemandVector& demand, std::uint64_t realization) const override {
    check_demand(demand);
    if (realization >= 2) throw OutOfRange("realization out of range");
    int coin = static_cast<int>(realization);
    int v1 = coin;
    int v2 = DistinctVariantTable::db2_variant(coin, demand);
    return {make_query(0, v1), make_query(1, v2)};
  }

  Answer answer(const Query& query, const MessageLibrary& lib) const override {
    int variant = parse_variant(query.payload);
    const auto& rows = table_.answer_defs[static_cast<std::size_t>(query.db)][static_cast<std::size_t>(variant)];
    BitVector layout = lib.messages[0];
    layout.append(lib.messages[1]);
    BitVector bits(static_cast<long long>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) bits.set(static_cast<long long>(i), rows[i].dot(layout));
    return Answer{query.db, std::move(bits)};
  }

  BitVector decode(int user, const DemandVector& demand, const std::vector<Query>& queries,
                   const std::vector<Answer>& answers, const CacheContent& cache) const override {
    check_demand(demand);
    // Stack the served answer rows and the cache rows, then recover the
    // demanded message coordinates from the row space.
    BitMatrix eqs(0, 6);
    BitVector rhs(0);
    for (const auto& q : queries) {
      int variant = parse_variant(q.payload);
      const auto& rows = table_.answer_defs[static_cast<std::size_t>(q.db)][static_cast<std::size_t>(variant)];
      for (const auto& r : rows) eqs.append_row(r);
      rhs.append(answers[static_cast<std::size_t>(q.db)].bits);
    }
    if (corner_ == 1) {
      BitVector r(6);
      r.set(user, 1);
      r.set(3 + user, 1);
      eqs.append_row(std::move(r));
    } else {
      BitVector ra(6), rb(6);
      ra.set(user, 1);
      rb.set(3 + user, 1);
      eqs.append_row(std::move(ra));
      eqs.append_row(std::move(rb));
    }
    rhs.append(cache.stored_bits);

    int theta = demand.message_index(user);
    std::vector<long long> coords;
    for (long long i = 0; i < 3; ++i) coords.push_back(theta * 3 + i);
    auto decoded = recover_coordinates(eqs, rhs, coords);
    if (!decoded) throw DecodeFailure("distinct-demand decode: coordinates not recoverable");
    return *decoded;
  }

 private:
  Query make_query(int db, int variant) const {
    std::string payload = "{\"scheme\":\"" + name() + "\",\"db\":" + std::to_string(db + 1) +
                          ",\"variant\":" + std::to_string(variant + 1) + "}";
    return Query{db, std::move(payload)};
  }

  static int parse_variant(const std::string& payload) {
    const char* key = std::strstr(payload.c_str(), "\"variant\":");
    if (!key) throw InvalidParameter("malformed distinct-demand payload");
    int v = key[std::strlen("\"variant\":")] - '0';
    if (v != 1 && v != 2) throw InvalidParameter("distinct-demand variant must be 1 or 2");
    return v - 1;
  }

  int corner_;
  DistinctVariantTable table_;
  SystemParams params_;
};

}  // namespace

SchemePtr dd_corner1_scheme() { return std::make_shared<DistinctScheme>(1); }
SchemePtr dd_corner2_scheme() { return std::make_shared<DistinctScheme>(2); }

}  // namespace mupir
