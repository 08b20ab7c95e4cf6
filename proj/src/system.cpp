#include "mupir/system.hpp"

#include <json.hpp>

#include "mupir/errors.hpp"
#include "mupir/json_util.hpp"

namespace mupir {

long long SystemParams::cache_bits() const {
  Rat bits = cache_size * Rat(message_len);
  if (bits.denominator() != 1) throw ParamMismatch("M*L is not an integer number of cache bits");
  return bits.numerator();
}

void SystemParams::validate() const {
  if (num_messages < 1 || num_users < 1 || num_dbs < 1) throw InvalidParameter("K, Ku, N must be positive");
  if (message_len < 1) throw InvalidParameter("L must be positive");
  if (cache_size < Rat(0) || cache_size > Rat(num_messages)) throw InvalidParameter("M must be in [0, K]");
  cache_bits();
}

void MessageLibrary::validate() const {
  params.validate();
  if (static_cast<int>(messages.size()) != params.num_messages)
    throw ParamMismatch("library message count mismatch");
  for (const auto& m : messages)
    if (m.size() != params.message_len) throw ParamMismatch("library message length mismatch");
}

MessageLibrary random_library(const SystemParams& params, std::uint64_t seed) {
  Rng rng(Rng::derive(seed, "library"));
  MessageLibrary lib;
  lib.params = params;
  for (int k = 0; k < params.num_messages; ++k) {
    BitVector m(params.message_len);
    for (long long i = 0; i < params.message_len; ++i) m.set(i, static_cast<int>(rng.next_below(2)));
    lib.messages.push_back(std::move(m));
  }
  return lib;
}

std::string DemandVector::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(thetas[i]);
  }
  s += ')';
  return s;
}

std::vector<DemandVector> all_demands(int num_messages, int num_users) {
  std::vector<DemandVector> out;
  DemandVector cur;
  cur.thetas.assign(static_cast<std::size_t>(num_users), 1);
  while (true) {
    out.push_back(cur);
    int pos = num_users - 1;
    while (pos >= 0 && cur.thetas[static_cast<std::size_t>(pos)] == num_messages) {
      cur.thetas[static_cast<std::size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++cur.thetas[static_cast<std::size_t>(pos)];
  }
  return out;
}

std::vector<DemandVector> distinct_demands(int num_messages, int num_users) {
  std::vector<DemandVector> out;
  for (const auto& d : all_demands(num_messages, num_users)) {
    bool distinct = true;
    for (std::size_t i = 0; i < d.thetas.size() && distinct; ++i)
      for (std::size_t j = i + 1; j < d.thetas.size(); ++j)
        if (d.thetas[i] == d.thetas[j]) {
          distinct = false;
          break;
        }
    if (distinct) out.push_back(d);
  }
  return out;
}

BitVector evaluate_cache_description(const CacheDescription& desc, const MessageLibrary& lib) {
  if (std::holds_alternative<UncodedIndices>(desc)) {
    const auto& idx = std::get<UncodedIndices>(desc);
    BitVector out(static_cast<long long>(idx.entries.size()));
    for (std::size_t i = 0; i < idx.entries.size(); ++i) {
      auto [k, bit] = idx.entries[i];
      out.set(static_cast<long long>(i), lib.messages[static_cast<std::size_t>(k)].get(bit));
    }
    return out;
  }
  const auto& combos = std::get<LinearCombos>(desc);
  BitVector layout;
  for (const auto& m : lib.messages) layout.append(m);
  return mat_vec(combos.coeffs, layout);
}

std::string canonical_query_bytes(const Query& q) { return q.payload; }

Query parse_query_bytes(const std::string& bytes) {
  auto j = nlohmann::json::parse(bytes);
  Query q;
  q.db = j.at("db").get<int>() - 1;
  q.payload = bytes;
  return q;
}

std::vector<Query> Scheme::queries_seeded(const DemandVector& demand, std::uint64_t seed) const {
  check_demand(demand);
  std::uint64_t count = realization_count(demand);
  if (count == 0)
    throw NotEnumerable("scheme " + name() + " must override queries_seeded");
  Rng rng(Rng::derive(seed, "realization"));
  return queries_at(demand, rng.next_below(count));
}

std::vector<DemandVector> Scheme::demand_set() const {
  return all_demands(params().num_messages, params().num_users);
}

void Scheme::check_demand(const DemandVector& demand) const {
  const auto& p = params();
  if (static_cast<int>(demand.thetas.size()) != p.num_users) throw InvalidDemand("demand length mismatch");
  for (int t : demand.thetas)
    if (t < 1 || t > p.num_messages) throw InvalidDemand("demand entry out of range");
  for (const auto& d : demand_set())
    if (d == demand) return;
  throw InvalidDemand("demand " + demand.to_string() + " not supported by scheme " + name());
}

namespace {

Transcript finish_transcript(const Scheme& scheme, const MessageLibrary& lib, const DemandVector& demand,
                             std::uint64_t seed_or_realization, std::vector<Query> queries) {
  Transcript t;
  t.params = scheme.params();
  t.demand = demand;
  t.seed = seed_or_realization;
  t.caches = scheme.place(lib);
  t.queries = std::move(queries);
  t.download_bits = 0;
  for (const auto& q : t.queries) {
    t.answers.push_back(scheme.answer(q, lib));
    t.download_bits += t.answers.back().bits.size();
  }
  for (int u = 0; u < t.params.num_users; ++u)
    t.decoded.push_back(scheme.decode(u, demand, t.queries, t.answers, t.caches[static_cast<std::size_t>(u)]));
  t.load = Rat(t.download_bits, t.params.message_len);
  return t;
}

}  // namespace

Transcript run_transcript(const Scheme& scheme, const MessageLibrary& lib, const DemandVector& demand,
                          std::uint64_t seed) {
  lib.validate();
  return finish_transcript(scheme, lib, demand, seed, scheme.queries_seeded(demand, seed));
}

Transcript run_transcript_at(const Scheme& scheme, const MessageLibrary& lib, const DemandVector& demand,
                             std::uint64_t realization) {
  lib.validate();
  scheme.check_demand(demand);
  return finish_transcript(scheme, lib, demand, realization, scheme.queries_at(demand, realization));
}

std::string transcript_to_json(const Transcript& t) {
  nlohmann::ordered_json j;
  j["params"] = {{"K", t.params.num_messages},
                 {"Ku", t.params.num_users},
                 {"N", t.params.num_dbs},
                 {"L", t.params.message_len},
                 {"M", rat_to_string(t.params.cache_size)}};
  j["demand"] = t.demand.thetas;
  j["seed"] = t.seed;
  j["caches"] = nlohmann::ordered_json::array();
  for (const auto& c : t.caches)
    j["caches"].push_back({{"user", c.user + 1}, {"bits", c.stored_bits.to_bits()}});
  j["queries"] = nlohmann::ordered_json::array();
  for (const auto& q : t.queries)
    j["queries"].push_back({{"db", q.db + 1}, {"payload", nlohmann::ordered_json::parse(q.payload)}});
  j["answers"] = nlohmann::ordered_json::array();
  for (const auto& a : t.answers) j["answers"].push_back({{"db", a.db + 1}, {"bits", a.bits.to_bits()}});
  j["decoded"] = nlohmann::ordered_json::array();
  for (const auto& d : t.decoded) j["decoded"].push_back(d.to_bits());
  j["download_bits"] = t.download_bits;
  j["load"] = rat_to_string(t.load);
  return j.dump();
}

namespace {

class NaiveScheme : public Scheme {
 public:
  explicit NaiveScheme(SystemParams params, std::string name = "naive", bool embed_demand = false)
      : params_(std::move(params)), name_(std::move(name)), embed_demand_(embed_demand) {
    params_.validate();
    Rat per_message = params_.cache_size * Rat(params_.message_len, params_.num_messages);
    if (per_message.denominator() != 1)
      throw ParamMismatch("naive scheme requires M*L/K to be an integer bit count");
    prefix_ = per_message.numerator();
  }

  std::string name() const override { return name_; }
  const SystemParams& params() const override { return params_; }

  std::vector<CacheContent> place(const MessageLibrary& lib) const override {
    if (!(lib.params.num_messages == params_.num_messages && lib.params.message_len == params_.message_len))
      throw ParamMismatch("library does not match scheme parameters");
    std::vector<CacheContent> caches;
    for (int u = 0; u < params_.num_users; ++u) {
      CacheContent c;
      c.user = u;
      UncodedIndices idx;
      for (int k = 0; k < params_.num_messages; ++k)
        for (long long i = 0; i < prefix_; ++i) idx.entries.emplace_back(k, i);
      c.description = idx;
      c.stored_bits = evaluate_cache_description(c.description, lib);
      caches.push_back(std::move(c));
    }
    return caches;
  }

  std::uint64_t realization_count(const DemandVector&) const override { return 1; }

  std::vector<Query> queries_at(const DemandVector& demand, std::uint64_t realization) const override {
    check_demand(demand);
    if (realization != 0) throw OutOfRange("realization out of range");
    std::vector<Query> qs;
    for (int n = 0; n < params_.num_dbs; ++n) {
      std::string payload = "{\"scheme\":\"" + name_ + "\",\"db\":" + std::to_string(n + 1);
      if (embed_demand_) {
        payload += ",\"demand\":";
        json_append_int_array(payload, demand.thetas);
      }
      payload += "}";
      qs.push_back(Query{n, std::move(payload)});
    }
    return qs;
  }

  Answer answer(const Query& query, const MessageLibrary& lib) const override {
    Answer a;
    a.db = query.db;
    if (query.db == 0) {
      BitVector bits;
      for (const auto& m : lib.messages) bits.append(m.slice(prefix_, params_.message_len));
      a.bits = std::move(bits);
    } else {
      a.bits = BitVector(0);
    }
    return a;
  }

  BitVector decode(int user, const DemandVector& demand, const std::vector<Query>&,
                   const std::vector<Answer>& answers, const CacheContent& cache) const override {
    int k = demand.message_index(user);
    long long suffix = params_.message_len - prefix_;
    BitVector out = cache.stored_bits.slice(static_cast<long long>(k) * prefix_,
                                            static_cast<long long>(k + 1) * prefix_);
    out.append(answers.at(0).bits.slice(static_cast<long long>(k) * suffix,
                                        static_cast<long long>(k + 1) * suffix));
    return out;
  }

 private:
  SystemParams params_;
  std::string name_;
  bool embed_demand_;
  long long prefix_ = 0;
};

}  // namespace

SchemePtr naive_scheme(const SystemParams& params) { return std::make_shared<NaiveScheme>(params); }

SchemePtr strawman_scheme(const SystemParams& params) {
  return std::make_shared<NaiveScheme>(params, "strawman", true);
}

}  // namespace mupir
