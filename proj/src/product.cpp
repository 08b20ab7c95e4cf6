#include "mupir/product.hpp"

#include <algorithm>
#include <cstring>

#include "mupir/combin.hpp"
#include "mupir/errors.hpp"

namespace mupir {

long long ManPlacement::subset_index(const std::vector<int>& subset) const {
  auto it = std::find(t_subsets.begin(), t_subsets.end(), subset);
  if (it == t_subsets.end()) throw InvalidParameter("unknown placement subset");
  return it - t_subsets.begin();
}

long long ManPlacement::packet_offset(int message, const std::vector<int>& subset) const {
  (void)message;
  return subset_index(subset) * packet_bits;
}

long long ManPlacement::message_len() const {
  return static_cast<long long>(t_subsets.size()) * packet_bits;
}

ManPlacement man_placement(int num_messages, int num_users, int num_dbs, int t) {
  if (t < 1 || t > num_users) throw InvalidParameter("product design requires t in [1, Ku]");
  if (num_dbs < 2) throw InvalidParameter("product design requires N >= 2");
  ManPlacement p;
  p.num_messages = num_messages;
  p.num_users = num_users;
  p.num_dbs = num_dbs;
  p.t = t;
  p.packet_bits = sj_symbols(num_messages, num_dbs);
  p.t_subsets = subsets_of_size(num_users, t);
  p.coded_subsets = subsets_of_size(num_users, t + 1);
  return p;
}

namespace {

void scan_expect(const char*& p, const char* token) {
  std::size_t len = std::strlen(token);
  if (std::strncmp(p, token, len) != 0) throw InvalidParameter("malformed pd payload");
  p += len;
}

long long scan_ll(const char*& p) {
  if (*p < '0' || *p > '9') throw InvalidParameter("malformed pd payload integer");
  long long v = 0;
  while (*p >= '0' && *p <= '9') v = v * 10 + (*p++ - '0');
  return v;
}

struct PdSubsetQuery {
  std::vector<int> subset;                          // 0-based users
  std::vector<std::vector<QueryAtom>> per_user;     // parallel to subset
};

std::vector<PdSubsetQuery> parse_pd_payload(const std::string& payload) {
  const char* key = std::strstr(payload.c_str(), "\"subsets\":[");
  if (!key) throw InvalidParameter("malformed pd payload");
  const char* p = key + std::strlen("\"subsets\":[");
  std::vector<PdSubsetQuery> out;
  while (*p != ']') {
    if (*p == ',') ++p;
    PdSubsetQuery sq;
    scan_expect(p, "{\"S\":[");
    while (*p != ']') {
      if (*p == ',') ++p;
      sq.subset.push_back(static_cast<int>(scan_ll(p)) - 1);
    }
    scan_expect(p, "],\"per_user\":[");
    while (*p != ']') {
      if (*p == ',') ++p;
      scan_expect(p, "{\"u\":");
      scan_ll(p);  // user id; position in the subset list fixes the pairing
      scan_expect(p, ",\"atoms\":");
      sq.per_user.push_back(sj_atoms_from_json_fragment(p));
      scan_expect(p, "}");
    }
    scan_expect(p, "]}");
    out.push_back(std::move(sq));
  }
  return out;
}

class PdScheme : public Scheme {
 public:
  PdScheme(int num_messages, int num_users, int num_dbs, int t)
      : placement_(man_placement(num_messages, num_users, num_dbs, t)) {
    params_.num_messages = num_messages;
    params_.num_users = num_users;
    params_.num_dbs = num_dbs;
    params_.message_len = placement_.message_len();
    params_.cache_size = Rat(static_cast<long long>(t) * num_messages, num_users);
    params_.validate();
    cached_subsets_.resize(static_cast<std::size_t>(num_users));
    for (int u = 0; u < num_users; ++u)
      for (const auto& subset : placement_.t_subsets)
        if (std::find(subset.begin(), subset.end(), u) != subset.end())
          cached_subsets_[static_cast<std::size_t>(u)].push_back(subset);
  }

  std::string name() const override { return "pd"; }
  const SystemParams& params() const override { return params_; }

  void check_demand(const DemandVector& demand) const override {
    if (static_cast<int>(demand.thetas.size()) != params_.num_users)
      throw InvalidDemand("demand length mismatch");
    for (int t : demand.thetas)
      if (t < 1 || t > params_.num_messages) throw InvalidDemand("demand entry out of range");
  }

  std::vector<CacheContent> place(const MessageLibrary& lib) const override {
    if (lib.params.num_messages != params_.num_messages || lib.params.message_len != params_.message_len)
      throw ParamMismatch("library does not match pd scheme parameters");
    std::vector<CacheContent> caches;
    for (int u = 0; u < params_.num_users; ++u) {
      UncodedIndices idx;
      for (int k = 0; k < params_.num_messages; ++k)
        for (const auto& subset : placement_.t_subsets) {
          if (std::find(subset.begin(), subset.end(), u) == subset.end()) continue;
          long long base = placement_.packet_offset(k, subset);
          for (long long i = 0; i < placement_.packet_bits; ++i) idx.entries.emplace_back(k, base + i);
        }
      CacheContent c;
      c.user = u;
      c.description = idx;
      c.stored_bits = evaluate_cache_description(c.description, lib);
      caches.push_back(std::move(c));
    }
    return caches;
  }

  std::uint64_t realization_count(const DemandVector&) const override {
    long long symbols = placement_.packet_bits;
    if (symbols > 20) return 0;
    std::uint64_t f = factorial(static_cast<int>(symbols));
    std::uint64_t total = 1;
    for (std::size_t s = 0; s < perm_slots(); ++s) {
      total = checked_mul(total, f);
      if (total == 0) return 0;
    }
    return total;
  }

  std::vector<Query> queries_at(const DemandVector& demand, std::uint64_t realization) const override {
    check_demand(demand);
    std::uint64_t count = realization_count(demand);
    if (count == 0) throw NotEnumerable("pd permutation space exceeds 64 bits");
    if (realization >= count) throw OutOfRange("pd realization out of range");
    long long symbols = placement_.packet_bits;
    std::uint64_t f = factorial(static_cast<int>(symbols));
    // Slot order: subsets lex, users ascending within the subset, then
    // message index; the last slot takes the lowest digit.
    std::size_t slots = perm_slots();
    std::vector<std::vector<long long>> perms(slots);
    for (std::size_t s = slots; s-- > 0;) {
      auto p = unrank_permutation(static_cast<int>(symbols), realization % f);
      realization /= f;
      perms[s].assign(p.begin(), p.end());
    }
    return emit(demand, perms);
  }

  std::vector<Query> queries_seeded(const DemandVector& demand, std::uint64_t seed) const override {
    check_demand(demand);
    // Independent permutation stream per (S, u, k), keyed off the master
    // seed, so per-subset outputs do not depend on evaluation order.
    std::vector<std::vector<long long>> perms;
    perms.reserve(perm_slots());
    for (const auto& subset : placement_.coded_subsets)
      for (int u : subset)
        for (int k = 0; k < params_.num_messages; ++k) {
          std::string label = "pd/S=";
          for (int x : subset) label += std::to_string(x) + ".";
          label += "/u=" + std::to_string(u) + "/k=" + std::to_string(k);
          Rng rng(Rng::derive(seed, label));
          auto p = rng.permutation(static_cast<int>(placement_.packet_bits));
          perms.emplace_back(p.begin(), p.end());
        }
    return emit(demand, perms);
  }

  Answer answer(const Query& query, const MessageLibrary& lib) const override {
    auto subsets = parse_pd_payload(query.payload);
    BitVector bits(0);
    for (const auto& sq : subsets) {
      BitVector acc;
      for (std::size_t i = 0; i < sq.subset.size(); ++i) {
        int u = sq.subset[i];
        auto sub = sub_library(lib, without(sq.subset, u));
        BitVector part = sj_answer_atoms(sq.per_user[i], sub);
        if (acc.size() == 0)
          acc = std::move(part);
        else
          acc ^= part;
      }
      bits.append(acc);
    }
    return Answer{query.db, std::move(bits)};
  }

  BitVector decode(int user, const DemandVector& demand, const std::vector<Query>& queries,
                   const std::vector<Answer>& answers, const CacheContent& cache) const override {
    check_demand(demand);
    int theta = demand.message_index(user);
    std::vector<std::vector<PdSubsetQuery>> per_db(queries.size());
    for (const auto& q : queries) per_db[static_cast<std::size_t>(q.db)] = parse_pd_payload(q.payload);

    // Cached packets, reconstructed from the stored bits.
    auto cached_packet = [&](int k, const std::vector<int>& subset) {
      long long per_message = static_cast<long long>(cached_subsets(user).size()) * placement_.packet_bits;
      long long pos = 0;
      for (const auto& s : cached_subsets(user)) {
        if (s == subset) {
          long long base = static_cast<long long>(k) * per_message + pos * placement_.packet_bits;
          return cache.stored_bits.slice(base, base + placement_.packet_bits);
        }
        ++pos;
      }
      throw DecodeFailure("pd packet not cached");
    };

    long long block_len = sj_download_per_db(params_.num_messages, params_.num_dbs);
    std::vector<BitVector> decoded_packets;  // parallel to t_subsets not containing user
    std::vector<std::vector<int>> decoded_subsets;
    for (std::size_t si = 0; si < placement_.coded_subsets.size(); ++si) {
      const auto& S = placement_.coded_subsets[si];
      auto it = std::find(S.begin(), S.end(), user);
      if (it == S.end()) continue;
      std::size_t upos = static_cast<std::size_t>(it - S.begin());

      std::vector<std::vector<QueryAtom>> own_atoms(static_cast<std::size_t>(params_.num_dbs));
      std::vector<BitVector> stripped(static_cast<std::size_t>(params_.num_dbs));
      for (int db = 0; db < params_.num_dbs; ++db) {
        const auto& sq = per_db[static_cast<std::size_t>(db)].at(si);
        BitVector acc = answers[static_cast<std::size_t>(db)].bits.slice(
            static_cast<long long>(si) * block_len, static_cast<long long>(si + 1) * block_len);
        for (std::size_t i = 0; i < sq.subset.size(); ++i) {
          if (i == upos) continue;
          int other = sq.subset[i];
          std::vector<BitVector> sub;
          for (int k = 0; k < params_.num_messages; ++k)
            sub.push_back(cached_packet(k, without(S, other)));
          acc ^= sj_answer_atoms(sq.per_user[i], sub);
        }
        own_atoms[static_cast<std::size_t>(db)] = sq.per_user[upos];
        stripped[static_cast<std::size_t>(db)] = std::move(acc);
      }
      decoded_packets.push_back(sj_decode(theta, placement_.packet_bits, own_atoms, stripped));
      decoded_subsets.push_back(without(S, user));
    }

    BitVector out;
    for (const auto& subset : placement_.t_subsets) {
      if (std::find(subset.begin(), subset.end(), user) != subset.end()) {
        out.append(cached_packet(theta, subset));
      } else {
        auto it = std::find(decoded_subsets.begin(), decoded_subsets.end(), subset);
        if (it == decoded_subsets.end()) throw DecodeFailure("pd packet not decoded");
        out.append(decoded_packets[static_cast<std::size_t>(it - decoded_subsets.begin())]);
      }
    }
    return out;
  }

 private:
  std::size_t perm_slots() const {
    return placement_.coded_subsets.size() * static_cast<std::size_t>(placement_.t + 1) *
           static_cast<std::size_t>(params_.num_messages);
  }

  static std::vector<int> without(const std::vector<int>& set, int element) {
    std::vector<int> out;
    out.reserve(set.size());
    for (int x : set)
      if (x != element) out.push_back(x);
    return out;
  }

  const std::vector<std::vector<int>>& cached_subsets(int user) const {
    return cached_subsets_[static_cast<std::size_t>(user)];
  }

  std::vector<BitVector> sub_library(const MessageLibrary& lib, const std::vector<int>& subset) const {
    std::vector<BitVector> sub;
    sub.reserve(static_cast<std::size_t>(params_.num_messages));
    for (int k = 0; k < params_.num_messages; ++k) {
      long long base = placement_.packet_offset(k, subset);
      sub.push_back(lib.messages[static_cast<std::size_t>(k)].slice(base, base + placement_.packet_bits));
    }
    return sub;
  }

  std::vector<Query> emit(const DemandVector& demand, const std::vector<std::vector<long long>>& perms) const {
    // One SJ plan per (S, u), all sharing the demand-independent structure.
    std::vector<std::vector<SjPlan>> plans(placement_.coded_subsets.size());
    std::size_t slot = 0;
    for (std::size_t si = 0; si < placement_.coded_subsets.size(); ++si) {
      const auto& S = placement_.coded_subsets[si];
      for (int u : S) {
        std::vector<std::vector<long long>> user_perms;
        for (int k = 0; k < params_.num_messages; ++k) user_perms.push_back(perms.at(slot++));
        plans[si].push_back(sj_plan_with_perms(params_.num_messages, params_.num_dbs,
                                               demand.message_index(u), std::move(user_perms)));
      }
    }
    std::vector<Query> queries;
    for (int db = 0; db < params_.num_dbs; ++db) {
      std::string payload = "{\"scheme\":\"pd\",\"db\":" + std::to_string(db + 1) + ",\"subsets\":[";
      for (std::size_t si = 0; si < placement_.coded_subsets.size(); ++si) {
        if (si) payload += ',';
        const auto& S = placement_.coded_subsets[si];
        payload += "{\"S\":[";
        for (std::size_t i = 0; i < S.size(); ++i) {
          if (i) payload += ',';
          payload += std::to_string(S[i] + 1);
        }
        payload += "],\"per_user\":[";
        for (std::size_t i = 0; i < S.size(); ++i) {
          if (i) payload += ',';
          payload += "{\"u\":" + std::to_string(S[i] + 1) + ",\"atoms\":";
          payload += sj_atoms_to_json(plans[si][i].per_db[static_cast<std::size_t>(db)]);
          payload += "}";
        }
        payload += "]}";
      }
      payload += "]}";
      queries.push_back(Query{db, std::move(payload)});
    }
    return queries;
  }

  SystemParams params_;
  ManPlacement placement_;
  std::vector<std::vector<std::vector<int>>> cached_subsets_;
};

}  // namespace

SchemePtr pd_scheme(int num_messages, int num_users, int num_dbs, int t) {
  return std::make_shared<PdScheme>(num_messages, num_users, num_dbs, t);
}

std::string pd_structural_projection(const Query& query) {
  auto subsets = parse_pd_payload(query.payload);
  std::string out;
  for (const auto& sq : subsets) {
    out += "S=(";
    for (std::size_t i = 0; i < sq.subset.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(sq.subset[i] + 1);
    }
    out += "){";
    for (const auto& atoms : sq.per_user) out += sj_structural_projection(atoms) + "|";
    out += "}";
  }
  return out;
}

}  // namespace mupir
