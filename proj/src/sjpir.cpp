#include "mupir/sjpir.hpp"

#include <algorithm>
#include <cstring>
#include <map>

#include "mupir/combin.hpp"
#include "mupir/errors.hpp"
#include "mupir/json_util.hpp"

namespace mupir {

long long sj_download_per_db(int num_messages, int num_dbs) {
  if (num_messages < 1 || num_dbs < 2) throw InvalidParameter("sj engine requires K >= 1, N >= 2");
  long long total = 0;
  for (int k = 1; k <= num_messages; ++k)
    total += binomial(num_messages, k) * int_pow(num_dbs - 1, k - 1);
  return total;
}

long long sj_symbols(int num_messages, int num_dbs) { return int_pow(num_dbs, num_messages); }

std::uint64_t sj_realization_count(int num_messages, int num_dbs) {
  long long symbols = sj_symbols(num_messages, num_dbs);
  if (symbols > 20) return 0;
  std::uint64_t f = factorial(static_cast<int>(symbols));
  std::uint64_t total = 1;
  for (int m = 0; m < num_messages; ++m) {
    total = checked_mul(total, f);
    if (total == 0) return 0;
  }
  return total;
}

namespace {

struct TaggedAtom {
  QueryAtom atom;
  int block = 0;
};

bool tagged_less(const TaggedAtom& a, const TaggedAtom& b) {
  if (a.block != b.block) return a.block < b.block;
  return a.atom.messages < b.atom.messages;
}

}  // namespace

SjPlan sj_plan_with_perms(int num_messages, int num_dbs, int theta,
                          std::vector<std::vector<long long>> perms) {
  int K = num_messages, N = num_dbs;
  if (K < 1 || N < 2) throw InvalidParameter("sj engine requires K >= 1, N >= 2");
  if (theta < 0 || theta >= K) throw InvalidDemand("sj demand out of range");
  long long L = sj_symbols(K, N);
  if (static_cast<int>(perms.size()) != K) throw InvalidParameter("sj engine needs K permutations");
  for (const auto& p : perms)
    if (static_cast<long long>(p.size()) != L) throw InvalidParameter("sj permutation length mismatch");

  std::vector<long long> counters(static_cast<std::size_t>(K), 0);
  auto fresh = [&](int m) {
    long long raw = counters[static_cast<std::size_t>(m)]++;
    if (raw >= L) throw DecodeFailure("sj fresh-symbol counter overflow");
    return perms[static_cast<std::size_t>(m)][static_cast<std::size_t>(raw)];
  };

  std::vector<std::vector<TaggedAtom>> built(static_cast<std::size_t>(N));
  // Desired-free atoms of the previous block, per DB, in construction order.
  std::vector<std::vector<QueryAtom>> prev_free(static_cast<std::size_t>(N));

  // Block 1: one fresh symbol of every message at every DB.
  for (int db = 0; db < N; ++db) {
    for (int m = 0; m < K; ++m) {
      QueryAtom a;
      a.messages = {m};
      a.indices = {fresh(m)};
      if (m != theta) prev_free[static_cast<std::size_t>(db)].push_back(a);
      built[static_cast<std::size_t>(db)].push_back({std::move(a), 1});
    }
  }

  for (int k = 2; k <= K; ++k) {
    std::vector<std::vector<QueryAtom>> cur_free(static_cast<std::size_t>(N));
    for (int db = 0; db < N; ++db) {
      // Replay every desired-free (k-1)-atom of every other DB, paired with
      // one fresh symbol of the demanded message.
      for (int src = 0; src < N; ++src) {
        if (src == db) continue;
        for (const auto& side : prev_free[static_cast<std::size_t>(src)]) {
          QueryAtom a;
          a.messages.reserve(side.messages.size() + 1);
          a.indices.reserve(side.messages.size() + 1);
          bool placed = false;
          for (std::size_t i = 0; i < side.messages.size(); ++i) {
            if (!placed && theta < side.messages[i]) {
              a.messages.push_back(theta);
              a.indices.push_back(fresh(theta));
              placed = true;
            }
            a.messages.push_back(side.messages[i]);
            a.indices.push_back(side.indices[i]);
          }
          if (!placed) {
            a.messages.push_back(theta);
            a.indices.push_back(fresh(theta));
          }
          built[static_cast<std::size_t>(db)].push_back({std::move(a), k});
        }
      }
      // Fresh desired-free k-atoms: every k-subset avoiding theta appears
      // (N-1)^(k-1) times.
      long long copies = int_pow(N - 1, k - 1);
      for (const auto& subset : subsets_of_size(K, k)) {
        if (std::find(subset.begin(), subset.end(), theta) != subset.end()) continue;
        for (long long c = 0; c < copies; ++c) {
          QueryAtom a;
          a.messages = subset;
          for (int m : subset) a.indices.push_back(fresh(m));
          cur_free[static_cast<std::size_t>(db)].push_back(a);
          built[static_cast<std::size_t>(db)].push_back({std::move(a), k});
        }
      }
    }
    prev_free = std::move(cur_free);
  }

  SjPlan plan;
  plan.num_messages = K;
  plan.num_dbs = N;
  plan.theta = theta;
  plan.symbols = L;
  plan.perms = std::move(perms);
  plan.per_db.resize(static_cast<std::size_t>(N));
  for (int db = 0; db < N; ++db) {
    auto& atoms = built[static_cast<std::size_t>(db)];
    std::stable_sort(atoms.begin(), atoms.end(), tagged_less);
    plan.per_db[static_cast<std::size_t>(db)].reserve(atoms.size());
    for (auto& t : atoms) plan.per_db[static_cast<std::size_t>(db)].push_back(std::move(t.atom));
  }
  return plan;
}

SjPlan sj_plan(int num_messages, int num_dbs, int theta, Rng& rng) {
  long long L = sj_symbols(num_messages, num_dbs);
  std::vector<std::vector<long long>> perms;
  for (int m = 0; m < num_messages; ++m) {
    auto p = rng.permutation(static_cast<int>(L));
    perms.emplace_back(p.begin(), p.end());
  }
  return sj_plan_with_perms(num_messages, num_dbs, theta, std::move(perms));
}

SjPlan sj_plan_at(int num_messages, int num_dbs, int theta, std::uint64_t realization) {
  std::uint64_t count = sj_realization_count(num_messages, num_dbs);
  if (count == 0) throw NotEnumerable("sj permutation space exceeds 64 bits");
  if (realization >= count) throw OutOfRange("sj realization out of range");
  long long L = sj_symbols(num_messages, num_dbs);
  std::uint64_t f = factorial(static_cast<int>(L));
  std::vector<std::vector<long long>> perms(static_cast<std::size_t>(num_messages));
  for (int m = num_messages - 1; m >= 0; --m) {
    auto p = unrank_permutation(static_cast<int>(L), realization % f);
    realization /= f;
    perms[static_cast<std::size_t>(m)].assign(p.begin(), p.end());
  }
  return sj_plan_with_perms(num_messages, num_dbs, theta, std::move(perms));
}

BitVector sj_answer_atoms(const std::vector<QueryAtom>& atoms, const std::vector<BitVector>& messages) {
  BitVector bits(static_cast<long long>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    int acc = 0;
    const auto& a = atoms[i];
    for (std::size_t j = 0; j < a.messages.size(); ++j) {
      int m = a.messages[j];
      if (m < 0 || m >= static_cast<int>(messages.size()))
        throw DimensionMismatch("sj atom references missing message");
      acc ^= messages[static_cast<std::size_t>(m)].get(a.indices[j]);
    }
    bits.set(static_cast<long long>(i), acc);
  }
  return bits;
}

BitVector sj_answer(const SjPlan& plan, int db, const std::vector<BitVector>& messages) {
  return sj_answer_atoms(plan.per_db.at(static_cast<std::size_t>(db)), messages);
}

namespace {

std::string atom_key(const QueryAtom& a, int skip_message = -1) {
  std::string key;
  for (std::size_t i = 0; i < a.messages.size(); ++i) {
    if (a.messages[i] == skip_message) continue;
    key += std::to_string(a.messages[i]);
    key += ':';
    key += std::to_string(a.indices[i]);
    key += ';';
  }
  return key;
}

}  // namespace

BitVector sj_decode(int theta, long long symbols, const std::vector<std::vector<QueryAtom>>& per_db,
                    const std::vector<BitVector>& answer_bits) {
  if (per_db.size() != answer_bits.size()) throw DimensionMismatch("sj decode answer count mismatch");
  std::map<std::string, int> side;
  for (std::size_t db = 0; db < per_db.size(); ++db) {
    const auto& atoms = per_db[db];
    if (answer_bits[db].size() != static_cast<long long>(atoms.size()))
      throw DimensionMismatch("sj decode answer length mismatch");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const auto& a = atoms[i];
      if (std::find(a.messages.begin(), a.messages.end(), theta) != a.messages.end()) continue;
      side[atom_key(a)] = answer_bits[db].get(static_cast<long long>(i));
    }
  }

  BitVector out(symbols);
  std::vector<bool> seen(static_cast<std::size_t>(symbols), false);
  for (std::size_t db = 0; db < per_db.size(); ++db) {
    const auto& atoms = per_db[db];
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const auto& a = atoms[i];
      auto it = std::find(a.messages.begin(), a.messages.end(), theta);
      if (it == a.messages.end()) continue;
      long long idx = a.indices[static_cast<std::size_t>(it - a.messages.begin())];
      int bit = answer_bits[db].get(static_cast<long long>(i));
      if (a.messages.size() > 1) {
        auto found = side.find(atom_key(a, theta));
        if (found == side.end()) throw DecodeFailure("sj side-information atom missing");
        bit ^= found->second;
      }
      if (idx < 0 || idx >= symbols || seen[static_cast<std::size_t>(idx)])
        throw DecodeFailure("sj demanded symbol index repeated or out of range");
      seen[static_cast<std::size_t>(idx)] = true;
      out.set(idx, bit);
    }
  }
  for (bool s : seen)
    if (!s) throw DecodeFailure("sj decode did not cover every demanded symbol");
  return out;
}

BitVector sj_decode_plan(const SjPlan& plan, const std::vector<BitVector>& answer_bits) {
  return sj_decode(plan.theta, plan.symbols, plan.per_db, answer_bits);
}

std::string sj_structural_projection(const std::vector<QueryAtom>& atoms) {
  std::string out;
  for (const auto& a : atoms) {
    out += '(';
    for (std::size_t i = 0; i < a.messages.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(a.messages[i] + 1);
    }
    out += ')';
  }
  return out;
}

std::string sj_atoms_to_json(const std::vector<QueryAtom>& atoms) {
  std::string out = "[";
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += ',';
    out += "{\"msgs\":[";
    for (std::size_t j = 0; j < atoms[i].messages.size(); ++j) {
      if (j) out += ',';
      out += std::to_string(atoms[i].messages[j] + 1);
    }
    out += "],\"idx\":[";
    for (std::size_t j = 0; j < atoms[i].indices.size(); ++j) {
      if (j) out += ',';
      out += std::to_string(atoms[i].indices[j] + 1);
    }
    out += "]}";
  }
  out += "]";
  return out;
}

namespace {

long long scan_int(const char*& p) {
  bool neg = false;
  if (*p == '-') {
    neg = true;
    ++p;
  }
  if (*p < '0' || *p > '9') throw InvalidParameter("malformed integer in query payload");
  long long v = 0;
  while (*p >= '0' && *p <= '9') v = v * 10 + (*p++ - '0');
  return neg ? -v : v;
}

void expect(const char*& p, const char* token) {
  std::size_t len = std::strlen(token);
  if (std::strncmp(p, token, len) != 0) throw InvalidParameter("malformed query payload");
  p += len;
}

}  // namespace

std::vector<QueryAtom> sj_atoms_from_json_fragment(const char*& p) {
  expect(p, "[");
  std::vector<QueryAtom> atoms;
  while (*p != ']') {
    if (*p == ',') ++p;
    QueryAtom a;
    expect(p, "{\"msgs\":[");
    while (*p != ']') {
      if (*p == ',') ++p;
      a.messages.push_back(static_cast<int>(scan_int(p)) - 1);
    }
    expect(p, "],\"idx\":[");
    while (*p != ']') {
      if (*p == ',') ++p;
      a.indices.push_back(scan_int(p) - 1);
    }
    expect(p, "]}");
    atoms.push_back(std::move(a));
  }
  expect(p, "]");
  return atoms;
}

namespace {

class SjScheme : public Scheme {
 public:
  SjScheme(int num_messages, int num_dbs) {
    params_.num_messages = num_messages;
    params_.num_users = 1;
    params_.num_dbs = num_dbs;
    params_.message_len = sj_symbols(num_messages, num_dbs);
    params_.cache_size = Rat(0);
    params_.validate();
    if (num_dbs < 2) throw InvalidParameter("sj scheme requires N >= 2");
  }

  std::string name() const override { return "sj"; }
  const SystemParams& params() const override { return params_; }

  std::vector<CacheContent> place(const MessageLibrary& lib) const override {
    if (lib.params.num_messages != params_.num_messages || lib.params.message_len != params_.message_len)
      throw ParamMismatch("library does not match sj scheme parameters");
    CacheContent c;
    c.user = 0;
    c.stored_bits = BitVector(0);
    c.description = UncodedIndices{};
    return {c};
  }

  std::uint64_t realization_count(const DemandVector&) const override {
    return sj_realization_count(params_.num_messages, params_.num_dbs);
  }

  std::vector<Query> queries_at(const DemandVector& demand, std::uint64_t realization) const override {
    check_demand(demand);
    SjPlan plan = sj_plan_at(params_.num_messages, params_.num_dbs, demand.message_index(0), realization);
    return emit(plan);
  }

  std::vector<Query> queries_seeded(const DemandVector& demand, std::uint64_t seed) const override {
    check_demand(demand);
    Rng rng(Rng::derive(seed, "sj"));
    SjPlan plan = sj_plan(params_.num_messages, params_.num_dbs, demand.message_index(0), rng);
    return emit(plan);
  }

  Answer answer(const Query& query, const MessageLibrary& lib) const override {
    const char* p = query.payload.c_str();
    const char* key = std::strstr(p, "\"atoms\":");
    if (!key) throw InvalidParameter("malformed sj payload");
    p = key + std::strlen("\"atoms\":");
    auto atoms = sj_atoms_from_json_fragment(p);
    return Answer{query.db, sj_answer_atoms(atoms, lib.messages)};
  }

  BitVector decode(int, const DemandVector& demand, const std::vector<Query>& queries,
                   const std::vector<Answer>& answers, const CacheContent&) const override {
    std::vector<std::vector<QueryAtom>> per_db;
    std::vector<BitVector> bits;
    for (const auto& q : queries) {
      const char* p = q.payload.c_str();
      const char* key = std::strstr(p, "\"atoms\":");
      if (!key) throw InvalidParameter("malformed sj payload");
      p = key + std::strlen("\"atoms\":");
      per_db.push_back(sj_atoms_from_json_fragment(p));
      bits.push_back(answers[static_cast<std::size_t>(q.db)].bits);
    }
    return sj_decode(demand.message_index(0), params_.message_len, per_db, bits);
  }

 private:
  std::vector<Query> emit(const SjPlan& plan) const {
    std::vector<Query> queries;
    for (int db = 0; db < params_.num_dbs; ++db) {
      std::string payload = "{\"scheme\":\"sj\",\"db\":" + std::to_string(db + 1) + ",\"atoms\":";
      payload += sj_atoms_to_json(plan.per_db[static_cast<std::size_t>(db)]);
      payload += "}";
      queries.push_back(Query{db, std::move(payload)});
    }
    return queries;
  }

  SystemParams params_;
};

}  // namespace

SchemePtr sj_scheme(int num_messages, int num_dbs) {
  return std::make_shared<SjScheme>(num_messages, num_dbs);
}

}  // namespace mupir
