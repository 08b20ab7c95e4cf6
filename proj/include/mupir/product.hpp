#pragma once

#include <string>
#include <vector>

#include "mupir/sjpir.hpp"
#include "mupir/system.hpp"

namespace mupir {

// Packet layout of the coded caching placement: each message is split into
// C(Ku, t) packets of N^K bits, indexed by the t-subsets of users in
// lexicographic order; user u caches every packet whose subset contains u.
struct ManPlacement {
  int num_messages = 0;   // K
  int num_users = 0;      // Ku
  int num_dbs = 0;        // N
  int t = 0;
  long long packet_bits = 0;  // N^K
  std::vector<std::vector<int>> t_subsets;       // lex order
  std::vector<std::vector<int>> coded_subsets;   // (t+1)-subsets, lex order

  long long subset_index(const std::vector<int>& subset) const;
  long long packet_offset(int message, const std::vector<int>& subset) const;
  long long message_len() const;
};

ManPlacement man_placement(int num_messages, int num_users, int num_dbs, int t);

// Product design scheme: coded caching placement with per-subset XORs of
// single-user PIR answers. Load (Ku-t)/(t+1) * (1 + 1/N + ... + 1/N^(K-1)).
SchemePtr pd_scheme(int num_messages, int num_users, int num_dbs, int t);

// Demand-independent shape of a product-design query: subsets and per-user
// atom shapes with all symbol indices dropped.
std::string pd_structural_projection(const Query& query);

}  // namespace mupir
