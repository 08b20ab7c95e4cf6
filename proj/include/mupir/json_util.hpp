#pragma once

#include <string>
#include <vector>

#include "mupir/gf2.hpp"

namespace mupir {

// Minimal append-style JSON writers for canonical query payloads. Query
// generation sits on the hot path of exhaustive privacy enumeration, so
// payload bytes are built directly instead of going through a DOM.
inline void json_append_int(std::string& out, long long v) { out += std::to_string(v); }

inline void json_append_int_array(std::string& out, const std::vector<int>& vs) {
  out += '[';
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(vs[i]);
  }
  out += ']';
}

inline void json_append_longlong_array(std::string& out, const std::vector<long long>& vs) {
  out += '[';
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(vs[i]);
  }
  out += ']';
}

inline void json_append_bitvector(std::string& out, const BitVector& v) {
  out += '[';
  for (long long i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += v.get(i) ? '1' : '0';
  }
  out += ']';
}

}  // namespace mupir
