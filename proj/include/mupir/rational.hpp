#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <string>

namespace mupir {

// Exact rational arithmetic for memory sizes, loads and probabilities.
// Values in this library stay tiny (numerators/denominators well below 2^40),
// so a 64-bit rational is more than enough.
using Rat = boost::rational<long long>;

inline std::string rat_to_string(const Rat& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double rat_to_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// Parses "p/q" or a bare integer "p".
Rat rat_from_string(const std::string& s);

}  // namespace mupir
