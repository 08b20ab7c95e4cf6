#pragma once

#include <cstdint>
#include <vector>

namespace mupir {

long long binomial(int n, int k);
long long int_pow(long long base, int exp);

// Multiplies with saturation to 0 on 64-bit overflow; 0 means "too large".
std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b);

// All k-subsets of {0,...,n-1} in lexicographic order, each ascending.
std::vector<std::vector<int>> subsets_of_size(int n, int k);

}  // namespace mupir
