#pragma once

#include <array>
#include <vector>

#include "mupir/system.hpp"

namespace mupir {

// Distinct-demand schemes for K = Ku = N = 2 and L = 3: corner points
// (1/3, 4/3) and (2/3, 1). The answer formulas are public constants; the only
// randomness is a fair coin choosing which of the two fixed answer variants
// each database serves, with the DB 2 variant paired to the DB 1 variant
// according to the demand.
struct DistinctVariantTable {
  // answer_defs[db][variant]: coefficient rows over the 6 unknowns
  // (A1,A2,A3,B1,B2,B3).
  std::array<std::array<std::vector<BitVector>, 2>, 2> answer_defs;

  // DB 1 serves variant `coin`; DB 2 serves the paired variant: the same
  // one for demand (1,2) and the opposite one for (2,1).
  static int db2_variant(int coin, const DemandVector& demand);
};

DistinctVariantTable dd1_table();
DistinctVariantTable dd2_table();

// Memory 1/3, load 4/3. Only distinct demands are accepted.
SchemePtr dd_corner1_scheme();
// Memory 2/3, load 1.
SchemePtr dd_corner2_scheme();

}  // namespace mupir
