#pragma once

#include "abmsam/sam.hpp"

#include <cstdint>

namespace abmsam {

/// Builds a balanced SAM with `nSectors` activity sectors (the last one a
/// non-market service sector bought mainly by government) and the same
/// institutional accounts as the Spanish table: GFCF, external, labor,
/// capital, four taxes, government and households. Output is solved through
/// the Leontief inverse, so producer rows balance by construction; the
/// remaining pass-through accounts are closed with residual items. A draw
/// that leaves a negative non-tax cell is redrawn from a stream derived from
/// the seed.
SamTable make_synthetic_sam(int nSectors, std::uint64_t seed, long long activeCount = 2'000'000,
                            double initUnempPct = 12.0);

}  // namespace abmsam
