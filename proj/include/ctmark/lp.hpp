#pragma once

#include <vector>

#include "ctmark/filters.hpp"
#include "ctmark/grid.hpp"

namespace ctmark {

/// Laplacian pyramid. bandpass[k] keeps the full detail at scale k
/// (sides /2^k); lowpass has sides /2^levels. The difference structure
/// reconstructs exactly for any filter pair.
struct LpDecomp {
    Grid2D lowpass;
    std::vector<Grid2D> bandpass;
};

LpDecomp lp_analyze(const Grid2D& img, int levels, const FilterBank& fb);
Grid2D lp_synthesize(const LpDecomp& d, const FilterBank& fb);

}  // namespace ctmark
