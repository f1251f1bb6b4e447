#pragma once

#include <vector>

#include "ctmark/dfb.hpp"
#include "ctmark/filters.hpp"
#include "ctmark/grid.hpp"
#include "ctmark/lp.hpp"

namespace ctmark {

/// Pyramid + directional tree. scales is ordered coarse→fine (index 0 =
/// coarsest); scale s holds 2^dir_levels[s] directional subbands, all of
/// equal shape within a scale. "Finest scale" always means scales.back().
struct ContourletDecomp {
    Grid2D lowpass;
    std::vector<std::vector<Grid2D>> scales;
    std::vector<int> dir_levels;
};

ContourletDecomp contourlet_analyze(const Grid2D& img, const std::vector<int>& dir_levels);
Grid2D contourlet_synthesize(const ContourletDecomp& d);

/// Same, with explicit filters (tests exercise these directly).
ContourletDecomp contourlet_analyze(const Grid2D& img, const std::vector<int>& dir_levels,
                                    const FilterBank& fb, const FilterTaps& ladder);
Grid2D contourlet_synthesize(const ContourletDecomp& d, const FilterBank& fb,
                             const FilterTaps& ladder);

}  // namespace ctmark
