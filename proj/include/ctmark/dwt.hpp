#pragma once

#include <vector>

#include "ctmark/filters.hpp"
#include "ctmark/grid.hpp"

namespace ctmark {

/// Separable orthogonal wavelet decomposition, periodic extension.
/// details[l-1] holds level l (sides N/2^l): horizontal = (col-lowpass,
/// row-highpass), vertical = (col-highpass, row-lowpass), diagonal =
/// highpass both ways.
struct WaveletDecomp {
    struct DetailLevel {
        Grid2D horizontal, vertical, diagonal;
    };
    Grid2D approximation;
    std::vector<DetailLevel> details;  // fine -> coarse: details[0] is level 1
};

WaveletDecomp dwt2_analyze(const Grid2D& img, int levels);
Grid2D dwt2_synthesize(const WaveletDecomp& d);

WaveletDecomp dwt2_analyze(const Grid2D& img, int levels, const FilterTaps& lowpass);
Grid2D dwt2_synthesize(const WaveletDecomp& d, const FilterTaps& lowpass);

}  // namespace ctmark
