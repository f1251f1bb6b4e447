#include "ctmark/contourlet.hpp"

#include <stdexcept>

namespace ctmark {

namespace {

const FilterBank& cached_bank() {
    static const FilterBank fb = load_pyramid_bank();
    return fb;
}

const FilterTaps& cached_ladder() {
    static const FilterTaps lt = load_ladder_taps();
    return lt;
}

void check_dir_levels(const std::vector<int>& dir_levels) {
    if (dir_levels.empty())
        throw std::invalid_argument("contourlet: dir_levels must be non-empty");
    for (int dl : dir_levels)
        if (dl < 1 || dl > 4)
            throw std::invalid_argument("contourlet: each dir_levels entry must be in 1..4");
}

}  // namespace

ContourletDecomp contourlet_analyze(const Grid2D& img, const std::vector<int>& dir_levels,
                                    const FilterBank& fb, const FilterTaps& ladder) {
    check_dir_levels(dir_levels);
    const int levels = static_cast<int>(dir_levels.size());
    LpDecomp lp = lp_analyze(img, levels, fb);

    ContourletDecomp d;
    d.dir_levels = dir_levels;
    d.lowpass = std::move(lp.lowpass);
    d.scales.resize(levels);
    // bandpass is fine→coarse; scales is coarse→fine
    for (int s = 0; s < levels; ++s)
        d.scales[s] = dfb_analyze(lp.bandpass[levels - 1 - s], dir_levels[s], ladder);
    return d;
}

Grid2D contourlet_synthesize(const ContourletDecomp& d, const FilterBank& fb,
                             const FilterTaps& ladder) {
    check_dir_levels(d.dir_levels);
    const int levels = static_cast<int>(d.dir_levels.size());
    if (static_cast<int>(d.scales.size()) != levels)
        throw std::invalid_argument("contourlet_synthesize: scale count mismatch");

    LpDecomp lp;
    lp.lowpass = d.lowpass;
    lp.bandpass.resize(levels);
    for (int s = 0; s < levels; ++s) {
        if (static_cast<int>(d.scales[s].size()) != (1 << d.dir_levels[s]))
            throw std::invalid_argument("contourlet_synthesize: subband count mismatch");
        lp.bandpass[levels - 1 - s] = dfb_synthesize(d.scales[s], ladder);
    }
    return lp_synthesize(lp, fb);
}

ContourletDecomp contourlet_analyze(const Grid2D& img, const std::vector<int>& dir_levels) {
    return contourlet_analyze(img, dir_levels, cached_bank(), cached_ladder());
}

Grid2D contourlet_synthesize(const ContourletDecomp& d) {
    return contourlet_synthesize(d, cached_bank(), cached_ladder());
}

}  // namespace ctmark
