#pragma once

#include <string>
#include <vector>

namespace ctmark {

/// 1-D real filter with an anchor (center) index into taps.
struct FilterTaps {
    std::vector<double> taps;
    int anchor = 0;
};

/// Two-channel analysis/synthesis bank. Perfect reconstruction is a test
/// obligation, not a construction guarantee.
struct FilterBank {
    FilterTaps analysis_lowpass;
    FilterTaps analysis_highpass;
    FilterTaps synthesis_lowpass;
    FilterTaps synthesis_highpass;
};

/// Directory holding the coefficient files: CTMARK_FILTER_DIR env var if
/// set, otherwise the path baked in at build time.
std::string filter_dir();

/// Plain-text format: '#' comments, first non-comment line is the anchor
/// index, then one tap per line.
FilterTaps load_filter_taps(const std::string& path);

/// The 9/7 biorthogonal bank used by the pyramid.
FilterBank load_pyramid_bank();

/// Ladder predictor coefficients for the directional tree.
FilterTaps load_ladder_taps();

/// 8-tap orthogonal wavelet lowpass.
FilterTaps load_wavelet_lowpass();

}  // namespace ctmark
