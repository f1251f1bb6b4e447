#include "ctmark/filters.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef CTMARK_FILTER_DIR_DEFAULT
#define CTMARK_FILTER_DIR_DEFAULT "data/filters"
#endif

namespace ctmark {

std::string filter_dir() {
    if (const char* env = std::getenv("CTMARK_FILTER_DIR"); env && *env) return env;
    return CTMARK_FILTER_DIR_DEFAULT;
}

FilterTaps load_filter_taps(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("filter file not found: " + path);

    FilterTaps ft;
    bool have_anchor = false;
    std::string line;
    while (std::getline(in, line)) {
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        std::istringstream ls(line);
        if (!have_anchor) {
            long a;
            if (ls >> a) {
                ft.anchor = static_cast<int>(a);
                have_anchor = true;
                double extra;
                if (ls >> extra)
                    throw std::runtime_error("filter file: anchor line must hold one value: " + path);
            }
            continue;
        }
        double v;
        while (ls >> v) {
            if (!std::isfinite(v))
                throw std::runtime_error("filter file: non-finite tap in " + path);
            ft.taps.push_back(v);
        }
    }
    if (!have_anchor || ft.taps.empty())
        throw std::runtime_error("filter file: missing anchor or taps: " + path);
    if (ft.anchor < 0 || ft.anchor >= static_cast<int>(ft.taps.size()))
        throw std::runtime_error("filter file: anchor out of range: " + path);
    return ft;
}

FilterBank load_pyramid_bank() {
    const std::string d = filter_dir();
    FilterBank fb;
    fb.analysis_lowpass = load_filter_taps(d + "/cdf97_analysis_lowpass.txt");
    fb.analysis_highpass = load_filter_taps(d + "/cdf97_analysis_highpass.txt");
    fb.synthesis_lowpass = load_filter_taps(d + "/cdf97_synthesis_lowpass.txt");
    fb.synthesis_highpass = load_filter_taps(d + "/cdf97_synthesis_highpass.txt");
    return fb;
}

FilterTaps load_ladder_taps() {
    return load_filter_taps(filter_dir() + "/pkva12_ladder.txt");
}

FilterTaps load_wavelet_lowpass() {
    return load_filter_taps(filter_dir() + "/db4_lowpass.txt");
}

}  // namespace ctmark
