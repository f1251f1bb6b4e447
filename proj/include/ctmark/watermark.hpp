#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ctmark/contourlet.hpp"
#include "ctmark/dwt.hpp"
#include "ctmark/grid.hpp"

namespace ctmark {

/// Everything the blind detector is allowed to know besides the image:
/// the key, the embedding strength contract, and where the mark went.
struct EmbedRecord {
    uint64_t key = 0;
    double wdr_db = 0.0;
    double gamma = 0.0;
    int scale_index = 0;
    int subband_index = 0;
    int rows = 0, cols = 0;  // subband dims
};

/// Watermark-to-document ratio below which the mark is treated as absent.
constexpr double kWdrZeroCutoffDb = -200.0;

/// Bipolar +/-1 field from the keyed bit-exact generator, raster order.
Grid2D prs_generate(uint64_t key, int rows, int cols);

/// (finest scale index, index of its max-energy subband); energy ties go
/// to the lowest index.
std::pair<int, int> select_subband(const ContourletDecomp& d);

/// Mean power (1/MN) sum f^2.
double mean_power(const Grid2D& g);

/// gamma = sqrt(P_f * 10^(wdr_db/10)); WDR is the mean-power ratio in dB.
double gamma_for_wdr(const Grid2D& subband, double wdr_db);

/// Additive embedding g = f + gamma*s on the max-energy finest directional
/// subband. The pyramid is redundant, so a plain coefficient replacement
/// leaks into neighboring subbands on re-analysis; a few substitution
/// iterations (re-analyze, re-pin the target subband, re-synthesize) drive
/// the re-analyzed subband onto the target. Returns the unquantized image.
std::pair<Grid2D, EmbedRecord> embed_grid(const Grid2D& img, uint64_t key, double wdr_db,
                                          const std::vector<int>& dir_levels);

/// embed_grid + round-half-away + clamp to 8 bits.
std::pair<ImageU8, EmbedRecord> embed(const ImageU8& img, uint64_t key, double wdr_db,
                                      const std::vector<int>& dir_levels);

/// Wavelet-domain counterpart used by the WT-GARCH baseline: embeds in the
/// max-energy level-2 detail subband. Orthogonal transform, so a single
/// synthesis is exact. scale_index in the record is the wavelet level;
/// subband_index is 0/1/2 for horizontal/vertical/diagonal.
std::pair<Grid2D, EmbedRecord> wt_embed_grid(const Grid2D& img, uint64_t key, double wdr_db,
                                             int levels = 2);

/// {key, wdr_db, gamma, scale_index, subband_index, rows, cols}
std::string embed_record_to_json_string(const EmbedRecord& rec);
EmbedRecord embed_record_from_json_string(const std::string& text);

}  // namespace ctmark
