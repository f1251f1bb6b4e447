#pragma once

#include <vector>

#include "ctmark/filters.hpp"
#include "ctmark/grid.hpp"

namespace ctmark {

/// Critically-sampled directional decomposition: a binary tree of
/// two-channel quincunx lifting splits. Produces 2^tree_depth subbands of
/// identical shape; index 0 is the DC-carrying path (the ladder predictor
/// reproduces constants, so constants drain into the all-even leaf).
/// Subband index bits spell the root-to-leaf path, even child = 0.
std::vector<Grid2D> dfb_analyze(const Grid2D& band, int tree_depth, const FilterTaps& ladder);

Grid2D dfb_synthesize(const std::vector<Grid2D>& subbands, const FilterTaps& ladder);

}  // namespace ctmark
