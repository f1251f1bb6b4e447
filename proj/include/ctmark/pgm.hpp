#pragma once

#include <string>

#include "ctmark/grid.hpp"

namespace ctmark {

/// Binary PGM (P5), maxval 255. P2 (ASCII) and other maxvals are rejected
/// with distinct error messages.
ImageU8 load_pgm(const std::string& path);
void save_pgm(const std::string& path, const ImageU8& img);

}  // namespace ctmark
