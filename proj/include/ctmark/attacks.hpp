#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctmark/grid.hpp"

namespace ctmark {

/// One attack instance. Fields are meaningful per kind:
///   jpeg: qf; rescale: sf; median/gaussian: window; awgn: noise_std, seed;
///   compose: children (applied left to right).
struct AttackSpec {
    std::string kind;
    int qf = 0;
    double sf = 0.0;
    int window = 0;
    double noise_std = 0.0;
    uint64_t seed = 0;
    std::vector<AttackSpec> children;
};

void validate_attack_spec(const AttackSpec& spec);

/// Canonical short label, e.g. "jpeg-60", "gaussian-5+awgn-10", "none".
std::string attack_label(const AttackSpec& spec);
bool attack_is_deterministic(const AttackSpec& spec);  // false iff it draws noise

ImageU8 jpeg_roundtrip(const ImageU8& img, int qf);
ImageU8 rescale_attack(const ImageU8& img, double sf);
ImageU8 median_filter(const ImageU8& img, int window);
ImageU8 gaussian_filter(const ImageU8& img, int window);
ImageU8 awgn(const ImageU8& img, double noise_std, uint64_t seed);
ImageU8 apply_attack(const ImageU8& img, const AttackSpec& spec);
ImageU8 compose_attacks(const ImageU8& img, const std::vector<AttackSpec>& specs);

/// Same pipelines on real-valued grids without the final 8-bit
/// re-quantization; the Monte-Carlo harness runs on this channel.
Grid2D jpeg_roundtrip_grid(const Grid2D& img, int qf);
Grid2D rescale_attack_grid(const Grid2D& img, double sf);
Grid2D median_filter_grid(const Grid2D& img, int window);
Grid2D gaussian_filter_grid(const Grid2D& img, int window);
Grid2D awgn_grid(const Grid2D& img, double noise_std, uint64_t seed);
/// seed_override replaces the seed of every awgn node (the harness derives
/// per-key sub-seeds); pass nullptr to use the specs' own seeds.
Grid2D apply_attack_grid(const Grid2D& img, const AttackSpec& spec,
                         const uint64_t* seed_override = nullptr);

std::string attack_spec_to_json_string(const AttackSpec& spec);
AttackSpec attack_spec_from_json_string(const std::string& text);

}  // namespace ctmark
