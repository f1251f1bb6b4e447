#include "synth_images.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>

#include "ctmark/pgm.hpp"
#include "ctmark/rng.hpp"

namespace ctmark::testsupport {

namespace {

constexpr double kPi = 3.14159265358979323846;

// The corpus mimics the statistics the detector exploits in photographs:
// large smooth regions (near-zero fine-scale coefficients), sharp edges and
// intermittent texture patches (strong clustered coefficients), and a very
// low noise floor. Contrast between active and quiet areas is what gives
// the variance model its leverage, so these images keep flat areas clean.

double smoothstep01(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

/// Bilinearly interpolated random lattice, octaves summed; values roughly
/// in [-1, 1]. Deterministic in (seed, dims, cell).
Grid2D value_noise(uint64_t seed, int rows, int cols, int cell, int octaves = 1,
                   double persistence = 0.5) {
    Grid2D out(rows, cols, 0.0);
    double amp = 1.0, total = 0.0;
    for (int o = 0; o < octaves; ++o) {
        const int c = std::max(2, cell >> o);
        const int nr = rows / c + 2, nc = cols / c + 2;
        KeyedRng rng(seed + 0x9E3779B9ULL * static_cast<uint64_t>(o + 1));
        std::vector<double> lattice(static_cast<size_t>(nr) * nc);
        for (auto& v : lattice) v = 2.0 * rng.next_unit() - 1.0;
        for (int i = 0; i < rows; ++i) {
            const double fy = static_cast<double>(i) / c;
            const int iy = static_cast<int>(fy);
            const double ty = smoothstep01(fy - iy);
            for (int j = 0; j < cols; ++j) {
                const double fx = static_cast<double>(j) / c;
                const int ix = static_cast<int>(fx);
                const double tx = smoothstep01(fx - ix);
                const double a = lattice[static_cast<size_t>(iy) * nc + ix];
                const double b = lattice[static_cast<size_t>(iy) * nc + ix + 1];
                const double cc = lattice[static_cast<size_t>(iy + 1) * nc + ix];
                const double d = lattice[static_cast<size_t>(iy + 1) * nc + ix + 1];
                const double top = a + (b - a) * tx;
                const double bot = cc + (d - cc) * tx;
                out(i, j) += amp * (top + (bot - top) * ty);
            }
        }
        total += amp;
        amp *= persistence;
    }
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out(i, j) /= total;
    return out;
}

void add_noise(Grid2D& f, uint64_t seed, double sigma) {
    KeyedRng rng(seed);
    for (int i = 0; i < f.rows(); ++i)
        for (int j = 0; j < f.cols(); ++j) f(i, j) += sigma * rng.next_normal();
}

ImageU8 to_u8(const Grid2D& f) {
    ImageU8 img(f.cols(), f.rows());
    for (int i = 0; i < f.rows(); ++i)
        for (int j = 0; j < f.cols(); ++j) img.at(i, j) = quantize_u8(f(i, j));
    return img;
}

/// Soft-edged ellipse coverage in [0,1]; aa is the edge width in pixels.
double ellipse_cov(double di, double dj, double ry, double rx, double aa = 1.2) {
    const double d = std::sqrt((di / ry) * (di / ry) + (dj / rx) * (dj / rx));
    const double scale = std::min(rx, ry);
    return std::clamp((1.0 - d) * scale / aa + 0.5, 0.0, 1.0);
}

/// Scatters small soft-edged bumps and pits over a jittered lattice. Every
/// lattice cell draws the same number of variates so the layout is stable
/// under changes to the keep predicate.
template <typename Keep>
void speckle_layer(Grid2D& f, uint64_t seed, int spacing, double rmin, double rmax,
                   double dmin, double dmax, double dark_frac, Keep keep) {
    KeyedRng rng(seed);
    const int n = f.rows(), m = f.cols();
    for (int cy = 0; cy < n; cy += spacing)
        for (int cx = 0; cx < m; cx += spacing) {
            const double py = cy + spacing * rng.next_unit();
            const double px = cx + spacing * rng.next_unit();
            const double r = rmin + (rmax - rmin) * rng.next_unit();
            const double mag = dmin + (dmax - dmin) * rng.next_unit();
            const double delta = rng.next_unit() < dark_frac ? -mag : mag;
            const int iy = static_cast<int>(py), ix = static_cast<int>(px);
            if (iy < 0 || ix < 0 || iy >= n || ix >= m || !keep(iy, ix)) continue;
            const int i0 = std::max(0, static_cast<int>(py - r - 2));
            const int i1 = std::min(n - 1, static_cast<int>(py + r + 2));
            const int j0 = std::max(0, static_cast<int>(px - r - 2));
            const int j1 = std::min(m - 1, static_cast<int>(px + r + 2));
            for (int i = i0; i <= i1; ++i)
                for (int j = j0; j <= j1; ++j) {
                    const double d =
                        std::sqrt((i - py) * (i - py) + (j - px) * (j - px));
                    const double cov = std::clamp(r - d + 0.7, 0.0, 1.0);
                    f(i, j) += delta * cov;
                }
        }
}

/// Anti-aliased line segment drawn into f with the given value; w is the
/// half-width in pixels.
void draw_segment(Grid2D& f, double i0, double j0, double i1, double j1, double w,
                  double value) {
    const int n = f.rows();
    const int lo_i = std::max(0, static_cast<int>(std::floor(std::min(i0, i1) - w - 1)));
    const int hi_i = std::min(n - 1, static_cast<int>(std::ceil(std::max(i0, i1) + w + 1)));
    const int lo_j = std::max(0, static_cast<int>(std::floor(std::min(j0, j1) - w - 1)));
    const int hi_j = std::min(f.cols() - 1, static_cast<int>(std::ceil(std::max(j0, j1) + w + 1)));
    const double di = i1 - i0, dj = j1 - j0;
    const double len2 = di * di + dj * dj;
    for (int i = lo_i; i <= hi_i; ++i)
        for (int j = lo_j; j <= hi_j; ++j) {
            double t = len2 > 0 ? ((i - i0) * di + (j - j0) * dj) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double pi = i0 + t * di, pj = j0 + t * dj;
            const double d = std::sqrt((i - pi) * (i - pi) + (j - pj) * (j - pj));
            const double cov = std::clamp(w - d + 0.7, 0.0, 1.0);
            f(i, j) = f(i, j) * (1.0 - cov) + value * cov;
        }
}

ImageU8 make_harbor(int n) {
    Grid2D f(n, n, 0.0);
    const Grid2D clouds = value_noise(101, n, n, n / 6, 2, 0.5);
    const Grid2D waveamp = value_noise(102, n, n, n / 10, 2, 0.5);
    const Grid2D glint = value_noise(103, n, n, 8, 1, 0.5);
    const double horizon = 0.58 * n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double v;
            if (i < horizon) {
                const double t = i / horizon;
                v = 208.0 - 66.0 * t + 10.0 * clouds(i, j) * (0.3 + 0.7 * t);
            } else {
                const double t = (i - horizon) / (n - horizon);
                v = 92.0 - 30.0 * t;
                // broad swell for the look of the surface
                const double swell = 3.0 * (0.3 + 0.7 * t) *
                                     std::sin(2.0 * kPi * (i - horizon) / (9.0 + 5.0 * t) +
                                              2.0 * std::sin(j * 0.013));
                // fine wind chop in gusty patches: a short-wavelength carrier whose
                // amplitude is gated by a smooth mask, so the surface alternates
                // between glassy calm and busy ripple fields
                const double pk = std::max(0.0, waveamp(i, j));
                const double mask = smoothstep01((pk - 0.05) / 0.50);
                const double lam = 3.0 + 0.4 * t;
                const double chop = 26.0 * mask * (0.4 + 0.6 * t) *
                                    std::sin(2.0 * kPi * (i - horizon) / lam +
                                             2.0 * std::sin(j * 0.013));
                v += swell + chop;
                const double dx = (j - 0.72 * n) / (0.045 * n);  // sun glint lane
                const double gl = std::max(0.0, glint(i, j));
                v += std::exp(-dx * dx) * 72.0 * gl * gl;
            }
            f(i, j) = v;
        }
    }
    // boat hulls, masts and rigging
    const double hull_ci[3] = {horizon + 0.06 * n, horizon + 0.16 * n, horizon + 0.29 * n};
    const double hull_cj[3] = {0.25 * n, 0.52 * n, 0.70 * n};
    const double hull_rx[3] = {0.080 * n, 0.110 * n, 0.060 * n};
    const double hull_ry[3] = {0.022 * n, 0.030 * n, 0.017 * n};
    for (int b = 0; b < 3; ++b) {
        const int i0 = std::max(0, static_cast<int>(hull_ci[b] - hull_ry[b] - 3));
        const int i1 = std::min(n - 1, static_cast<int>(hull_ci[b] + hull_ry[b] + 3));
        const int j0 = std::max(0, static_cast<int>(hull_cj[b] - hull_rx[b] - 3));
        const int j1 = std::min(n - 1, static_cast<int>(hull_cj[b] + hull_rx[b] + 3));
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j) {
                const double cov =
                    ellipse_cov(i - hull_ci[b], j - hull_cj[b], hull_ry[b], hull_rx[b]);
                f(i, j) = f(i, j) * (1.0 - cov) + 24.0 * cov;
            }
        const double deck = hull_ci[b] - hull_ry[b];
        const double mast_top = deck - 0.14 * n;
        draw_segment(f, mast_top, hull_cj[b], deck, hull_cj[b], 1.0, 28.0);
        // rigging from mast top to bow and stern
        draw_segment(f, mast_top, hull_cj[b], deck, hull_cj[b] - hull_rx[b] * 0.9, 0.5, 40.0);
        draw_segment(f, mast_top, hull_cj[b], deck, hull_cj[b] + hull_rx[b] * 0.9, 0.5, 40.0);
    }
    // white cabin on the middle boat
    {
        const int ci = static_cast<int>(hull_ci[1] - hull_ry[1]);
        const int cj = static_cast<int>(hull_cj[1]);
        for (int i = ci - static_cast<int>(0.020 * n); i < ci; ++i)
            for (int j = cj - static_cast<int>(0.03 * n); j <= cj + static_cast<int>(0.03 * n);
                 ++j)
                if (i >= 0 && j >= 0 && i < n && j < n) f(i, j) = 206.0;
    }
    add_noise(f, 104, 0.30);
    return to_u8(f);
}

ImageU8 make_canyon(int n) {
    Grid2D f(n, n, 0.0);
    const Grid2D wander = value_noise(201, n, n, n / 7, 2, 0.5);
    const Grid2D height = value_noise(202, n, n, n / 3, 3, 0.6);
    const Grid2D illum = value_noise(203, n, n, n / 3, 1, 0.5);
    const Grid2D clouds = value_noise(205, n, n, n / 5, 2, 0.5);
    // ragged rim profile separating sky from canyon wall
    const Grid2D rimn = value_noise(206, n, n, n / 7, 2, 0.5);
    std::vector<double> rim(n);
    for (int j = 0; j < n; ++j)
        rim[j] = 0.24 * n + 0.05 * n * std::sin(2.0 * kPi * j / n * 1.7 + 1.0) +
                 0.06 * n * rimn(0, j);
    auto cliffiness = [&](int i, int j) {
        const double terr = height(i, j);
        const double frac = terr * 4.0 - std::floor(terr * 4.0);
        return std::exp(-std::pow(frac * 6.0, 2.0)) +
               std::exp(-std::pow((1.0 - frac) * 6.0, 2.0));
    };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i < rim[j] - 1.0) {
                f(i, j) = 206.0 - 40.0 * (i / (0.35 * n)) + 7.0 * clouds(i, j);
                continue;
            }
            const double edge = smoothstep01((i - rim[j] + 1.0) / 1.5);  // sharp rim edge
            const double terr = height(i, j);
            const double steps = std::floor(terr * 4.0) / 4.0;
            const double cliff = cliffiness(i, j);
            // thin sedimentary laminae: a short-wavelength carrier with a
            // slowly wandering phase, loud on the exposed scarps and present
            // as a faint grain across the whole rock face. kept off the exact
            // anti-diagonal so one directional band collects the bulk of it
            const double cmask = std::min(1.0, cliff);
            const double lam = (6.5 + 65.5 * cmask) *
                               std::sin(2.0 * kPi * (i + 0.35 * j) / 3.1 +
                                        1.7 * kPi * wander(i, j));
            // a second, slightly longer-wavelength lamina train rides on the
            // scarps; it outlives mild blurring better than the fine train
            const double lam2 = (5.0 + 27.5 * cmask) *
                                std::sin(2.0 * kPi * (i + 0.30 * j) / 3.7 +
                                         1.3 * kPi * wander(j, i));
            double v = 118.0 + lam + lam2 + 34.0 * steps - 28.0 * cliff;
            v *= 0.85 + 0.30 * (0.5 + 0.5 * illum(i, j));
            const double sky = 206.0 - 40.0 * (i / (0.35 * n)) + 7.0 * clouds(i, j);
            f(i, j) = sky * (1.0 - edge) + v * edge;
        }
    }
    // talus: stones and pits scattered over the plateaus (cliffs stay laminar)
    speckle_layer(f, 208, 7, 1.0, 2.3, 52.0, 92.0, 0.6, [&](int i, int j) {
        return i > rim[j] + 2.0 && cliffiness(i, j) < 0.35;
    });
    add_noise(f, 204, 0.35);
    return to_u8(f);
}

ImageU8 make_meadow(int n) {
    Grid2D f(n, n, 0.0);
    const Grid2D rolling = value_noise(301, n, n, n / 3, 2, 0.6);
    const Grid2D stripewarp = value_noise(302, n, n, n / 2, 1, 0.5);
    const Grid2D bladephase = value_noise(303, n, n, n / 12, 2, 0.5);
    const Grid2D lodge = value_noise(311, n, n, n / 10, 2, 0.5);
    const Grid2D bend = value_noise(312, n, n, n / 14, 2, 0.5);
    // A hay meadow mid-mowing, seen from above: broad diagonal swaths of
    // standing grass (tall, densely textured) alternate with mown strips
    // (short stubble under fine-grained chaff).  Transitions take a dozen
    // pixels, so the quilt has no hard seams, and texture covers the whole
    // frame - there are no smooth patches anywhere.
    auto windrow = [&](int i, int j) {
        const double su =
            (0.42 * i + 0.91 * j) / (0.08 * n) + 1.1 * stripewarp(i, j);
        return 0.5 + 0.5 * std::tanh(3.0 * std::sin(kPi * su));
    };
    KeyedRng chaff(309);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double m = windrow(i, j);
            const double sway = 0.85 + 0.15 * rolling(i, j);
            const double blades = (3.0 + 67.0 * m) * sway *
                std::sin(2.0 * kPi * j / 3.2 + 2.2 * kPi * bladephase(i, j));
            // standing grass is a tangle, not a single comb: two more blade
            // rows at nearby pitches and slight tilts thicken the tall swaths
            const double tangle =
                45.0 * m * sway *
                (std::sin(2.0 * kPi * (j + 0.12 * i) / 2.75 + 1.9 * kPi * lodge(i, j)) +
                 std::sin(2.0 * kPi * (j - 0.10 * i) / 3.7 + 1.5 * kPi * bend(i, j)));
            // cut grass litters the mown strips with fine-grained chaff; the
            // standing swaths carry a little of it between the blade rows
            const double lit = (13.0 - 5.0 * m) * chaff.next_normal();
            f(i, j) = 124.0 + 16.0 * rolling(i, j) - 9.0 * m + blades + tangle + lit;
        }
    }
    // clusters of small bright flowers, only where the grass still stands
    KeyedRng fl(304);
    for (int c = 0; c < 3; ++c) {
        const double cy = (0.30 + 0.22 * c) * n, cx = (0.24 + 0.27 * c) * n;
        for (int k = 0; k < 36; ++k) {
            const double py = cy + 0.06 * n * fl.next_normal();
            const double px = cx + 0.07 * n * fl.next_normal();
            const double r = 1.5 + 0.8 * fl.next_unit();
            if (py < 3 || py > n - 3 || px < 3 || px > n - 3) continue;
            if (windrow(static_cast<int>(py), static_cast<int>(px)) < 0.6) continue;
            const int i0 = static_cast<int>(py - r - 2), i1 = static_cast<int>(py + r + 2);
            const int j0 = static_cast<int>(px - r - 2), j1 = static_cast<int>(px + r + 2);
            for (int i = std::max(0, i0); i <= std::min(n - 1, i1); ++i)
                for (int j = std::max(0, j0); j <= std::min(n - 1, j1); ++j) {
                    const double d = std::sqrt((i - py) * (i - py) + (j - px) * (j - px));
                    const double cov = std::clamp(r - d + 0.5, 0.0, 1.0);
                    f(i, j) = f(i, j) * (1.0 - cov) + 234.0 * cov;
                }
        }
    }
    add_noise(f, 306, 0.25);
    return to_u8(f);
}

ImageU8 make_citywall(int n) {
    Grid2D f(n, n, 0.0);
    const int bh = std::max(8, n / 10), bw = 2 * bh, mortar = std::max(2, n / 170);
    const Grid2D stains = value_noise(401, n, n, n / 6, 2, 0.5);
    // per-brick chisel combing comes in three grades, so the wall mixes
    // strongly tooled faces, faintly textured ones, and smooth quiet ones in
    // brick-sized runs
    auto brick_tool = [&](int i, int j, double& tool, double& phase,
                          double& base) {
        const int bi = i / bh;
        const int xo = j + (bi % 2) * (bw / 2);
        const int bj = xo / bw;
        KeyedRng brick(403 + 131071ULL * static_cast<uint64_t>(bi) +
                       static_cast<uint64_t>(bj));
        base = 152.0 + 9.0 * (2.0 * brick.next_unit() - 1.0);
        const double tool_pick = brick.next_unit();
        const double tool_mag = brick.next_unit();
        tool = tool_pick < 0.30 ? 0.9 + 0.6 * tool_mag
                                : (tool_pick < 0.62 ? 0.30 : 0.04);
        phase = 2.0 * kPi * brick.next_unit();
    };
    for (int i = 0; i < n; ++i) {
        const int bi = i / bh;
        for (int j = 0; j < n; ++j) {
            const int xo = j + (bi % 2) * (bw / 2);
            double tool, phase, base;
            brick_tool(i, j, tool, phase, base);
            const int di = i % bh, dj = xo % bw;
            const double tm = std::min({di, dj, bh - 1 - di, bw - 1 - dj}) /
                              static_cast<double>(mortar);
            const double mix = smoothstep01(tm);  // 0 at mortar line, 1 inside brick
            const double comb = 13.0 * tool * mix * mix *
                                std::sin(2.0 * kPi * (i + 0.25 * xo) / 3.05 + phase);
            double v = 82.0 * (1.0 - mix) + (base + comb) * mix;
            const double ry = static_cast<double>(i) / n - 0.1;
            const double rx = (j - 0.5 * n) / n;
            v *= 0.72 + 0.48 * std::exp(-(ry * ry + rx * rx) * 1.8);
            v -= 10.0 * std::max(0.0, stains(i, j));
            f(i, j) = v;
        }
    }
    // weathering: pock marks and spalls, but only on the tooled bricks — the
    // smooth bricks keep their quiet faces
    speckle_layer(f, 405, 11, 0.9, 1.8, 25.0, 45.0, 0.65, [&](int i, int j) {
        double tool, phase, base;
        brick_tool(i, j, tool, phase, base);
        return tool > 0.1;
    });
    // doorway with a round arch, plus two dark windows
    const double dj0 = 0.42 * n, dj1 = 0.58 * n, di0 = 0.62 * n;
    const double arc_r = 0.08 * n, arc_ci = di0, arc_cj = 0.5 * n;
    for (int i = static_cast<int>(di0 - arc_r - 2); i < n; ++i)
        for (int j = static_cast<int>(dj0 - 2); j <= static_cast<int>(dj1 + 2); ++j) {
            if (i < 0 || j < 0 || j >= n) continue;
            double cov = 0.0;
            if (i >= di0) {
                cov = std::clamp(std::min(j - dj0, dj1 - j) + 0.5, 0.0, 1.0);
            } else {
                const double d =
                    std::sqrt((i - arc_ci) * (i - arc_ci) + (j - arc_cj) * (j - arc_cj));
                cov = std::clamp(arc_r - d + 0.5, 0.0, 1.0);
            }
            f(i, j) = f(i, j) * (1.0 - cov) + 38.0 * cov;
        }
    for (int w = 0; w < 2; ++w) {
        const int wi0 = static_cast<int>(0.22 * n), wi1 = static_cast<int>(0.34 * n);
        const int wj0 = static_cast<int>((0.18 + 0.52 * w) * n);
        const int wj1 = wj0 + static_cast<int>(0.10 * n);
        for (int i = wi0; i <= wi1 && i < n; ++i)
            for (int j = wj0; j <= wj1 && j < n; ++j) {
                const double cov = std::clamp(
                    std::min(std::min(i - wi0, wi1 - i), std::min(j - wj0, wj1 - j)) + 0.5, 0.0,
                    1.0);
                f(i, j) = f(i, j) * (1.0 - cov) + 44.0 * cov;
            }
    }
    // meandering dark crack running diagonally across the masonry
    {
        KeyedRng ck(404);
        double ci = 0.06 * n, cj = 0.12 * n;
        while (ci < 0.55 * n && cj < n - 4) {
            const double ni = ci + 0.035 * n * (0.6 + 0.8 * ck.next_unit());
            const double nj = cj + 0.045 * n * (0.6 + 0.8 * ck.next_unit());
            draw_segment(f, ci, cj, ni, nj, 1.2, 40.0);
            ci = ni;
            cj = nj;
        }
    }
    add_noise(f, 402, 0.40);
    return to_u8(f);
}

}  // namespace

std::vector<std::string> synth_corpus_names() {
    return {"harbor", "canyon", "meadow", "citywall"};
}

ImageU8 synth_image(const std::string& name, int side) {
    if (side < 32) throw std::invalid_argument("synth_image: side too small");
    if (name == "harbor") return make_harbor(side);
    if (name == "canyon") return make_canyon(side);
    if (name == "meadow") return make_meadow(side);
    if (name == "citywall") return make_citywall(side);
    throw std::invalid_argument("synth_image: unknown image '" + name + "'");
}

std::vector<std::string> write_synth_corpus(const std::string& dir, int side) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> paths;
    for (const auto& name : synth_corpus_names()) {
        const std::string path = (std::filesystem::path(dir) / (name + ".pgm")).string();
        if (!std::filesystem::exists(path)) save_pgm(path, synth_image(name, side));
        paths.push_back(path);
    }
    return paths;
}

ImageU8 random_image_u8(uint64_t seed, int width, int height) {
    ImageU8 img(width, height);
    KeyedRng rng(seed);
    for (auto& p : img.pixels) p = static_cast<uint8_t>(rng.next_u64() % 256);
    return img;
}

Grid2D random_grid(uint64_t seed, int rows, int cols, double lo, double hi) {
    Grid2D g(rows, cols, 0.0);
    KeyedRng rng(seed);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = lo + (hi - lo) * rng.next_unit();
    return g;
}

Grid2D iid_gaussian_field(uint64_t seed, int rows, int cols, double sigma) {
    Grid2D g(rows, cols, 0.0);
    KeyedRng rng(seed);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = sigma * rng.next_normal();
    return g;
}

}  // namespace ctmark::testsupport
