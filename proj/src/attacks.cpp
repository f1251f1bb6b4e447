#include "ctmark/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ctmark/rng.hpp"
#include "json.hpp"

namespace ctmark {

namespace {

// ------------------------------------------------------------------ JPEG

// Standard luminance quantization table, zigzag-free row-major layout.
const int kLumaQ[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99,
};

void quality_scaled_table(int qf, double q[64]) {
    if (qf < 1 || qf > 100)
        throw std::invalid_argument("jpeg: quality factor must be in [1,100]");
    int s = qf < 50 ? 5000 / qf : 200 - 2 * qf;
    for (int k = 0; k < 64; ++k) {
        int v = (kLumaQ[k] * s + 50) / 100;
        q[k] = static_cast<double>(std::clamp(v, 1, 255));
    }
}

struct Dct8 {
    // c[u][n] = cu * cos(pi (2n+1) u / 16), orthonormal
    double c[8][8];
    Dct8() {
        for (int u = 0; u < 8; ++u) {
            double cu = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (int n = 0; n < 8; ++n)
                c[u][n] = cu * std::cos(M_PI * (2 * n + 1) * u / 16.0);
        }
    }
};

const Dct8& dct8() {
    static const Dct8 d;
    return d;
}

// Pads to a multiple of `mult` by edge replication.
Grid2D pad_replicate(const Grid2D& x, int mult) {
    int R = (x.rows() + mult - 1) / mult * mult;
    int C = (x.cols() + mult - 1) / mult * mult;
    if (R == x.rows() && C == x.cols()) return x;
    Grid2D y(R, C);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j)
            y(i, j) = x(std::min(i, x.rows() - 1), std::min(j, x.cols() - 1));
    return y;
}

}  // namespace

Grid2D jpeg_roundtrip_grid(const Grid2D& img, int qf) {
    double q[64];
    quality_scaled_table(qf, q);
    const Dct8& d = dct8();

    const int R0 = img.rows(), C0 = img.cols();
    Grid2D x = pad_replicate(img, 8);
    const int R = x.rows(), C = x.cols();

    double blk[8][8], tmp[8][8];
    for (int bi = 0; bi < R; bi += 8)
        for (int bj = 0; bj < C; bj += 8) {
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) blk[i][j] = x(bi + i, bj + j) - 128.0;
            // DCT rows then columns
            for (int i = 0; i < 8; ++i)
                for (int u = 0; u < 8; ++u) {
                    double acc = 0.0;
                    for (int n = 0; n < 8; ++n) acc += d.c[u][n] * blk[i][n];
                    tmp[i][u] = acc;
                }
            for (int j = 0; j < 8; ++j)
                for (int u = 0; u < 8; ++u) {
                    double acc = 0.0;
                    for (int n = 0; n < 8; ++n) acc += d.c[u][n] * tmp[n][j];
                    blk[u][j] = acc;
                }
            // quantize / dequantize
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) {
                    double qq = q[i * 8 + j];
                    blk[i][j] = std::round(blk[i][j] / qq) * qq;
                }
            // inverse DCT columns then rows
            for (int j = 0; j < 8; ++j)
                for (int n = 0; n < 8; ++n) {
                    double acc = 0.0;
                    for (int u = 0; u < 8; ++u) acc += d.c[u][n] * blk[u][j];
                    tmp[n][j] = acc;
                }
            for (int i = 0; i < 8; ++i)
                for (int n = 0; n < 8; ++n) {
                    double acc = 0.0;
                    for (int u = 0; u < 8; ++u) acc += d.c[u][n] * tmp[i][u];
                    x(bi + i, bj + n) = acc + 128.0;
                }
        }

    if (R == R0 && C == C0) return x;
    Grid2D y(R0, C0);
    for (int i = 0; i < R0; ++i)
        for (int j = 0; j < C0; ++j) y(i, j) = x(i, j);
    return y;
}

// ------------------------------------------------------------- rescaling

namespace {

// Bilinear sample with half-pixel-center alignment and edge clamping.
double bilinear(const Grid2D& x, double si, double sj) {
    si = std::clamp(si, 0.0, static_cast<double>(x.rows() - 1));
    sj = std::clamp(sj, 0.0, static_cast<double>(x.cols() - 1));
    int i0 = static_cast<int>(si), j0 = static_cast<int>(sj);
    int i1 = std::min(i0 + 1, x.rows() - 1), j1 = std::min(j0 + 1, x.cols() - 1);
    double fi = si - i0, fj = sj - j0;
    return (1 - fi) * ((1 - fj) * x(i0, j0) + fj * x(i0, j1)) +
           fi * ((1 - fj) * x(i1, j0) + fj * x(i1, j1));
}

Grid2D resample_bilinear(const Grid2D& x, int R, int C) {
    Grid2D y(R, C);
    const double ri = static_cast<double>(x.rows()) / R;
    const double rj = static_cast<double>(x.cols()) / C;
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j)
            y(i, j) = bilinear(x, (i + 0.5) * ri - 0.5, (j + 0.5) * rj - 0.5);
    return y;
}

}  // namespace

Grid2D rescale_attack_grid(const Grid2D& img, double sf) {
    if (!(sf > 0.0 && sf <= 1.0))
        throw std::invalid_argument("rescale: scale factor must be in (0,1]");
    int R = std::max(1, static_cast<int>(std::floor(sf * img.rows())));
    int C = std::max(1, static_cast<int>(std::floor(sf * img.cols())));
    if (R == img.rows() && C == img.cols()) return img;
    Grid2D small = resample_bilinear(img, R, C);
    return resample_bilinear(small, img.rows(), img.cols());
}

// --------------------------------------------------------------- filters

Grid2D median_filter_grid(const Grid2D& img, int window) {
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument("median: window must be odd and >= 3");
    const int R = img.rows(), C = img.cols(), half = window / 2;
    Grid2D y(R, C);
    std::vector<double> buf;
    buf.reserve(static_cast<size_t>(window) * window);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) {
            buf.clear();
            for (int di = -half; di <= half; ++di)
                for (int dj = -half; dj <= half; ++dj)
                    buf.push_back(img(std::clamp(i + di, 0, R - 1), std::clamp(j + dj, 0, C - 1)));
            auto mid = buf.begin() + buf.size() / 2;
            std::nth_element(buf.begin(), mid, buf.end());
            y(i, j) = *mid;
        }
    return y;
}

Grid2D gaussian_filter_grid(const Grid2D& img, int window) {
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument("gaussian: window must be odd and >= 3");
    const int half = window / 2;
    const double sigma = window / 6.0;
    std::vector<double> ker(window);
    double sum = 0.0;
    for (int k = 0; k < window; ++k) {
        double d = k - half;
        ker[k] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += ker[k];
    }
    for (double& v : ker) v /= sum;

    const int R = img.rows(), C = img.cols();
    Grid2D tmp(R, C), y(R, C);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) {
            double acc = 0.0;
            for (int k = 0; k < window; ++k)
                acc += ker[k] * img(i, std::clamp(j + k - half, 0, C - 1));
            tmp(i, j) = acc;
        }
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) {
            double acc = 0.0;
            for (int k = 0; k < window; ++k)
                acc += ker[k] * tmp(std::clamp(i + k - half, 0, R - 1), j);
            y(i, j) = acc;
        }
    return y;
}

Grid2D awgn_grid(const Grid2D& img, double noise_std, uint64_t seed) {
    if (noise_std < 0.0)
        throw std::invalid_argument("awgn: noise std must be >= 0");
    Grid2D y = img;
    if (noise_std == 0.0) return y;
    KeyedRng rng(seed);
    for (size_t k = 0; k < y.size(); ++k) y.data()[k] += noise_std * rng.next_normal();
    return y;
}

// ----------------------------------------------------------- dispatchers

void validate_attack_spec(const AttackSpec& spec) {
    if (spec.kind == "none") return;
    if (spec.kind == "jpeg") {
        if (spec.qf < 1 || spec.qf > 100)
            throw std::invalid_argument("attack spec: jpeg qf must be in [1,100]");
    } else if (spec.kind == "rescale") {
        if (!(spec.sf > 0.0 && spec.sf <= 1.0))
            throw std::invalid_argument("attack spec: rescale sf must be in (0,1]");
    } else if (spec.kind == "median" || spec.kind == "gaussian") {
        if (spec.window < 3 || spec.window % 2 == 0)
            throw std::invalid_argument("attack spec: window must be odd and >= 3");
    } else if (spec.kind == "awgn") {
        if (spec.noise_std < 0.0)
            throw std::invalid_argument("attack spec: noise std must be >= 0");
    } else if (spec.kind == "compose") {
        if (spec.children.empty())
            throw std::invalid_argument("attack spec: compose needs children");
        for (const AttackSpec& c : spec.children) {
            if (c.kind == "compose")
                throw std::invalid_argument("attack spec: nested compose not supported");
            validate_attack_spec(c);
        }
    } else {
        throw std::invalid_argument("attack spec: unknown kind '" + spec.kind + "'");
    }
}

std::string attack_label(const AttackSpec& spec) {
    char buf[64];
    if (spec.kind == "none" || spec.kind.empty()) return "none";
    if (spec.kind == "jpeg") {
        std::snprintf(buf, sizeof buf, "jpeg-%d", spec.qf);
    } else if (spec.kind == "rescale") {
        std::snprintf(buf, sizeof buf, "rescale-%g", spec.sf);
    } else if (spec.kind == "median") {
        std::snprintf(buf, sizeof buf, "median-%d", spec.window);
    } else if (spec.kind == "gaussian") {
        std::snprintf(buf, sizeof buf, "gaussian-%d", spec.window);
    } else if (spec.kind == "awgn") {
        std::snprintf(buf, sizeof buf, "awgn-%g", spec.noise_std);
    } else if (spec.kind == "compose") {
        std::string lbl;
        for (const AttackSpec& c : spec.children) {
            if (!lbl.empty()) lbl += "+";
            lbl += attack_label(c);
        }
        return lbl;
    } else {
        return spec.kind;
    }
    return buf;
}

bool attack_is_deterministic(const AttackSpec& spec) {
    if (spec.kind == "awgn") return false;
    for (const AttackSpec& c : spec.children)
        if (!attack_is_deterministic(c)) return false;
    return true;
}

Grid2D apply_attack_grid(const Grid2D& img, const AttackSpec& spec,
                         const uint64_t* seed_override) {
    validate_attack_spec(spec);
    if (spec.kind == "none") return img;
    if (spec.kind == "jpeg") return jpeg_roundtrip_grid(img, spec.qf);
    if (spec.kind == "rescale") return rescale_attack_grid(img, spec.sf);
    if (spec.kind == "median") return median_filter_grid(img, spec.window);
    if (spec.kind == "gaussian") return gaussian_filter_grid(img, spec.window);
    if (spec.kind == "awgn")
        return awgn_grid(img, spec.noise_std, seed_override ? *seed_override : spec.seed);
    // compose
    Grid2D cur = img;
    for (const AttackSpec& c : spec.children) cur = apply_attack_grid(cur, c, seed_override);
    return cur;
}

namespace {

ImageU8 requantize(const Grid2D& g) { return to_image_u8(g); }

}  // namespace

ImageU8 jpeg_roundtrip(const ImageU8& img, int qf) {
    return requantize(jpeg_roundtrip_grid(to_grid(img), qf));
}

ImageU8 rescale_attack(const ImageU8& img, double sf) {
    return requantize(rescale_attack_grid(to_grid(img), sf));
}

ImageU8 median_filter(const ImageU8& img, int window) {
    return requantize(median_filter_grid(to_grid(img), window));
}

ImageU8 gaussian_filter(const ImageU8& img, int window) {
    return requantize(gaussian_filter_grid(to_grid(img), window));
}

ImageU8 awgn(const ImageU8& img, double noise_std, uint64_t seed) {
    return requantize(awgn_grid(to_grid(img), noise_std, seed));
}

ImageU8 apply_attack(const ImageU8& img, const AttackSpec& spec) {
    validate_attack_spec(spec);
    if (spec.kind == "none") return img;
    if (spec.kind == "compose") return compose_attacks(img, spec.children);
    return requantize(apply_attack_grid(to_grid(img), spec));
}

ImageU8 compose_attacks(const ImageU8& img, const std::vector<AttackSpec>& specs) {
    if (specs.empty())
        throw std::invalid_argument("compose_attacks: empty attack list");
    ImageU8 cur = img;
    for (const AttackSpec& s : specs) cur = apply_attack(cur, s);
    return cur;
}

// ---------------------------------------------------------- serialization

namespace {

nlohmann::ordered_json spec_to_json(const AttackSpec& spec) {
    nlohmann::ordered_json j;
    j["kind"] = spec.kind;
    if (spec.kind == "jpeg") j["qf"] = spec.qf;
    if (spec.kind == "rescale") j["sf"] = spec.sf;
    if (spec.kind == "median" || spec.kind == "gaussian") j["window"] = spec.window;
    if (spec.kind == "awgn") {
        j["noise_std"] = spec.noise_std;
        j["seed"] = spec.seed;
    }
    if (spec.kind == "compose") {
        nlohmann::ordered_json kids = nlohmann::ordered_json::array();
        for (const AttackSpec& c : spec.children) kids.push_back(spec_to_json(c));
        j["children"] = std::move(kids);
    }
    return j;
}

AttackSpec spec_from_json(const nlohmann::json& j) {
    AttackSpec s;
    s.kind = j.at("kind").get<std::string>();
    if (j.contains("qf")) s.qf = j["qf"].get<int>();
    if (j.contains("sf")) s.sf = j["sf"].get<double>();
    if (j.contains("window")) s.window = j["window"].get<int>();
    if (j.contains("noise_std")) s.noise_std = j["noise_std"].get<double>();
    if (j.contains("seed")) s.seed = j["seed"].get<uint64_t>();
    if (j.contains("children"))
        for (const auto& c : j["children"]) s.children.push_back(spec_from_json(c));
    validate_attack_spec(s);
    return s;
}

}  // namespace

std::string attack_spec_to_json_string(const AttackSpec& spec) {
    return spec_to_json(spec).dump();
}

AttackSpec attack_spec_from_json_string(const std::string& text) {
    return spec_from_json(nlohmann::json::parse(text));
}

}  // namespace ctmark
