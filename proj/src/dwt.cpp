#include "ctmark/dwt.hpp"

#include <stdexcept>

namespace ctmark {

namespace {

// Quadrature mirror of the lowpass: m[k] = (-1)^k h[L-1-k].
std::vector<double> mirror_highpass(const std::vector<double>& h) {
    const int L = static_cast<int>(h.size());
    std::vector<double> g(L);
    for (int k = 0; k < L; ++k) g[k] = (k % 2 ? -1.0 : 1.0) * h[L - 1 - k];
    return g;
}

// One periodic analysis step on a length-n signal (n even):
// lo[i] = sum_k h[k] x[(2i+k) mod n], hi likewise with g.
void analyze1(const double* x, int n, int stride, const std::vector<double>& h,
              const std::vector<double>& g, double* lo, double* hi, int out_stride) {
    const int L = static_cast<int>(h.size());
    for (int i = 0; i < n / 2; ++i) {
        double a = 0.0, d = 0.0;
        for (int k = 0; k < L; ++k) {
            double v = x[((2 * i + k) % n) * stride];
            a += h[k] * v;
            d += g[k] * v;
        }
        lo[i * out_stride] = a;
        hi[i * out_stride] = d;
    }
}

// Adjoint: x[(2i+k) mod n] += lo[i] h[k] + hi[i] g[k].
void synthesize1(const double* lo, const double* hi, int n, int in_stride,
                 const std::vector<double>& h, const std::vector<double>& g, double* x,
                 int stride) {
    const int L = static_cast<int>(h.size());
    for (int m = 0; m < n; ++m) x[m * stride] = 0.0;
    for (int i = 0; i < n / 2; ++i) {
        double a = lo[i * in_stride], d = hi[i * in_stride];
        for (int k = 0; k < L; ++k) x[((2 * i + k) % n) * stride] += a * h[k] + d * g[k];
    }
}

struct QuadSplit {
    Grid2D ll, hl, lh, hh;  // (col-pass, row-pass): hl = col-low, row-high
};

QuadSplit analyze_once(const Grid2D& x, const std::vector<double>& h,
                       const std::vector<double>& g) {
    const int R = x.rows(), C = x.cols();
    Grid2D rl(R, C / 2), rh(R, C / 2);
    for (int i = 0; i < R; ++i)
        analyze1(x.data() + static_cast<size_t>(i) * C, C, 1, h, g,
                 rl.data() + static_cast<size_t>(i) * (C / 2),
                 rh.data() + static_cast<size_t>(i) * (C / 2), 1);
    QuadSplit q{Grid2D(R / 2, C / 2), Grid2D(R / 2, C / 2), Grid2D(R / 2, C / 2),
                Grid2D(R / 2, C / 2)};
    for (int j = 0; j < C / 2; ++j) {
        analyze1(rl.data() + j, R, C / 2, h, g, q.ll.data() + j, q.lh.data() + j, C / 2);
        analyze1(rh.data() + j, R, C / 2, h, g, q.hl.data() + j, q.hh.data() + j, C / 2);
    }
    return q;
}

Grid2D synthesize_once(const QuadSplit& q, const std::vector<double>& h,
                       const std::vector<double>& g) {
    const int R = q.ll.rows() * 2, C = q.ll.cols() * 2;
    Grid2D rl(R, C / 2), rh(R, C / 2);
    for (int j = 0; j < C / 2; ++j) {
        synthesize1(q.ll.data() + j, q.lh.data() + j, R, C / 2, h, g, rl.data() + j, C / 2);
        synthesize1(q.hl.data() + j, q.hh.data() + j, R, C / 2, h, g, rh.data() + j, C / 2);
    }
    Grid2D x(R, C);
    for (int i = 0; i < R; ++i)
        synthesize1(rl.data() + static_cast<size_t>(i) * (C / 2),
                    rh.data() + static_cast<size_t>(i) * (C / 2), C, 1, h, g,
                    x.data() + static_cast<size_t>(i) * C, 1);
    return x;
}

const FilterTaps& cached_lowpass() {
    static const FilterTaps lp = load_wavelet_lowpass();
    return lp;
}

}  // namespace

WaveletDecomp dwt2_analyze(const Grid2D& img, int levels, const FilterTaps& lowpass) {
    if (levels < 1) throw std::invalid_argument("dwt2_analyze: levels must be >= 1");
    const int div = 1 << levels;
    if (img.rows() % div || img.cols() % div)
        throw std::invalid_argument("dwt2_analyze: image sides must be divisible by 2^levels");

    const std::vector<double>& h = lowpass.taps;
    const std::vector<double> g = mirror_highpass(h);

    WaveletDecomp d;
    Grid2D cur = img;
    for (int l = 0; l < levels; ++l) {
        QuadSplit q = analyze_once(cur, h, g);
        d.details.push_back({std::move(q.hl), std::move(q.lh), std::move(q.hh)});
        cur = std::move(q.ll);
    }
    d.approximation = std::move(cur);
    return d;
}

Grid2D dwt2_synthesize(const WaveletDecomp& d, const FilterTaps& lowpass) {
    if (d.details.empty()) throw std::invalid_argument("dwt2_synthesize: no detail levels");
    const std::vector<double>& h = lowpass.taps;
    const std::vector<double> g = mirror_highpass(h);

    Grid2D cur = d.approximation;
    for (int l = static_cast<int>(d.details.size()) - 1; l >= 0; --l) {
        const auto& dl = d.details[l];
        if (!dl.horizontal.same_shape(cur) || !dl.vertical.same_shape(cur) ||
            !dl.diagonal.same_shape(cur))
            throw std::invalid_argument("dwt2_synthesize: inconsistent dimension chain");
        QuadSplit q{std::move(cur), dl.horizontal, dl.vertical, dl.diagonal};
        cur = synthesize_once(q, h, g);
    }
    return cur;
}

WaveletDecomp dwt2_analyze(const Grid2D& img, int levels) {
    return dwt2_analyze(img, levels, cached_lowpass());
}

Grid2D dwt2_synthesize(const WaveletDecomp& d) {
    return dwt2_synthesize(d, cached_lowpass());
}

}  // namespace ctmark
