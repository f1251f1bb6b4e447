#include "ctmark/lp.hpp"

#include <stdexcept>

namespace ctmark {

namespace {

// Half-sample symmetric reflection: ... x1 x0 | x0 x1 ... xn-1 | xn-1 ...
int reflect(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -1 - i;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

// Correlate rows (axis=0) or columns (axis=1) with taps and keep even
// phases, halving that axis.
Grid2D filter_down(const Grid2D& x, const FilterTaps& f, int axis) {
    const int R = x.rows(), C = x.cols();
    const int K = static_cast<int>(f.taps.size());
    Grid2D y(axis == 0 ? R / 2 : R, axis == 0 ? C : C / 2);
    for (int i = 0; i < y.rows(); ++i)
        for (int j = 0; j < y.cols(); ++j) {
            double acc = 0.0;
            for (int k = 0; k < K; ++k) {
                int off = k - f.anchor;
                int si = axis == 0 ? reflect(2 * i + off, R) : i;
                int sj = axis == 0 ? j : reflect(2 * j + off, C);
                acc += f.taps[k] * x(si, sj);
            }
            y(i, j) = acc;
        }
    return y;
}

// Zero-insertion upsample along axis, then correlate with taps. The
// extension happens in the coarse domain so each output index sees a full
// polyphase of the filter; that keeps constants exact up to the border.
Grid2D up_filter(const Grid2D& x, const FilterTaps& f, int axis) {
    const int R = x.rows(), C = x.cols();
    const int K = static_cast<int>(f.taps.size());
    const int n_coarse = axis == 0 ? R : C;
    Grid2D y(axis == 0 ? 2 * R : R, axis == 0 ? C : 2 * C);
    for (int i = 0; i < y.rows(); ++i)
        for (int j = 0; j < y.cols(); ++j) {
            double acc = 0.0;
            int base = axis == 0 ? i : j;
            for (int k = 0; k < K; ++k) {
                int m = base + k - f.anchor;
                if (m & 1) continue;  // zero-inserted sample
                int jc = reflect(m / 2, n_coarse);
                acc += f.taps[k] * (axis == 0 ? x(jc, j) : x(i, jc));
            }
            y(i, j) = acc;
        }
    return y;
}

Grid2D coarse(const Grid2D& x, const FilterBank& fb) {
    return filter_down(filter_down(x, fb.analysis_lowpass, 0), fb.analysis_lowpass, 1);
}

Grid2D predict(const Grid2D& c, const FilterBank& fb) {
    return up_filter(up_filter(c, fb.synthesis_lowpass, 0), fb.synthesis_lowpass, 1);
}

}  // namespace

LpDecomp lp_analyze(const Grid2D& img, int levels, const FilterBank& fb) {
    if (levels < 1) throw std::invalid_argument("lp_analyze: levels must be >= 1");
    const int div = 1 << levels;
    if (img.rows() % div || img.cols() % div)
        throw std::invalid_argument("lp_analyze: image sides must be divisible by 2^levels");

    LpDecomp d;
    Grid2D cur = img;
    for (int l = 0; l < levels; ++l) {
        Grid2D c = coarse(cur, fb);
        Grid2D p = predict(c, fb);
        Grid2D band(cur.rows(), cur.cols());
        for (size_t k = 0; k < band.size(); ++k)
            band.data()[k] = cur.data()[k] - p.data()[k];
        d.bandpass.push_back(std::move(band));
        cur = std::move(c);
    }
    d.lowpass = std::move(cur);
    return d;
}

Grid2D lp_synthesize(const LpDecomp& d, const FilterBank& fb) {
    if (d.bandpass.empty()) throw std::invalid_argument("lp_synthesize: no bandpass levels");
    Grid2D cur = d.lowpass;
    for (int l = static_cast<int>(d.bandpass.size()) - 1; l >= 0; --l) {
        const Grid2D& band = d.bandpass[l];
        if (band.rows() != 2 * cur.rows() || band.cols() != 2 * cur.cols())
            throw std::invalid_argument("lp_synthesize: inconsistent dimension chain");
        Grid2D p = predict(cur, fb);
        for (size_t k = 0; k < p.size(); ++k) p.data()[k] += band.data()[k];
        cur = std::move(p);
    }
    return cur;
}

}  // namespace ctmark
