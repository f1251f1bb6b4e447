#include "ctmark/grid.hpp"

#include <cmath>

namespace ctmark {

void Grid2D::validate_finite(const std::string& what) const {
    for (double v : data_)
        if (!std::isfinite(v))
            throw std::invalid_argument(what + ": non-finite value");
}

Grid2D to_grid(const ImageU8& img) {
    Grid2D g(img.height, img.width);
    for (int i = 0; i < img.height; ++i)
        for (int j = 0; j < img.width; ++j)
            g(i, j) = static_cast<double>(img.at(i, j));
    return g;
}

uint8_t quantize_u8(double v) {
    // round half away from zero, then clamp
    double r = (v >= 0.0) ? std::floor(v + 0.5) : std::ceil(v - 0.5);
    if (r < 0.0) r = 0.0;
    if (r > 255.0) r = 255.0;
    return static_cast<uint8_t>(r);
}

ImageU8 to_image_u8(const Grid2D& g) {
    ImageU8 img(g.cols(), g.rows());
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j)
            img.at(i, j) = quantize_u8(g(i, j));
    return img;
}

static double psnr_from_mse(double mse) {
    if (mse <= 0.0) return kPsnrInfinity;
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double psnr(const ImageU8& a, const ImageU8& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("psnr: shape mismatch");
    double acc = 0.0;
    for (size_t k = 0; k < a.pixels.size(); ++k) {
        double d = static_cast<double>(a.pixels[k]) - static_cast<double>(b.pixels[k]);
        acc += d * d;
    }
    return psnr_from_mse(acc / static_cast<double>(a.pixels.size()));
}

double psnr(const Grid2D& a, const Grid2D& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("psnr: shape mismatch");
    double acc = 0.0;
    for (size_t k = 0; k < a.size(); ++k) {
        double d = a.data()[k] - b.data()[k];
        acc += d * d;
    }
    return psnr_from_mse(acc / static_cast<double>(a.size()));
}

double subband_energy(const Grid2D& g) {
    double acc = 0.0;
    for (size_t k = 0; k < g.size(); ++k) acc += g.data()[k] * g.data()[k];
    return acc;
}

ScalarStats sample_stats(const std::vector<double>& xs) {
    if (xs.size() < 2)
        throw std::invalid_argument("sample_stats: need at least 2 samples");
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        double d = x - mean;
        double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    if (m2 <= 0.0)
        throw std::invalid_argument("sample_stats: zero variance, kurtosis undefined");
    ScalarStats s;
    s.mean = mean;
    s.variance = m2;
    s.kurtosis = m4 / (m2 * m2);
    s.n = xs.size();
    return s;
}

}  // namespace ctmark
