#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctmark {

/// Dense row-major matrix of doubles. The workhorse value type of the
/// whole library: images, subbands and variance fields are all Grid2D.
class Grid2D {
public:
    Grid2D() = default;
    Grid2D(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(checked_size(rows, cols), fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }

    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const Grid2D& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    /// Throws if any entry is non-finite. Called at ingest boundaries.
    void validate_finite(const std::string& what) const;

private:
    static size_t checked_size(int rows, int cols) {
        if (rows < 1 || cols < 1)
            throw std::invalid_argument("Grid2D: dimensions must be positive");
        return static_cast<size_t>(rows) * cols;
    }

    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

/// 8-bit grayscale image, row-major.
struct ImageU8 {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;

    ImageU8() = default;
    ImageU8(int w, int h, uint8_t fill = 0)
        : width(w), height(h), pixels(checked_size(w, h), fill) {}
    uint8_t& at(int i, int j) { return pixels[static_cast<size_t>(i) * width + j]; }
    uint8_t at(int i, int j) const { return pixels[static_cast<size_t>(i) * width + j]; }

private:
    static size_t checked_size(int w, int h) {
        if (w < 1 || h < 1)
            throw std::invalid_argument("ImageU8: dimensions must be positive");
        return static_cast<size_t>(w) * h;
    }
};

/// Population moments of a sample.
struct ScalarStats {
    double mean = 0.0;
    double variance = 0.0;  // population (divides by n)
    double kurtosis = 0.0;  // m4 / m2^2
    size_t n = 0;
};

Grid2D to_grid(const ImageU8& img);

/// Rounds half away from zero, clamps to [0,255].
ImageU8 to_image_u8(const Grid2D& g);

uint8_t quantize_u8(double v);

/// 10*log10(255^2/MSE); 999.0 dB sentinel when the images are identical.
constexpr double kPsnrInfinity = 999.0;
double psnr(const ImageU8& a, const ImageU8& b);
double psnr(const Grid2D& a, const Grid2D& b);

/// Sum of squares of all entries.
double subband_energy(const Grid2D& g);

/// Population mean/variance/kurtosis. Throws on n < 2 or zero variance
/// (kurtosis undefined).
ScalarStats sample_stats(const std::vector<double>& xs);

}  // namespace ctmark
