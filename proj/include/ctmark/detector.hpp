#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ctmark/garch.hpp"
#include "ctmark/grid.hpp"

namespace ctmark {

struct DetectionReport {
    double statistic = 0.0;
    double threshold = 0.0;
    bool decision = false;
    double pf_target = 0.0;
    double mu0 = 0.0, mu1 = 0.0;
    double sigma0_sq = 0.0, sigma1_sq = 0.0;
    Garch2DParams params;
    bool fit_converged = true;  // false = warning, detection still ran
    int scale_index = 0, subband_index = 0;
    double gamma = 0.0;
};

struct TheoreticalMoments {
    double mu0 = 0.0, sigma0_sq = 0.0, mu1 = 0.0, sigma1_sq = 0.0;
};

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (pf, pd), pf increasing
    double auroc = 0.5;
};

struct KsResult {
    bool H = false;
    double KSD = 0.0;
    double threshold = 0.0;
    size_t n = 0;
};

struct GgParams {
    double shape = 2.0;
    double scale = 1.0;
};

/// Upper tail of the standard normal, Q(x) = erfc(x/sqrt 2)/2.
double gaussian_tail(double x);
/// Inverse: gaussian_tail(gaussian_tail_inv(p)) = p, p in (0,1).
double gaussian_tail_inv(double p);

/// log Lambda = sum [ log(h0/h1)/2 + g^2/(2 h0) - (g-w)^2/(2 h1) ]
/// with h0 the conditional-variance field of g and h1 that of g-w, each by
/// its own full recursion (alpha0 kept inside the log terms).
double llrt_statistic(const Grid2D& g, const Grid2D& w, const Garch2DParams& params);

/// Analytic moments of log Lambda for an i.i.d. +/-gamma watermark on
/// host f: per-site average over the two sign patterns,
///   mu0       = sum_ij (l_ij(+g) + l_ij(-g)) / 2
///   sigma0^2  = sum_ij (l_ij(+g) - l_ij(-g))^2 / 4
/// where l_ij(s) evaluates the statistic's site term against the variance
/// field of f-s. mu1 = -mu0 and sigma1^2 = sigma0^2 hold exactly.
TheoreticalMoments theoretical_moments(const Grid2D& f, double gamma,
                                       const Garch2DParams& params);

/// Neyman-Pearson threshold T = sqrt(sigma0_sq) Qinv(pf) + mu0.
double np_threshold(double mu0, double sigma0_sq, double pf_target);

/// Blind detection: re-select the max-energy finest subband of the
/// received image, fit the variance model on it, regenerate the watermark
/// from the key with gamma from the received power, then LLRT vs the NP
/// threshold.
DetectionReport detect_grid(const Grid2D& img, uint64_t key, double wdr_db, double pf_target,
                            const std::vector<int>& dir_levels);
DetectionReport detect(const ImageU8& img, uint64_t key, double wdr_db, double pf_target,
                       const std::vector<int>& dir_levels);

/// P_D(pf) = Q((sigma0 Qinv(pf) + mu0 - mu1)/sigma1) over the grid;
/// area by trapezoid with endpoints (0,0) and (1,1).
RocCurve theoretical_roc(double mu0, double sigma0_sq, double mu1, double sigma1_sq,
                         const std::vector<double>& pf_grid);

/// 50 log-spaced false-alarm targets in [1e-4, 0.5].
std::vector<double> default_pf_grid();

/// Threshold-sweep step curve; auroc is the Mann-Whitney statistic with
/// ties counted 1/2 (equals the step-curve area).
RocCurve empirical_roc(const std::vector<double>& scores_h0,
                       const std::vector<double>& scores_h1);

/// Kolmogorov-Smirnov distance to the moment-fitted normal;
/// H = KSD > sqrt(-ln(significance/2)/2)/sqrt(n)  (1.3581/sqrt n at 0.05).
KsResult ks_test_gaussian(const std::vector<double>& samples, double significance = 0.05);

/// Moment-matched generalized-Gaussian fit: shape from the
/// (mean |x|)^2 / mean x^2 ratio, scale from the variance.
GgParams gg_fit_moments(const Grid2D& subband);

/// i.i.d. GG log-likelihood ratio: sum (|g|^c - |g-w|^c) / alpha^c.
double gg_detect(const Grid2D& subband, const Grid2D& w);

std::string detection_report_to_json_string(const DetectionReport& rep);
std::string roc_to_json_string(const RocCurve& roc);
std::string roc_to_csv(const RocCurve& roc);

}  // namespace ctmark
