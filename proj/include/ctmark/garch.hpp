#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ctmark/grid.hpp"

namespace ctmark {

/// Lag window sizes. Omega1 (ARCH terms) spans (q1,q2); Omega2 (GARCH
/// terms) spans (p1,p2); both windows exclude (0,0). At least one window
/// must be nonempty.
struct Garch2DOrder {
    int p1 = 1, p2 = 1, q1 = 1, q2 = 1;
};

/// Conditional-variance model
///   h_ij = alpha0 + sum_{Omega1} alpha_kl f^2_{i-k,j-l}
///               + sum_{Omega2} beta_kl h_{i-k,j-l}
/// with alpha0 > 0, nonnegative coefficients and stationarity margin
/// sum(alpha) + sum(beta) <= 1 - 1e-6. Coefficients are stored in the
/// row-major enumeration of their window (see omega_lags).
struct Garch2DParams {
    Garch2DOrder order;
    double alpha0 = 1.0;
    std::vector<double> alpha;
    std::vector<double> beta;
};

struct GarchFit {
    Garch2DParams params;
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct LmTestResult {
    bool H = false;
    double pValue = 1.0;
    double stat = 0.0;
    int dof = 0;
};

enum class ScanDirection { Horizontal, Vertical, Diagonal };

constexpr double kStationarityMargin = 1e-6;

/// Row-major (k,l) pairs over [0..m1]x[0..m2] minus (0,0).
std::vector<std::pair<int, int>> omega_lags(int m1, int m2);

void validate_order(const Garch2DOrder& o);
void validate_params(const Garch2DParams& p);

/// Population variance about the mean; the boundary value used by the
/// variance recursion on observed fields.
double boundary_variance(const Grid2D& f);

/// Raster-order recursion; out-of-range squared-sample and variance terms
/// are replaced by `boundary` (pass boundary_variance(f) for observed
/// data, the unconditional variance for synthetic data).
Grid2D cond_variance_field(const Grid2D& f, const Garch2DParams& p, double boundary);
Grid2D cond_variance_field(const Grid2D& f, const Garch2DParams& p);

double log_likelihood(const Grid2D& f, const Garch2DParams& p);

GarchFit fit_mle(const Grid2D& f, const Garch2DOrder& order);

Grid2D simulate_garch(const Garch2DParams& p, int rows, int cols, uint64_t seed);

std::vector<double> scan_series(const Grid2D& g, ScanDirection direction);

LmTestResult lm_test_engle(const std::vector<double>& series, int lags = 4,
                           double significance = 0.05);
LmTestResult lm_test_2d(const Grid2D& g, const Garch2DOrder& order, double significance = 0.05);

/// {order:[p1,p2,q1,q2], alpha0, alpha:[[k,l,v]...], beta:[[k,l,v]...], loglik}
std::string garch_fit_to_json_string(const GarchFit& fit);
Garch2DParams garch_params_from_json_string(const std::string& text);

}  // namespace ctmark
