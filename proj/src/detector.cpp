#include "ctmark/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ctmark/contourlet.hpp"
#include "ctmark/rng.hpp"
#include "ctmark/watermark.hpp"
#include "json.hpp"

namespace ctmark {

double gaussian_tail(double x) { return 0.5 * boost::math::erfc(x / std::sqrt(2.0)); }

double gaussian_tail_inv(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("gaussian_tail_inv: p must be in (0,1)");
    return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double llrt_statistic(const Grid2D& g, const Grid2D& w, const Garch2DParams& params) {
    if (!g.same_shape(w))
        throw std::invalid_argument("llrt_statistic: dimension mismatch");
    Grid2D r(g.rows(), g.cols());
    for (size_t k = 0; k < g.size(); ++k) r.data()[k] = g.data()[k] - w.data()[k];

    Grid2D h0 = cond_variance_field(g, params);
    Grid2D h1 = cond_variance_field(r, params);

    double acc = 0.0;
    for (size_t k = 0; k < g.size(); ++k) {
        double gv = g.data()[k], rv = r.data()[k];
        double h0v = h0.data()[k], h1v = h1.data()[k];
        acc += 0.5 * std::log(h0v / h1v) + gv * gv / (2.0 * h0v) - rv * rv / (2.0 * h1v);
    }
    return acc;
}

TheoreticalMoments theoretical_moments(const Grid2D& f, double gamma,
                                       const Garch2DParams& params) {
    if (gamma < 0.0)
        throw std::invalid_argument("theoretical_moments: gamma must be >= 0");
    validate_params(params);
    TheoreticalMoments m;
    if (gamma == 0.0) return m;

    Grid2D fm(f.rows(), f.cols()), fp(f.rows(), f.cols());
    for (size_t k = 0; k < f.size(); ++k) {
        fm.data()[k] = f.data()[k] - gamma;
        fp.data()[k] = f.data()[k] + gamma;
    }
    // same boundary for all three fields: a constant shift leaves the
    // population variance unchanged
    const double bvar = boundary_variance(f);
    Grid2D h = cond_variance_field(f, params, bvar);
    Grid2D hm = cond_variance_field(fm, params, bvar);
    Grid2D hp = cond_variance_field(fp, params, bvar);

    double mu = 0.0, var = 0.0;
    for (size_t k = 0; k < f.size(); ++k) {
        double fv = f.data()[k];
        double hv = h.data()[k];
        double quad0 = fv * fv / (2.0 * hv);
        // site term of log Lambda when this site's watermark is +gamma
        double lp = 0.5 * std::log(hv / hm.data()[k]) + quad0 -
                    (fv - gamma) * (fv - gamma) / (2.0 * hm.data()[k]);
        // ... and when it is -gamma
        double lm = 0.5 * std::log(hv / hp.data()[k]) + quad0 -
                    (fv + gamma) * (fv + gamma) / (2.0 * hp.data()[k]);
        mu += 0.5 * (lp + lm);
        double d = 0.5 * (lp - lm);
        var += d * d;
    }
    m.mu0 = mu;
    m.sigma0_sq = var;
    m.mu1 = -mu;
    m.sigma1_sq = var;
    return m;
}

double np_threshold(double mu0, double sigma0_sq, double pf_target) {
    if (!(pf_target > 0.0 && pf_target < 1.0))
        throw std::invalid_argument("np_threshold: pf_target must be in (0,1)");
    if (sigma0_sq < 0.0)
        throw std::invalid_argument("np_threshold: negative variance");
    return std::sqrt(sigma0_sq) * gaussian_tail_inv(pf_target) + mu0;
}

DetectionReport detect_grid(const Grid2D& img, uint64_t key, double wdr_db, double pf_target,
                            const std::vector<int>& dir_levels) {
    ContourletDecomp d = contourlet_analyze(img, dir_levels);
    auto [si, bi] = select_subband(d);
    const Grid2D& g = d.scales[si][bi];

    GarchFit fit = fit_mle(g, Garch2DOrder{});

    DetectionReport rep;
    rep.pf_target = pf_target;
    rep.params = fit.params;
    rep.fit_converged = fit.converged;
    rep.scale_index = si;
    rep.subband_index = bi;
    rep.gamma = wdr_db <= kWdrZeroCutoffDb ? 0.0 : gamma_for_wdr(g, wdr_db);

    Grid2D w = prs_generate(key, g.rows(), g.cols());
    for (size_t k = 0; k < w.size(); ++k) w.data()[k] *= rep.gamma;

    rep.statistic = llrt_statistic(g, w, fit.params);
    TheoreticalMoments m = theoretical_moments(g, rep.gamma, fit.params);
    rep.mu0 = m.mu0;
    rep.mu1 = m.mu1;
    rep.sigma0_sq = m.sigma0_sq;
    rep.sigma1_sq = m.sigma1_sq;
    rep.threshold = np_threshold(m.mu0, m.sigma0_sq, pf_target);
    rep.decision = rep.statistic > rep.threshold;
    return rep;
}

DetectionReport detect(const ImageU8& img, uint64_t key, double wdr_db, double pf_target,
                       const std::vector<int>& dir_levels) {
    return detect_grid(to_grid(img), key, wdr_db, pf_target, dir_levels);
}

RocCurve theoretical_roc(double mu0, double sigma0_sq, double mu1, double sigma1_sq,
                         const std::vector<double>& pf_grid) {
    if (pf_grid.empty())
        throw std::invalid_argument("theoretical_roc: empty pf grid");
    for (size_t i = 0; i < pf_grid.size(); ++i) {
        if (!(pf_grid[i] > 0.0 && pf_grid[i] < 1.0))
            throw std::invalid_argument("theoretical_roc: pf values must be in (0,1)");
        if (i && !(pf_grid[i] > pf_grid[i - 1]))
            throw std::invalid_argument("theoretical_roc: pf grid must be strictly increasing");
    }
    const double s0 = std::sqrt(std::max(0.0, sigma0_sq));
    const double s1 = std::sqrt(std::max(0.0, sigma1_sq));

    RocCurve roc;
    for (double pf : pf_grid) {
        double T = s0 * gaussian_tail_inv(pf) + mu0;
        double pd;
        if (s1 > 0.0)
            pd = gaussian_tail((T - mu1) / s1);
        else
            pd = mu1 > T ? 1.0 : 0.0;
        roc.points.emplace_back(pf, pd);
    }

    // trapezoid with (0,0) and (1,1) appended
    double area = 0.0, px = 0.0, py = 0.0;
    for (const auto& [x, y] : roc.points) {
        area += 0.5 * (y + py) * (x - px);
        px = x;
        py = y;
    }
    area += 0.5 * (1.0 + py) * (1.0 - px);
    roc.auroc = area;
    return roc;
}

std::vector<double> default_pf_grid() {
    const int n = 50;
    const double lo = std::log10(1e-4), hi = std::log10(0.5);
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i)
        grid[i] = std::pow(10.0, lo + (hi - lo) * i / (n - 1));
    grid.back() = 0.5;
    return grid;
}

RocCurve empirical_roc(const std::vector<double>& scores_h0,
                       const std::vector<double>& scores_h1) {
    if (scores_h0.empty() || scores_h1.empty())
        throw std::invalid_argument("empirical_roc: empty score set");
    const double n0 = static_cast<double>(scores_h0.size());
    const double n1 = static_cast<double>(scores_h1.size());

    std::vector<double> s0 = scores_h0, s1 = scores_h1;
    std::sort(s0.begin(), s0.end());
    std::sort(s1.begin(), s1.end());

    // Mann-Whitney with ties at 1/2: for each h1 score, count strictly
    // smaller h0 scores plus half the equal ones.
    double u = 0.0;
    for (double v : s1) {
        size_t lt = std::lower_bound(s0.begin(), s0.end(), v) - s0.begin();
        size_t le = std::upper_bound(s0.begin(), s0.end(), v) - s0.begin();
        u += static_cast<double>(lt) + 0.5 * static_cast<double>(le - lt);
    }

    RocCurve roc;
    roc.auroc = u / (n0 * n1);

    // step curve: detection means score > threshold; sweep thresholds over
    // the pooled values from high to low
    std::vector<double> pooled;
    pooled.reserve(s0.size() + s1.size());
    pooled.insert(pooled.end(), s0.begin(), s0.end());
    pooled.insert(pooled.end(), s1.begin(), s1.end());
    std::sort(pooled.begin(), pooled.end());
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(0.0, 0.0);  // threshold above every score
    for (auto it = pooled.rbegin(); it != pooled.rend(); ++it) {
        double t = *it;
        double pf = static_cast<double>(s0.end() - std::upper_bound(s0.begin(), s0.end(), t)) / n0;
        double pd = static_cast<double>(s1.end() - std::upper_bound(s1.begin(), s1.end(), t)) / n1;
        pts.emplace_back(pf, pd);
    }
    pts.emplace_back(1.0, 1.0);  // threshold below every score

    // keep pf strictly increasing: for equal pf keep the max pd
    for (const auto& p : pts) {
        if (!roc.points.empty() && roc.points.back().first == p.first)
            roc.points.back().second = std::max(roc.points.back().second, p.second);
        else
            roc.points.push_back(p);
    }
    return roc;
}

KsResult ks_test_gaussian(const std::vector<double>& samples, double significance) {
    if (samples.size() < 36)
        throw std::invalid_argument("ks_test_gaussian: need at least 36 samples");
    if (!(significance > 0.0 && significance < 1.0))
        throw std::invalid_argument("ks_test_gaussian: significance must be in (0,1)");
    ScalarStats st = sample_stats(samples);  // throws on zero variance
    const double sd = std::sqrt(st.variance);

    std::vector<double> xs = samples;
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double ksd = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double z = (xs[i] - st.mean) / sd;
        double cdf = 1.0 - gaussian_tail(z);
        double hi = (static_cast<double>(i) + 1.0) / n - cdf;
        double lo = cdf - static_cast<double>(i) / n;
        ksd = std::max(ksd, std::max(hi, lo));
    }

    KsResult res;
    res.KSD = ksd;
    res.n = xs.size();
    res.threshold = std::sqrt(-0.5 * std::log(significance / 2.0)) / std::sqrt(n);
    res.H = ksd > res.threshold;
    return res;
}

GgParams gg_fit_moments(const Grid2D& subband) {
    double m1 = 0.0, m2 = 0.0;
    for (size_t k = 0; k < subband.size(); ++k) {
        double v = subband.data()[k];
        m1 += std::abs(v);
        m2 += v * v;
    }
    m1 /= static_cast<double>(subband.size());
    m2 /= static_cast<double>(subband.size());
    if (!(m2 > 0.0))
        throw std::invalid_argument("gg_fit_moments: zero-power subband");
    const double r = m1 * m1 / m2;

    // rho(c) = Gamma(2/c)^2 / (Gamma(1/c) Gamma(3/c)) is increasing in c;
    // invert by bisection, clamping at the bracket ends for extreme data.
    auto rho = [](double c) {
        return std::exp(2.0 * std::lgamma(2.0 / c) - std::lgamma(1.0 / c) -
                        std::lgamma(3.0 / c));
    };
    double lo = 0.05, hi = 10.0;
    double c;
    if (r <= rho(lo))
        c = lo;
    else if (r >= rho(hi))
        c = hi;
    else {
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (rho(mid) < r ? lo : hi) = mid;
        }
        c = 0.5 * (lo + hi);
    }

    GgParams p;
    p.shape = c;
    p.scale = std::sqrt(m2 * std::exp(std::lgamma(1.0 / c) - std::lgamma(3.0 / c)));
    if (!(p.scale > 0.0) || !std::isfinite(p.scale))
        throw std::invalid_argument("gg_fit_moments: degenerate scale");
    return p;
}

double gg_detect(const Grid2D& subband, const Grid2D& w) {
    if (!subband.same_shape(w))
        throw std::invalid_argument("gg_detect: dimension mismatch");
    GgParams p = gg_fit_moments(subband);
    double acc = 0.0;
    for (size_t k = 0; k < subband.size(); ++k) {
        double g = subband.data()[k];
        double r = g - w.data()[k];
        acc += std::pow(std::abs(g), p.shape) - std::pow(std::abs(r), p.shape);
    }
    return acc / std::pow(p.scale, p.shape);
}

std::string detection_report_to_json_string(const DetectionReport& rep) {
    nlohmann::ordered_json j;
    j["statistic"] = rep.statistic;
    j["threshold"] = rep.threshold;
    j["decision"] = rep.decision;
    j["pf_target"] = rep.pf_target;
    j["mu0"] = rep.mu0;
    j["mu1"] = rep.mu1;
    j["sigma0_sq"] = rep.sigma0_sq;
    j["sigma1_sq"] = rep.sigma1_sq;
    j["scale_index"] = rep.scale_index;
    j["subband_index"] = rep.subband_index;
    j["gamma"] = rep.gamma;
    j["fit_converged"] = rep.fit_converged;
    j["params"] = nlohmann::ordered_json::parse(
        garch_fit_to_json_string(GarchFit{rep.params, 0.0, 0, rep.fit_converged}));
    j["params"].erase("loglik");
    return j.dump();
}

std::string roc_to_json_string(const RocCurve& roc) {
    nlohmann::ordered_json j;
    j["auroc"] = roc.auroc;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const auto& [pf, pd] : roc.points) pts.push_back({pf, pd});
    j["points"] = std::move(pts);
    return j.dump();
}

std::string roc_to_csv(const RocCurve& roc) {
    std::string out = "pf,pd\n";
    char buf[64];
    for (const auto& [pf, pd] : roc.points) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", pf, pd);
        out += buf;
    }
    return out;
}

}  // namespace ctmark
