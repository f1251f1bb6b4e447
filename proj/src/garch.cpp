#include "ctmark/garch.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "ctmark/rng.hpp"
#include "json.hpp"

namespace ctmark {

namespace {

constexpr double kClamp = 40.0;  // reparameterization exponent clamp

double clamp_exp_arg(double t) { return std::min(kClamp, std::max(-kClamp, t)); }

}  // namespace

std::vector<std::pair<int, int>> omega_lags(int m1, int m2) {
    std::vector<std::pair<int, int>> out;
    for (int k = 0; k <= m1; ++k)
        for (int l = 0; l <= m2; ++l)
            if (k || l) out.emplace_back(k, l);
    return out;
}

void validate_order(const Garch2DOrder& o) {
    if (o.p1 < 0 || o.p2 < 0 || o.q1 < 0 || o.q2 < 0)
        throw std::invalid_argument("garch order: negative lag count");
    bool omega1_empty = (o.q1 == 0 && o.q2 == 0);
    bool omega2_empty = (o.p1 == 0 && o.p2 == 0);
    if (omega1_empty && omega2_empty)
        throw std::invalid_argument("garch order: both lag windows empty");
}

void validate_params(const Garch2DParams& p) {
    validate_order(p.order);
    if (!(p.alpha0 > 0.0) || !std::isfinite(p.alpha0))
        throw std::invalid_argument("garch params: alpha0 must be positive");
    if (p.alpha.size() != omega_lags(p.order.q1, p.order.q2).size())
        throw std::invalid_argument("garch params: alpha size mismatch");
    if (p.beta.size() != omega_lags(p.order.p1, p.order.p2).size())
        throw std::invalid_argument("garch params: beta size mismatch");
    double sum = 0.0;
    for (double a : p.alpha) {
        if (a < 0.0 || !std::isfinite(a))
            throw std::invalid_argument("garch params: alpha must be nonnegative");
        sum += a;
    }
    for (double b : p.beta) {
        if (b < 0.0 || !std::isfinite(b))
            throw std::invalid_argument("garch params: beta must be nonnegative");
        sum += b;
    }
    // small absolute slack: the optimizer's softmax decode can land on the
    // bound and summation roundoff must not spuriously reject it
    if (sum > 1.0 - kStationarityMargin + 1e-12)
        throw std::invalid_argument("garch params: stationarity bound violated");
}

double boundary_variance(const Grid2D& f) {
    double mean = 0.0;
    for (size_t k = 0; k < f.size(); ++k) mean += f.data()[k];
    mean /= static_cast<double>(f.size());
    double var = 0.0;
    for (size_t k = 0; k < f.size(); ++k) {
        double d = f.data()[k] - mean;
        var += d * d;
    }
    return var / static_cast<double>(f.size());
}

Grid2D cond_variance_field(const Grid2D& f, const Garch2DParams& p, double boundary) {
    validate_params(p);
    const int R = f.rows(), C = f.cols();
    const auto o1 = omega_lags(p.order.q1, p.order.q2);
    const auto o2 = omega_lags(p.order.p1, p.order.p2);
    Grid2D h(R, C);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) {
            double acc = p.alpha0;
            for (size_t t = 0; t < o1.size(); ++t) {
                int ii = i - o1[t].first, jj = j - o1[t].second;
                double f2 = (ii >= 0 && jj >= 0 && jj < C) ? f(ii, jj) * f(ii, jj) : boundary;
                acc += p.alpha[t] * f2;
            }
            for (size_t t = 0; t < o2.size(); ++t) {
                int ii = i - o2[t].first, jj = j - o2[t].second;
                double hv = (ii >= 0 && jj >= 0 && jj < C) ? h(ii, jj) : boundary;
                acc += p.beta[t] * hv;
            }
            h(i, j) = acc;
        }
    return h;
}

Grid2D cond_variance_field(const Grid2D& f, const Garch2DParams& p) {
    return cond_variance_field(f, p, boundary_variance(f));
}

double log_likelihood(const Grid2D& f, const Garch2DParams& p) {
    Grid2D h = cond_variance_field(f, p);
    double ll = 0.0;
    for (size_t k = 0; k < f.size(); ++k) {
        double hv = h.data()[k];
        double fv = f.data()[k];
        ll += -0.5 * std::log(2.0 * M_PI * hv) - fv * fv / (2.0 * hv);
    }
    return ll;
}

Grid2D simulate_garch(const Garch2DParams& p, int rows, int cols, uint64_t seed) {
    validate_params(p);
    double load = std::accumulate(p.alpha.begin(), p.alpha.end(), 0.0) +
                  std::accumulate(p.beta.begin(), p.beta.end(), 0.0);
    const double uncond = p.alpha0 / (1.0 - load);
    const auto o1 = omega_lags(p.order.q1, p.order.q2);
    const auto o2 = omega_lags(p.order.p1, p.order.p2);

    KeyedRng rng(seed);
    Grid2D f(rows, cols), h(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            double acc = p.alpha0;
            for (size_t t = 0; t < o1.size(); ++t) {
                int ii = i - o1[t].first, jj = j - o1[t].second;
                double f2 = (ii >= 0 && jj >= 0 && jj < cols) ? f(ii, jj) * f(ii, jj) : uncond;
                acc += p.alpha[t] * f2;
            }
            for (size_t t = 0; t < o2.size(); ++t) {
                int ii = i - o2[t].first, jj = j - o2[t].second;
                double hv = (ii >= 0 && jj >= 0 && jj < cols) ? h(ii, jj) : uncond;
                acc += p.beta[t] * hv;
            }
            h(i, j) = acc;
            f(i, j) = std::sqrt(acc) * rng.next_normal();
        }
    return f;
}

// ---------------------------------------------------------------------------
// MLE via unconstrained reparameterization + Nelder-Mead.
//
//   alpha0 = exp(t0)
//   (alpha,beta)_i = (1 - margin) exp(t_i) / (1 + sum_j exp(t_j))
//
// The map keeps alpha0 > 0, coefficients > 0 and their sum strictly under
// 1 - margin for every theta in R^(1+m).

namespace {

struct Reparam {
    Garch2DOrder order;
    size_t n_alpha, n_beta;

    Garch2DParams decode(const std::vector<double>& theta) const {
        Garch2DParams p;
        p.order = order;
        p.alpha0 = std::exp(clamp_exp_arg(theta[0]));
        const size_t m = n_alpha + n_beta;
        double s = 0.0;
        std::vector<double> e(m);
        for (size_t i = 0; i < m; ++i) {
            e[i] = std::exp(clamp_exp_arg(theta[1 + i]));
            s += e[i];
        }
        const double scale = (1.0 - kStationarityMargin) / (1.0 + s);
        p.alpha.resize(n_alpha);
        p.beta.resize(n_beta);
        for (size_t i = 0; i < n_alpha; ++i) p.alpha[i] = e[i] * scale;
        for (size_t i = 0; i < n_beta; ++i) p.beta[i] = e[n_alpha + i] * scale;
        return p;
    }

    std::vector<double> encode(double alpha0, const std::vector<double>& u) const {
        const size_t m = n_alpha + n_beta;
        double total = std::accumulate(u.begin(), u.end(), 0.0);
        double T = std::min(total / (1.0 - kStationarityMargin), 1.0 - 1e-9);
        double S = T / (1.0 - T);
        std::vector<double> theta(1 + m);
        theta[0] = std::log(alpha0);
        for (size_t i = 0; i < m; ++i)
            theta[1 + i] = std::log(std::max(u[i], 1e-12) * (1.0 + S) /
                                    (1.0 - kStationarityMargin));
        return theta;
    }
};

struct NmResult {
    std::vector<double> x;
    double fval = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Standard Nelder-Mead (reflect 1, expand 2, contract 0.5, shrink 0.5),
// deterministic ordering. Converged when the simplex value spread falls
// under tol relative to the best value.
NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                     const std::vector<double>& x0, double step, double tol, int max_iter) {
    const size_t n = x0.size();
    std::vector<std::vector<double>> xs(n + 1, x0);
    for (size_t i = 0; i < n; ++i) xs[i + 1][i] += step;
    std::vector<double> fv(n + 1);
    for (size_t i = 0; i <= n; ++i) fv[i] = fn(xs[i]);

    NmResult res;
    std::vector<size_t> ord(n + 1);
    for (int it = 0; it < max_iter; ++it) {
        std::iota(ord.begin(), ord.end(), size_t{0});
        std::stable_sort(ord.begin(), ord.end(),
                         [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        const size_t best = ord[0], second_worst = ord[n - 1], worst = ord[n];

        double spread = fv[worst] - fv[best];
        if (spread <= tol * (std::abs(fv[best]) + 1e-12)) {
            res.converged = true;
            res.iterations = it;
            res.x = xs[best];
            res.fval = fv[best];
            return res;
        }

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (size_t d = 0; d < n; ++d) centroid[d] += xs[i][d];
        }
        for (size_t d = 0; d < n; ++d) centroid[d] /= static_cast<double>(n);

        auto blend = [&](double c) {
            std::vector<double> x(n);
            for (size_t d = 0; d < n; ++d) x[d] = centroid[d] + c * (centroid[d] - xs[worst][d]);
            return x;
        };

        std::vector<double> xr = blend(1.0);
        double fr = fn(xr);
        if (fr < fv[best]) {
            std::vector<double> xe = blend(2.0);
            double fe = fn(xe);
            if (fe < fr) {
                xs[worst] = std::move(xe);
                fv[worst] = fe;
            } else {
                xs[worst] = std::move(xr);
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            xs[worst] = std::move(xr);
            fv[worst] = fr;
        } else {
            bool outside = fr < fv[worst];
            std::vector<double> xc = blend(outside ? 0.5 : -0.5);
            double fc = fn(xc);
            if (fc < std::min(fr, fv[worst])) {
                xs[worst] = std::move(xc);
                fv[worst] = fc;
            } else {
                for (size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (size_t d = 0; d < n; ++d)
                        xs[i][d] = xs[best][d] + 0.5 * (xs[i][d] - xs[best][d]);
                    fv[i] = fn(xs[i]);
                }
            }
        }
    }

    size_t best = std::min_element(fv.begin(), fv.end()) - fv.begin();
    res.converged = false;
    res.iterations = max_iter;
    res.x = xs[best];
    res.fval = fv[best];
    return res;
}

double neg_loglik(const Grid2D& f, const Garch2DParams& p, double boundary) {
    Grid2D h = cond_variance_field(f, p, boundary);
    double ll = 0.0;
    for (size_t k = 0; k < f.size(); ++k) {
        double hv = h.data()[k];
        double fv = f.data()[k];
        ll += -0.5 * std::log(2.0 * M_PI * hv) - fv * fv / (2.0 * hv);
    }
    if (!std::isfinite(ll)) return 1e300;
    return -ll;
}

}  // namespace

GarchFit fit_mle(const Grid2D& f, const Garch2DOrder& order) {
    validate_order(order);
    const double var = boundary_variance(f);
    if (!(var > 0.0))
        throw std::invalid_argument("fit_mle: zero-variance field");

    Reparam rp;
    rp.order = order;
    rp.n_alpha = omega_lags(order.q1, order.q2).size();
    rp.n_beta = omega_lags(order.p1, order.p2).size();

    auto objective = [&](const std::vector<double>& theta) {
        return neg_loglik(f, rp.decode(theta), var);
    };

    // Two deterministic starts: the pinned mixed start, and a nearly
    // pure-ARCH start. On near-i.i.d. data the likelihood has a flat ridge
    // alpha0/(1 - sum beta) = const; the second start reaches its
    // parsimonious end.
    std::vector<double> u_mixed, u_arch;
    for (size_t i = 0; i < rp.n_alpha; ++i) {
        u_mixed.push_back(0.1 / static_cast<double>(rp.n_alpha));
        u_arch.push_back(0.15 / static_cast<double>(rp.n_alpha));
    }
    for (size_t i = 0; i < rp.n_beta; ++i) {
        u_mixed.push_back(0.3 / static_cast<double>(rp.n_beta));
        u_arch.push_back(1e-8);
    }

    struct Candidate {
        NmResult nm;
        Garch2DParams params;
        double loglik;
        double load;
    };
    std::vector<Candidate> cands;
    for (const auto& [a0, u] :
         {std::pair{0.5 * var, u_mixed}, std::pair{0.8 * var, u_arch}}) {
        NmResult nm = nelder_mead(objective, rp.encode(a0, u), 0.5, 1e-8, 500);
        Candidate c;
        c.params = rp.decode(nm.x);
        c.loglik = -nm.fval;
        c.load = std::accumulate(c.params.alpha.begin(), c.params.alpha.end(), 0.0) +
                 std::accumulate(c.params.beta.begin(), c.params.beta.end(), 0.0);
        c.nm = std::move(nm);
        cands.push_back(std::move(c));
    }

    const Candidate* pick = &cands[0];
    for (const Candidate& c : cands) {
        double rel_gap = (c.loglik - pick->loglik) / (std::abs(pick->loglik) + 1e-12);
        if (rel_gap > 1e-6)
            pick = &c;
        else if (std::abs(rel_gap) <= 1e-6 && c.load < pick->load)
            pick = &c;  // parsimony tie-break on the flat ridge
    }

    GarchFit fit;
    fit.params = pick->params;
    fit.loglik = pick->loglik;
    fit.iterations = pick->nm.iterations;
    fit.converged = pick->nm.converged;
    return fit;
}

std::vector<double> scan_series(const Grid2D& g, ScanDirection direction) {
    const int R = g.rows(), C = g.cols();
    std::vector<double> out;
    out.reserve(g.size());
    switch (direction) {
        case ScanDirection::Horizontal:
            for (int i = 0; i < R; ++i)
                for (int j = 0; j < C; ++j) out.push_back(g(i, j));
            break;
        case ScanDirection::Vertical:
            for (int j = 0; j < C; ++j)
                for (int i = 0; i < R; ++i) out.push_back(g(i, j));
            break;
        case ScanDirection::Diagonal:
            // anti-diagonals top-left to bottom-right, row ascending inside
            for (int d = 0; d <= R + C - 2; ++d)
                for (int i = std::max(0, d - C + 1); i <= std::min(d, R - 1); ++i)
                    out.push_back(g(i, d - i));
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lagrange-multiplier tests: n * R^2 of an auxiliary regression of the
// centered squared data on its lagged squared values, chi-square reference.

namespace {

// R^2 of y on [1, regressors...] via normal equations with partial
// pivoting. Throws on zero-variance y or singular design.
double ols_r2(const std::vector<std::vector<double>>& regressors, const std::vector<double>& y) {
    const size_t n = y.size();
    const size_t k = regressors.size() + 1;  // + intercept
    std::vector<std::vector<double>> G(k, std::vector<double>(k + 1, 0.0));

    auto reg = [&](size_t c, size_t t) -> double {
        return c == 0 ? 1.0 : regressors[c - 1][t];
    };
    for (size_t a = 0; a < k; ++a) {
        for (size_t b = a; b < k; ++b) {
            double s = 0.0;
            for (size_t t = 0; t < n; ++t) s += reg(a, t) * reg(b, t);
            G[a][b] = s;
            G[b][a] = s;
        }
        double s = 0.0;
        for (size_t t = 0; t < n; ++t) s += reg(a, t) * y[t];
        G[a][k] = s;
    }

    double scale = 0.0;
    for (size_t a = 0; a < k; ++a) scale = std::max(scale, std::abs(G[a][a]));
    for (size_t col = 0; col < k; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < k; ++r)
            if (std::abs(G[r][col]) > std::abs(G[piv][col])) piv = r;
        if (std::abs(G[piv][col]) < 1e-12 * scale)
            throw std::invalid_argument("lm test: degenerate regression");
        std::swap(G[piv], G[col]);
        for (size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            double m = G[r][col] / G[col][col];
            for (size_t c = col; c <= k; ++c) G[r][c] -= m * G[col][c];
        }
    }
    std::vector<double> coef(k);
    for (size_t a = 0; a < k; ++a) coef[a] = G[a][k] / G[a][a];

    double mean_y = 0.0;
    for (double v : y) mean_y += v;
    mean_y /= static_cast<double>(n);
    double sst = 0.0, ssr = 0.0;
    for (size_t t = 0; t < n; ++t) {
        double pred = 0.0;
        for (size_t a = 0; a < k; ++a) pred += coef[a] * reg(a, t);
        double ry = y[t] - pred;
        ssr += ry * ry;
        double dy = y[t] - mean_y;
        sst += dy * dy;
    }
    if (sst <= 0.0)
        throw std::invalid_argument("lm test: degenerate regression (zero variance)");
    double r2 = 1.0 - ssr / sst;
    return std::max(0.0, std::min(1.0, r2));
}

LmTestResult lm_from_r2(double r2, size_t n, int dof, double significance) {
    LmTestResult res;
    res.stat = static_cast<double>(n) * r2;
    res.dof = dof;
    res.pValue = boost::math::gamma_q(dof / 2.0, res.stat / 2.0);
    res.H = res.pValue < significance;
    return res;
}

}  // namespace

LmTestResult lm_test_engle(const std::vector<double>& series, int lags, double significance) {
    if (lags < 1) throw std::invalid_argument("lm_test_engle: lags must be >= 1");
    if (series.size() <= static_cast<size_t>(10 * lags))
        throw std::invalid_argument("lm_test_engle: series too short for lag count");

    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    std::vector<double> z(series.size());
    for (size_t t = 0; t < series.size(); ++t) {
        double e = series[t] - mean;
        z[t] = e * e;
    }

    const size_t n = series.size() - static_cast<size_t>(lags);
    std::vector<double> y(z.begin() + lags, z.end());
    std::vector<std::vector<double>> regs(lags);
    for (int l = 1; l <= lags; ++l)
        regs[l - 1].assign(z.begin() + (lags - l), z.begin() + (lags - l) + n);

    return lm_from_r2(ols_r2(regs, y), n, lags, significance);
}

LmTestResult lm_test_2d(const Grid2D& g, const Garch2DOrder& order, double significance) {
    validate_order(order);
    const int q1 = order.q1, q2 = order.q2;
    const auto o1 = omega_lags(q1, q2);
    if (o1.empty())
        throw std::invalid_argument("lm_test_2d: empty ARCH lag window");
    const int max_lag = std::max(q1, q2);
    if (g.rows() <= 4 * max_lag || g.cols() <= 4 * max_lag)
        throw std::invalid_argument("lm_test_2d: grid too small for lag window");

    double mean = 0.0;
    for (size_t k = 0; k < g.size(); ++k) mean += g.data()[k];
    mean /= static_cast<double>(g.size());
    Grid2D z(g.rows(), g.cols());
    for (size_t k = 0; k < g.size(); ++k) {
        double e = g.data()[k] - mean;
        z.data()[k] = e * e;
    }

    std::vector<double> y;
    std::vector<std::vector<double>> regs(o1.size());
    for (int i = q1; i < g.rows(); ++i)
        for (int j = q2; j < g.cols(); ++j) {
            y.push_back(z(i, j));
            for (size_t t = 0; t < o1.size(); ++t)
                regs[t].push_back(z(i - o1[t].first, j - o1[t].second));
        }

    return lm_from_r2(ols_r2(regs, y), y.size(), static_cast<int>(o1.size()), significance);
}

// ---------------------------------------------------------------------------

std::string garch_fit_to_json_string(const GarchFit& fit) {
    nlohmann::ordered_json j;
    j["order"] = {fit.params.order.p1, fit.params.order.p2, fit.params.order.q1,
                  fit.params.order.q2};
    j["alpha0"] = fit.params.alpha0;
    auto o1 = omega_lags(fit.params.order.q1, fit.params.order.q2);
    auto o2 = omega_lags(fit.params.order.p1, fit.params.order.p2);
    nlohmann::ordered_json ja = nlohmann::ordered_json::array();
    for (size_t t = 0; t < o1.size(); ++t)
        ja.push_back({o1[t].first, o1[t].second, fit.params.alpha[t]});
    nlohmann::ordered_json jb = nlohmann::ordered_json::array();
    for (size_t t = 0; t < o2.size(); ++t)
        jb.push_back({o2[t].first, o2[t].second, fit.params.beta[t]});
    j["alpha"] = std::move(ja);
    j["beta"] = std::move(jb);
    j["loglik"] = fit.loglik;
    return j.dump();
}

Garch2DParams garch_params_from_json_string(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Garch2DParams p;
    p.order.p1 = j.at("order").at(0).get<int>();
    p.order.p2 = j.at("order").at(1).get<int>();
    p.order.q1 = j.at("order").at(2).get<int>();
    p.order.q2 = j.at("order").at(3).get<int>();
    p.alpha0 = j.at("alpha0").get<double>();
    auto o1 = omega_lags(p.order.q1, p.order.q2);
    auto o2 = omega_lags(p.order.p1, p.order.p2);
    p.alpha.assign(o1.size(), 0.0);
    p.beta.assign(o2.size(), 0.0);
    auto fill = [](const nlohmann::json& arr, const std::vector<std::pair<int, int>>& lags,
                   std::vector<double>& out, const char* what) {
        for (const auto& e : arr) {
            int k = e.at(0).get<int>(), l = e.at(1).get<int>();
            double v = e.at(2).get<double>();
            auto it = std::find(lags.begin(), lags.end(), std::make_pair(k, l));
            if (it == lags.end())
                throw std::invalid_argument(std::string("garch json: lag outside window in ") +
                                            what);
            out[it - lags.begin()] = v;
        }
    };
    fill(j.at("alpha"), o1, p.alpha, "alpha");
    fill(j.at("beta"), o2, p.beta, "beta");
    validate_params(p);
    return p;
}

}  // namespace ctmark
