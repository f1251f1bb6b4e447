#include "ctmark/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "json.hpp"

#include "ctmark/contourlet.hpp"
#include "ctmark/dwt.hpp"
#include "ctmark/garch.hpp"
#include "ctmark/pgm.hpp"
#include "ctmark/rng.hpp"
#include "ctmark/watermark.hpp"

namespace ctmark {

namespace {

using ordered_json = nlohmann::ordered_json;

// Gaussianity diagnostics need enough samples for the KS threshold to mean
// anything; below this they are skipped (fields stay at their -1 sentinel).
constexpr int kDiagnosticsMinimum = 36;

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string image_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    int t = std::max(1, threads);
    if (t == 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n) return;
            {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (err) return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (int k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// Per-(cell, key) noise seeds for attacks that draw randomness. The salt is
// detector-independent so ct-garch and ct-gg see identical attacked images.
struct KeySeeds {
    uint64_t h0;
    uint64_t h1;
};

KeySeeds key_seeds(uint64_t cell_salt, uint64_t key) {
    KeyedRng rng(cell_salt ^ key);
    KeySeeds s;
    s.h0 = rng.next_u64();
    s.h1 = rng.next_u64();
    return s;
}

// Everything the detectors need about one received image in the contourlet
// pipeline: selected subband, variance-model fit, GG fit, embedding strength.
struct CtContext {
    Grid2D g;
    GarchFit fit;
    GgParams gg;
    double gamma = 0.0;
};

CtContext make_ct_context(const Grid2D& received, double wdr_db,
                          const std::vector<int>& dir_levels) {
    ContourletDecomp d = contourlet_analyze(received, dir_levels);
    auto [scale, band] = select_subband(d);
    CtContext ctx;
    ctx.g = d.scales[static_cast<size_t>(scale)][static_cast<size_t>(band)];
    ctx.fit = fit_mle(ctx.g, Garch2DOrder{1, 1, 1, 1});
    ctx.gg = gg_fit_moments(ctx.g);
    ctx.gamma = gamma_for_wdr(ctx.g, wdr_db);
    return ctx;
}

struct CtSample {
    double garch = 0.0;
    double gg = 0.0;
};

CtSample score_ct(const CtContext& ctx, uint64_t key) {
    Grid2D w = prs_generate(key, ctx.g.rows(), ctx.g.cols());
    for (int i = 0; i < w.rows(); ++i)
        for (int j = 0; j < w.cols(); ++j) w(i, j) *= ctx.gamma;
    CtSample s;
    s.garch = llrt_statistic(ctx.g, w, ctx.fit.params);
    s.gg = gg_detect(ctx.g, w);
    return s;
}

// Wavelet baseline: max-energy level-`levels` detail subband (the same rule
// wt_embed_grid uses), variance model fitted on it.
struct WtContext {
    Grid2D g;
    GarchFit fit;
    double gamma = 0.0;
};

WtContext make_wt_context(const Grid2D& received, double wdr_db, int levels) {
    WaveletDecomp d = dwt2_analyze(received, levels);
    const auto& lvl = d.details[static_cast<size_t>(levels - 1)];
    const Grid2D* bands[3] = {&lvl.horizontal, &lvl.vertical, &lvl.diagonal};
    int best = 0;
    double best_e = subband_energy(*bands[0]);
    for (int b = 1; b < 3; ++b) {
        double e = subband_energy(*bands[b]);
        if (e > best_e) {
            best_e = e;
            best = b;
        }
    }
    WtContext ctx;
    ctx.g = *bands[best];
    ctx.fit = fit_mle(ctx.g, Garch2DOrder{1, 1, 1, 1});
    ctx.gamma = gamma_for_wdr(ctx.g, wdr_db);
    return ctx;
}

double score_wt(const WtContext& ctx, uint64_t key) {
    Grid2D w = prs_generate(key, ctx.g.rows(), ctx.g.cols());
    for (int i = 0; i < w.rows(); ++i)
        for (int j = 0; j < w.cols(); ++j) w(i, j) *= ctx.gamma;
    return llrt_statistic(ctx.g, w, ctx.fit.params);
}

void fill_diagnostics(CellResult& cell) {
    cell.auroc = 0.0;
    cell.roc = empirical_roc(cell.scores_h0, cell.scores_h1);
    cell.auroc = cell.roc.auroc;
    if (static_cast<int>(cell.scores_h0.size()) >= kDiagnosticsMinimum) {
        KsResult k0 = ks_test_gaussian(cell.scores_h0);
        KsResult k1 = ks_test_gaussian(cell.scores_h1);
        cell.ksd_h0 = k0.KSD;
        cell.ks_h0_H = k0.H;
        cell.ksd_h1 = k1.KSD;
        cell.ks_h1_H = k1.H;
        cell.kurt_h0 = sample_stats(cell.scores_h0).kurtosis;
        cell.kurt_h1 = sample_stats(cell.scores_h1).kurtosis;
    }
}

std::string sanitize_for_filename(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '.' || c == '_' || c == '-' || c == '+';
        out.push_back(ok ? c : '-');
    }
    return out;
}

ordered_json config_to_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["corpus"] = cfg.corpus;
    j["wdr_db_list"] = cfg.wdr_db_list;
    j["detectors"] = cfg.detectors;
    ordered_json atks = ordered_json::array();
    for (const auto& a : cfg.attacks)
        atks.push_back(ordered_json::parse(attack_spec_to_json_string(a)));
    j["attacks"] = atks;
    j["n_keys"] = cfg.n_keys;
    j["pf_grid"] = cfg.pf_grid;
    j["master_seed"] = cfg.master_seed;
    j["dir_levels"] = cfg.dir_levels;
    j["threads"] = cfg.threads;
    return j;
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.corpus.empty()) throw std::invalid_argument("experiment: corpus is empty");
    if (cfg.n_keys < 2) throw std::invalid_argument("experiment: n_keys must be at least 2");
    if (cfg.wdr_db_list.empty())
        throw std::invalid_argument("experiment: wdr_db_list is empty");
    if (cfg.detectors.empty()) throw std::invalid_argument("experiment: detectors is empty");
    std::unordered_set<std::string> seen;
    for (const auto& d : cfg.detectors) {
        if (d != "ct-garch" && d != "ct-gg" && d != "wt-garch")
            throw std::invalid_argument("experiment: unknown detector '" + d + "'");
        if (!seen.insert(d).second)
            throw std::invalid_argument("experiment: duplicate detector '" + d + "'");
    }
    for (const auto& a : cfg.attacks) validate_attack_spec(a);
}

}  // namespace

std::vector<uint64_t> draw_trial_keys(uint64_t master_seed, int n_keys) {
    if (n_keys < 1) throw std::invalid_argument("draw_trial_keys: n_keys must be positive");
    KeyedRng rng(master_seed);
    std::vector<uint64_t> keys(static_cast<size_t>(n_keys));
    std::unordered_set<uint64_t> seen;
    for (auto& k : keys) {
        k = rng.next_u64();
        if (!seen.insert(k).second)
            throw std::runtime_error("draw_trial_keys: key collision, change master_seed");
    }
    return keys;
}

ExperimentConfig experiment_config_from_json_string(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    if (!j.is_object()) throw std::invalid_argument("experiment config: expected JSON object");
    ExperimentConfig cfg;
    cfg.attacks.clear();
    for (const auto& [key, value] : j.items()) {
        if (key == "corpus") {
            cfg.corpus = value.get<std::vector<std::string>>();
        } else if (key == "wdr_db_list") {
            cfg.wdr_db_list = value.get<std::vector<double>>();
        } else if (key == "wdr_db") {
            cfg.wdr_db_list = {value.get<double>()};
        } else if (key == "detectors") {
            cfg.detectors = value.get<std::vector<std::string>>();
        } else if (key == "attacks") {
            if (!value.is_array())
                throw std::invalid_argument("experiment config: attacks must be an array");
            for (const auto& entry : value)
                cfg.attacks.push_back(attack_spec_from_json_string(entry.dump()));
        } else if (key == "n_keys") {
            cfg.n_keys = value.get<int>();
        } else if (key == "pf_grid") {
            cfg.pf_grid = value.get<std::vector<double>>();
        } else if (key == "master_seed") {
            cfg.master_seed = value.get<uint64_t>();
        } else if (key == "dir_levels") {
            cfg.dir_levels = value.get<std::vector<int>>();
        } else if (key == "threads") {
            cfg.threads = value.get<int>();
        } else {
            throw std::invalid_argument("experiment config: unknown key '" + key + "'");
        }
    }
    return cfg;
}

std::string experiment_config_to_json_string(const ExperimentConfig& cfg) {
    return config_to_json(cfg).dump(2);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    ExperimentReport report;
    report.config = cfg;
    if (report.config.pf_grid.empty()) report.config.pf_grid = default_pf_grid();
    std::vector<AttackSpec> attacks = cfg.attacks;
    if (attacks.empty()) {
        AttackSpec none;
        none.kind = "none";
        attacks.push_back(none);
    }
    const std::vector<uint64_t> keys = draw_trial_keys(cfg.master_seed, cfg.n_keys);
    const int nk = cfg.n_keys;

    bool want_ct_garch = false, want_ct_gg = false, want_wt = false;
    for (const auto& d : cfg.detectors) {
        if (d == "ct-garch") want_ct_garch = true;
        if (d == "ct-gg") want_ct_gg = true;
        if (d == "wt-garch") want_wt = true;
    }

    for (const auto& path : cfg.corpus) {
        const std::string stem = image_stem(path);
        const Grid2D original = to_grid(load_pgm(path));
        for (double wdr : cfg.wdr_db_list) {
            for (const auto& attack : attacks) {
                const std::string label = attack_label(attack);
                const bool deterministic = attack_is_deterministic(attack);
                const uint64_t salt =
                    fnv1a64(stem + "|" + label + "|" + format_double(wdr));

                // --- contourlet pipeline, shared by ct-garch and ct-gg ---
                std::vector<double> ct_garch_h0(nk), ct_garch_h1(nk);
                std::vector<double> ct_gg_h0(nk), ct_gg_h1(nk);
                double ct_seconds = 0.0;
                std::string ct_error;
                if (want_ct_garch || want_ct_gg) {
                    auto t0 = std::chrono::steady_clock::now();
                    try {
                        if (deterministic) {
                            const Grid2D attacked0 = apply_attack_grid(original, attack);
                            const CtContext ctx0 = make_ct_context(attacked0, wdr, cfg.dir_levels);
                            parallel_for(nk, cfg.threads, [&](int k) {
                                CtSample s = score_ct(ctx0, keys[static_cast<size_t>(k)]);
                                ct_garch_h0[static_cast<size_t>(k)] = s.garch;
                                ct_gg_h0[static_cast<size_t>(k)] = s.gg;
                            });
                        } else {
                            parallel_for(nk, cfg.threads, [&](int k) {
                                const uint64_t key = keys[static_cast<size_t>(k)];
                                const uint64_t seed = key_seeds(salt, key).h0;
                                const Grid2D attacked0 =
                                    apply_attack_grid(original, attack, &seed);
                                const CtContext c = make_ct_context(attacked0, wdr, cfg.dir_levels);
                                CtSample s = score_ct(c, key);
                                ct_garch_h0[static_cast<size_t>(k)] = s.garch;
                                ct_gg_h0[static_cast<size_t>(k)] = s.gg;
                            });
                        }
                        parallel_for(nk, cfg.threads, [&](int k) {
                            const uint64_t key = keys[static_cast<size_t>(k)];
                            const uint64_t seed = key_seeds(salt, key).h1;
                            const Grid2D marked =
                                embed_grid(original, key, wdr, cfg.dir_levels).first;
                            const Grid2D attacked =
                                deterministic ? apply_attack_grid(marked, attack)
                                              : apply_attack_grid(marked, attack, &seed);
                            const CtContext c = make_ct_context(attacked, wdr, cfg.dir_levels);
                            CtSample s = score_ct(c, key);
                            ct_garch_h1[static_cast<size_t>(k)] = s.garch;
                            ct_gg_h1[static_cast<size_t>(k)] = s.gg;
                        });
                    } catch (const std::exception& e) {
                        ct_error = e.what();
                    }
                    ct_seconds = std::chrono::duration<double>(
                                     std::chrono::steady_clock::now() - t0)
                                     .count();
                }

                // --- wavelet baseline pipeline ---
                std::vector<double> wt_h0(nk), wt_h1(nk);
                double wt_seconds = 0.0;
                std::string wt_error;
                if (want_wt) {
                    auto t0 = std::chrono::steady_clock::now();
                    try {
                        if (deterministic) {
                            const Grid2D attacked0 = apply_attack_grid(original, attack);
                            const WtContext ctx0 = make_wt_context(attacked0, wdr, 2);
                            parallel_for(nk, cfg.threads, [&](int k) {
                                wt_h0[static_cast<size_t>(k)] =
                                    score_wt(ctx0, keys[static_cast<size_t>(k)]);
                            });
                        } else {
                            parallel_for(nk, cfg.threads, [&](int k) {
                                const uint64_t key = keys[static_cast<size_t>(k)];
                                const uint64_t seed = key_seeds(salt, key).h0;
                                const Grid2D attacked0 =
                                    apply_attack_grid(original, attack, &seed);
                                const WtContext c = make_wt_context(attacked0, wdr, 2);
                                wt_h0[static_cast<size_t>(k)] = score_wt(c, key);
                            });
                        }
                        parallel_for(nk, cfg.threads, [&](int k) {
                            const uint64_t key = keys[static_cast<size_t>(k)];
                            const uint64_t seed = key_seeds(salt, key).h1;
                            const Grid2D marked = wt_embed_grid(original, key, wdr, 2).first;
                            const Grid2D attacked =
                                deterministic ? apply_attack_grid(marked, attack)
                                              : apply_attack_grid(marked, attack, &seed);
                            const WtContext c = make_wt_context(attacked, wdr, 2);
                            wt_h1[static_cast<size_t>(k)] = score_wt(c, key);
                        });
                    } catch (const std::exception& e) {
                        wt_error = e.what();
                    }
                    wt_seconds = std::chrono::duration<double>(
                                     std::chrono::steady_clock::now() - t0)
                                     .count();
                }

                for (const auto& det : cfg.detectors) {
                    CellResult cell;
                    cell.image = stem;
                    cell.detector = det;
                    cell.attack = label;
                    cell.wdr_db = wdr;
                    if (det == "wt-garch") {
                        cell.seconds = wt_seconds;
                        if (!wt_error.empty()) {
                            cell.failed = true;
                            cell.reason = wt_error;
                        } else {
                            cell.scores_h0 = wt_h0;
                            cell.scores_h1 = wt_h1;
                        }
                    } else {
                        cell.seconds = ct_seconds;
                        if (!ct_error.empty()) {
                            cell.failed = true;
                            cell.reason = ct_error;
                        } else if (det == "ct-garch") {
                            cell.scores_h0 = ct_garch_h0;
                            cell.scores_h1 = ct_garch_h1;
                        } else {
                            cell.scores_h0 = ct_gg_h0;
                            cell.scores_h1 = ct_gg_h1;
                        }
                    }
                    if (!cell.failed) {
                        try {
                            fill_diagnostics(cell);
                        } catch (const std::exception& e) {
                            cell.failed = true;
                            cell.reason = std::string("diagnostics: ") + e.what();
                        }
                    }
                    report.cells.push_back(std::move(cell));
                }
            }
        }
    }
    return report;
}

std::string experiment_report_to_json_string(const ExperimentReport& report) {
    ordered_json j;
    j["config"] = config_to_json(report.config);
    ordered_json cells = ordered_json::array();
    for (const auto& c : report.cells) {
        ordered_json jc;
        jc["image"] = c.image;
        jc["detector"] = c.detector;
        jc["attack"] = c.attack;
        jc["wdr_db"] = c.wdr_db;
        jc["failed"] = c.failed;
        jc["reason"] = c.reason;
        jc["seconds"] = c.seconds;
        jc["n_keys"] = c.scores_h0.size();
        jc["auroc"] = c.auroc;
        jc["ksd_h0"] = c.ksd_h0;
        jc["ks_h0_H"] = c.ks_h0_H;
        jc["ksd_h1"] = c.ksd_h1;
        jc["ks_h1_H"] = c.ks_h1_H;
        jc["kurt_h0"] = c.kurt_h0;
        jc["kurt_h1"] = c.kurt_h1;
        jc["scores_h0"] = c.scores_h0;
        jc["scores_h1"] = c.scores_h1;
        ordered_json roc;
        roc["auroc"] = c.roc.auroc;
        ordered_json pts = ordered_json::array();
        for (const auto& [pf, pd] : c.roc.points) pts.push_back({pf, pd});
        roc["points"] = pts;
        jc["roc"] = roc;
        cells.push_back(std::move(jc));
    }
    j["cells"] = cells;
    return j.dump(2);
}

std::string experiment_summary_csv(const ExperimentReport& report) {
    std::string out = "image,detector,attack,wdr_db,auroc,ksd_h0,ksd_h1,kurt_h0,kurt_h1,n_keys\n";
    for (const auto& c : report.cells) {
        out += c.image + "," + c.detector + "," + c.attack + "," + format_double(c.wdr_db) +
               "," + format_double(c.auroc) + "," + format_double(c.ksd_h0) + "," +
               format_double(c.ksd_h1) + "," + format_double(c.kurt_h0) + "," +
               format_double(c.kurt_h1) + "," + std::to_string(c.scores_h0.size()) + "\n";
    }
    return out;
}

void write_report(const ExperimentReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    auto write_file = [&](const std::string& name, const std::string& body) {
        const std::string path = (std::filesystem::path(dir) / name).string();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("write_report: cannot open " + path);
        f << body;
        if (!f) throw std::runtime_error("write_report: write failed for " + path);
    };
    write_file("report.json", experiment_report_to_json_string(report));
    write_file("summary.csv", experiment_summary_csv(report));
    for (const auto& c : report.cells) {
        if (c.failed) continue;
        const std::string name = "roc_" + sanitize_for_filename(c.image) + "_" +
                                 sanitize_for_filename(c.detector) + "_" +
                                 sanitize_for_filename(c.attack) + "_wdr" +
                                 sanitize_for_filename(format_double(c.wdr_db)) + ".csv";
        write_file(name, roc_to_csv(c.roc));
    }
}

}  // namespace ctmark
