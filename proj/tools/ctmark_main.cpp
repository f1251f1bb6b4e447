// Command-line front end: embed/detect single runs, LM-test tables,
// variance-model fits, attack application, and Monte-Carlo experiments.
//
// Exit codes: 0 success (for `detect`: watermark detected), 1 watermark not
// detected (`detect` only), 2 usage or runtime error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ctmark/attacks.hpp"
#include "ctmark/contourlet.hpp"
#include "ctmark/detector.hpp"
#include "ctmark/experiment.hpp"
#include "ctmark/garch.hpp"
#include "ctmark/grid.hpp"
#include "ctmark/pgm.hpp"
#include "ctmark/watermark.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << body;
    if (!f) throw std::runtime_error("write failed for " + path);
}

struct EmbedArgs {
    std::string in, out, record;
    uint64_t key = 0;
    double wdr = -50.0;
    std::vector<int> dir_levels = {2, 3};
};

int cmd_embed(const EmbedArgs& a, bool json_out) {
    ctmark::ImageU8 img = ctmark::load_pgm(a.in);
    auto [marked, rec] = ctmark::embed(img, a.key, a.wdr, a.dir_levels);
    ctmark::save_pgm(a.out, marked);
    const std::string record_path = a.record.empty() ? a.out + ".json" : a.record;
    write_text_file(record_path, ctmark::embed_record_to_json_string(rec) + "\n");
    const double p = ctmark::psnr(img, marked);
    if (json_out) {
        ordered_json j;
        j["psnr_db"] = p;
        j["output"] = a.out;
        j["record"] = ordered_json::parse(ctmark::embed_record_to_json_string(rec));
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "psnr_db " << p << "\n";
    }
    return 0;
}

struct DetectArgs {
    std::string in;
    uint64_t key = 0;
    double wdr = -50.0;
    double pf = 0.05;
    std::vector<int> dir_levels = {2, 3};
};

int cmd_detect(const DetectArgs& a) {
    ctmark::ImageU8 img = ctmark::load_pgm(a.in);
    ctmark::DetectionReport rep = ctmark::detect(img, a.key, a.wdr, a.pf, a.dir_levels);
    std::cout << ctmark::detection_report_to_json_string(rep) << "\n";
    return rep.decision ? 0 : 1;
}

struct LmArgs {
    std::string in;
    std::vector<int> dir_levels = {2, 3};
    int lags = 4;
};

int cmd_lmtest(const LmArgs& a, bool json_out) {
    ctmark::ImageU8 img = ctmark::load_pgm(a.in);
    ctmark::ContourletDecomp d = ctmark::contourlet_analyze(ctmark::to_grid(img), a.dir_levels);
    const auto& finest = d.scales.back();
    const int scale = static_cast<int>(d.scales.size()) - 1;
    const ctmark::Garch2DOrder order{1, 1, 1, 1};

    struct Row {
        int band;
        int rows, cols;
        ctmark::LmTestResult t[4];  // vertical, horizontal, diagonal, two dimensional
    };
    static const char* kScanNames[4] = {"vertical", "horizontal", "diagonal", "two dimensional"};
    std::vector<Row> rows;
    for (size_t b = 0; b < finest.size(); ++b) {
        const ctmark::Grid2D& g = finest[b];
        Row r;
        r.band = static_cast<int>(b);
        r.rows = g.rows();
        r.cols = g.cols();
        r.t[0] = ctmark::lm_test_engle(ctmark::scan_series(g, ctmark::ScanDirection::Vertical),
                                       a.lags);
        r.t[1] = ctmark::lm_test_engle(ctmark::scan_series(g, ctmark::ScanDirection::Horizontal),
                                       a.lags);
        r.t[2] = ctmark::lm_test_engle(ctmark::scan_series(g, ctmark::ScanDirection::Diagonal),
                                       a.lags);
        r.t[3] = ctmark::lm_test_2d(g, order);
        rows.push_back(r);
    }

    if (json_out) {
        ordered_json j;
        j["scale_index"] = scale;
        ordered_json bands = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json jb;
            jb["subband_index"] = r.band;
            jb["rows"] = r.rows;
            jb["cols"] = r.cols;
            ordered_json tests;
            for (int s = 0; s < 4; ++s) {
                ordered_json jt;
                jt["H"] = r.t[s].H;
                jt["pValue"] = r.t[s].pValue;
                jt["stat"] = r.t[s].stat;
                jt["dof"] = r.t[s].dof;
                tests[kScanNames[s]] = jt;
            }
            jb["tests"] = tests;
            bands.push_back(jb);
        }
        j["subbands"] = bands;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "finest scale " << scale << ", " << rows.size() << " subbands\n";
        for (const auto& r : rows) {
            std::cout << "subband " << r.band << " (" << r.rows << "x" << r.cols << ")\n";
            for (int s = 0; s < 4; ++s) {
                char line[160];
                std::snprintf(line, sizeof(line), "  %-16s H=%d  pValue=%.6g  stat=%.6g\n",
                              kScanNames[s], r.t[s].H ? 1 : 0, r.t[s].pValue, r.t[s].stat);
                std::cout << line;
            }
        }
    }
    return 0;
}

struct FitArgs {
    std::string in;
    std::vector<int> dir_levels = {2, 3};
};

int cmd_fit(const FitArgs& a) {
    ctmark::ImageU8 img = ctmark::load_pgm(a.in);
    ctmark::ContourletDecomp d = ctmark::contourlet_analyze(ctmark::to_grid(img), a.dir_levels);
    auto [scale, band] = ctmark::select_subband(d);
    const ctmark::Grid2D& g = d.scales[static_cast<size_t>(scale)][static_cast<size_t>(band)];
    ctmark::GarchFit fit = ctmark::fit_mle(g, ctmark::Garch2DOrder{1, 1, 1, 1});
    ordered_json j;
    j["scale_index"] = scale;
    j["subband_index"] = band;
    j["rows"] = g.rows();
    j["cols"] = g.cols();
    j["converged"] = fit.converged;
    j["fit"] = ordered_json::parse(ctmark::garch_fit_to_json_string(fit));
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct AttackArgs {
    std::string in, out, spec_path;
};

void override_awgn_seeds(ctmark::AttackSpec& spec, uint64_t seed) {
    if (spec.kind == "awgn") spec.seed = seed;
    for (auto& c : spec.children) override_awgn_seeds(c, seed);
}

int cmd_attack(const AttackArgs& a, bool json_out, bool seed_given, uint64_t seed) {
    ctmark::ImageU8 img = ctmark::load_pgm(a.in);
    const std::string text = read_text_file(a.spec_path);
    ordered_json j = ordered_json::parse(text);
    ctmark::AttackSpec spec;
    if (j.is_array()) {
        spec.kind = "compose";
        for (const auto& entry : j)
            spec.children.push_back(ctmark::attack_spec_from_json_string(entry.dump()));
    } else {
        spec = ctmark::attack_spec_from_json_string(text);
    }
    if (seed_given) override_awgn_seeds(spec, seed);
    ctmark::validate_attack_spec(spec);
    ctmark::ImageU8 attacked = ctmark::apply_attack(img, spec);
    ctmark::save_pgm(a.out, attacked);
    const double p = ctmark::psnr(img, attacked);
    if (json_out) {
        ordered_json out;
        out["attack"] = ctmark::attack_label(spec);
        out["psnr_db"] = p;
        out["output"] = a.out;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "attack " << ctmark::attack_label(spec) << " psnr_db " << p << "\n";
    }
    return 0;
}

struct ExperimentArgs {
    std::string config_path, out_dir;
};

int cmd_experiment(const ExperimentArgs& a, bool seed_given, uint64_t seed, bool threads_given,
                   int threads) {
    ctmark::ExperimentConfig cfg =
        ctmark::experiment_config_from_json_string(read_text_file(a.config_path));
    if (seed_given) cfg.master_seed = seed;
    if (threads_given) cfg.threads = threads;
    ctmark::ExperimentReport report = ctmark::run_experiment(cfg);
    ctmark::write_report(report, a.out_dir);
    for (const auto& c : report.cells) {
        char line[256];
        if (c.failed) {
            std::snprintf(line, sizeof(line), "%-12s %-9s %-22s wdr=%g FAILED: %s\n",
                          c.image.c_str(), c.detector.c_str(), c.attack.c_str(), c.wdr_db,
                          c.reason.c_str());
        } else {
            std::snprintf(line, sizeof(line), "%-12s %-9s %-22s wdr=%g auroc=%.4f\n",
                          c.image.c_str(), c.detector.c_str(), c.attack.c_str(), c.wdr_db,
                          c.auroc);
        }
        std::cout << line;
    }
    std::cout << "report written to " << a.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blind contourlet-domain image watermarking with a 2D-GARCH detector"};
    app.require_subcommand(1);

    bool json_out = false;
    uint64_t seed = 42;
    int threads = 1;
    app.add_flag("--json", json_out, "machine-readable JSON output where supported");
    auto* seed_opt = app.add_option("--seed", seed, "seed override for randomized steps");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads for experiments");

    EmbedArgs ea;
    auto* embed = app.add_subcommand("embed", "embed a watermark into a PGM image");
    embed->add_option("--in", ea.in, "input PGM")->required();
    embed->add_option("--out", ea.out, "output PGM")->required();
    embed->add_option("--key", ea.key, "64-bit watermark key")->required();
    embed->add_option("--wdr", ea.wdr, "watermark-to-document ratio in dB")->required();
    embed->add_option("--record", ea.record, "embed-record sidecar path (default <out>.json)");
    embed->add_option("--dir-levels", ea.dir_levels, "directional levels per scale")
        ->delimiter(',');

    DetectArgs da;
    auto* detect = app.add_subcommand("detect", "blind watermark detection");
    detect->add_option("--in", da.in, "input PGM")->required();
    detect->add_option("--key", da.key, "64-bit watermark key")->required();
    detect->add_option("--wdr", da.wdr, "watermark-to-document ratio in dB")->required();
    detect->add_option("--pf", da.pf, "false-alarm probability target")->required();
    detect->add_option("--dir-levels", da.dir_levels, "directional levels per scale")
        ->delimiter(',');

    LmArgs la;
    auto* lmtest = app.add_subcommand("lmtest", "heteroscedasticity tests per finest subband");
    lmtest->add_option("--in", la.in, "input PGM")->required();
    lmtest->add_option("--lags", la.lags, "lag count for the 1D scan tests");
    lmtest->add_option("--dir-levels", la.dir_levels, "directional levels per scale")
        ->delimiter(',');

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "fit the variance model on the embedding subband");
    fit->add_option("--in", fa.in, "input PGM")->required();
    fit->add_option("--dir-levels", fa.dir_levels, "directional levels per scale")
        ->delimiter(',');

    AttackArgs aa;
    auto* attack = app.add_subcommand("attack", "apply an attack spec to a PGM image");
    attack->add_option("--in", aa.in, "input PGM")->required();
    attack->add_option("--out", aa.out, "output PGM")->required();
    attack->add_option("--spec", aa.spec_path, "attack spec JSON file (object or array)")
        ->required();

    ExperimentArgs xa;
    auto* experiment = app.add_subcommand("experiment", "run a Monte-Carlo experiment config");
    experiment->add_option("--config", xa.config_path, "experiment config JSON")->required();
    experiment->add_option("--out", xa.out_dir, "output report directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        std::cerr << app.help() << std::endl;
        return 2;
    }

    try {
        if (app.got_subcommand(embed)) return cmd_embed(ea, json_out);
        if (app.got_subcommand(detect)) return cmd_detect(da);
        if (app.got_subcommand(lmtest)) return cmd_lmtest(la, json_out);
        if (app.got_subcommand(fit)) return cmd_fit(fa);
        if (app.got_subcommand(attack))
            return cmd_attack(aa, json_out, seed_opt->count() > 0, seed);
        if (app.got_subcommand(experiment))
            return cmd_experiment(xa, seed_opt->count() > 0, seed, threads_opt->count() > 0,
                                  threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: no subcommand\n";
    return 2;
}
