#include <filesystem>
#include <fstream>
#include <set>

#include "ctmark/experiment.hpp"
#include "ctmark/pgm.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support/synth_images.hpp"

using namespace ctmark;

namespace {

std::filesystem::path temp_dir(const std::string& leaf) {
    auto p = std::filesystem::temp_directory_path() / "ctmark_exp_tests" / leaf;
    std::filesystem::create_directories(p);
    return p;
}

std::string write_image(const std::string& name, int side, const std::string& leaf) {
    auto dir = temp_dir(leaf);
    auto path = dir / (name + ".pgm");
    save_pgm(path.string(), testsupport::synth_image(name, side));
    return path.string();
}

}  // namespace

TEST_CASE("trial keys are deterministic, distinct, and seed-sensitive") {
    auto k1 = draw_trial_keys(42, 50);
    auto k2 = draw_trial_keys(42, 50);
    auto k3 = draw_trial_keys(43, 50);
    REQUIRE(k1.size() == 50);
    CHECK(k1 == k2);
    CHECK(k1 != k3);
    CHECK(std::set<uint64_t>(k1.begin(), k1.end()).size() == 50);
}

TEST_CASE("experiment config round trips through JSON with defaults") {
    ExperimentConfig cfg = experiment_config_from_json_string(
        R"({"corpus": ["a.pgm", "b.pgm"]})");
    CHECK(cfg.corpus.size() == 2);
    CHECK(cfg.wdr_db_list == std::vector<double>{-50.0});
    CHECK(cfg.detectors ==
          std::vector<std::string>{"ct-garch", "ct-gg", "wt-garch"});
    CHECK(cfg.n_keys == 200);
    CHECK(cfg.master_seed == 42);
    CHECK(cfg.dir_levels == std::vector<int>{2, 3});

    ExperimentConfig full;
    full.corpus = {"x.pgm"};
    full.wdr_db_list = {-45.0, -50.0};
    full.detectors = {"ct-garch"};
    AttackSpec a;
    a.kind = "median";
    a.window = 5;
    full.attacks = {a};
    full.n_keys = 7;
    full.master_seed = 1234;
    full.dir_levels = {2, 2};
    ExperimentConfig back =
        experiment_config_from_json_string(experiment_config_to_json_string(full));
    CHECK(back.corpus == full.corpus);
    CHECK(back.wdr_db_list == full.wdr_db_list);
    CHECK(back.detectors == full.detectors);
    REQUIRE(back.attacks.size() == 1);
    CHECK(attack_label(back.attacks[0]) == "median-5");
    CHECK(back.n_keys == 7);
    CHECK(back.master_seed == 1234);
    CHECK(back.dir_levels == full.dir_levels);

    CHECK_THROWS(experiment_config_from_json_string("no json at all"));
}

TEST_CASE("small no-attack experiment: cell layout, scores, diagnostics skip") {
    std::string img = write_image("harbor", 128, "small");
    ExperimentConfig cfg;
    cfg.corpus = {img};
    cfg.wdr_db_list = {-30.0};
    cfg.detectors = {"ct-garch", "ct-gg", "wt-garch"};
    cfg.n_keys = 2;
    cfg.master_seed = 42;

    ExperimentReport rep = run_experiment(cfg);
    REQUIRE(rep.cells.size() == 3);
    for (const auto& c : rep.cells) {
        CHECK(c.image == "harbor");
        CHECK(c.attack == "none");
        CHECK(c.wdr_db == -30.0);
        CHECK_FALSE(c.failed);
        CHECK(c.scores_h0.size() == 2);
        CHECK(c.scores_h1.size() == 2);
        // two keys quantize the area to quarters
        double q = c.auroc * 4.0;
        CHECK(q == doctest::Approx(std::round(q)).epsilon(1e-12));
        CHECK(c.ksd_h0 == -1.0);  // far below the KS sample minimum
        CHECK(c.ksd_h1 == -1.0);
        CHECK(c.seconds > 0.0);
        REQUIRE(!c.roc.points.empty());
        CHECK(c.roc.points.front().first == 0.0);
        CHECK(c.roc.points.back().first == 1.0);
    }
    CHECK(rep.cells[0].detector == "ct-garch");
    CHECK(rep.cells[1].detector == "ct-gg");
    CHECK(rep.cells[2].detector == "wt-garch");
    // -30 dB on a 128x128 host is an easy catch for the main detector
    CHECK(rep.cells[0].auroc == 1.0);

    // the protocol is fully seeded: a rerun reproduces every score
    ExperimentReport rep2 = run_experiment(cfg);
    for (size_t i = 0; i < rep.cells.size(); ++i) {
        CHECK(rep.cells[i].scores_h0 == rep2.cells[i].scores_h0);
        CHECK(rep.cells[i].scores_h1 == rep2.cells[i].scores_h1);
    }
}

TEST_CASE("a cell whose transform cannot run is recorded, not fatal") {
    // 100 is not divisible by 2^3, so the directional split of the finest
    // scale fails; the wavelet baseline (needs only /4) still succeeds
    std::string img = write_image("meadow", 100, "oddsize");
    ExperimentConfig cfg;
    cfg.corpus = {img};
    cfg.wdr_db_list = {-30.0};
    cfg.detectors = {"ct-garch", "wt-garch"};
    cfg.n_keys = 2;

    ExperimentReport rep = run_experiment(cfg);
    REQUIRE(rep.cells.size() == 2);
    CHECK(rep.cells[0].detector == "ct-garch");
    CHECK(rep.cells[0].failed);
    CHECK_FALSE(rep.cells[0].reason.empty());
    CHECK(rep.cells[1].detector == "wt-garch");
    CHECK_FALSE(rep.cells[1].failed);

    // a missing image file, by contrast, is a configuration error
    ExperimentConfig missing;
    missing.corpus = {"/nonexistent/nowhere.pgm"};
    missing.n_keys = 2;
    CHECK_THROWS(run_experiment(missing));
}

TEST_CASE("summary CSV and report files") {
    std::string img = write_image("citywall", 128, "report");
    ExperimentConfig cfg;
    cfg.corpus = {img};
    cfg.wdr_db_list = {-30.0};
    cfg.detectors = {"ct-garch"};
    cfg.n_keys = 2;
    ExperimentReport rep = run_experiment(cfg);

    std::string csv = experiment_summary_csv(rep);
    CHECK(csv.find("image,detector,attack,wdr_db,auroc,ksd_h0,ksd_h1,kurt_h0,kurt_h1,n_keys") ==
          0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one cell
    CHECK(csv.find("citywall,ct-garch,none,-30") != std::string::npos);

    nlohmann::json j = nlohmann::json::parse(experiment_report_to_json_string(rep));
    CHECK(j.at("config").at("n_keys").get<int>() == 2);
    REQUIRE(j.at("cells").size() == 1);
    CHECK(j.at("cells")[0].at("image").get<std::string>() == "citywall");
    CHECK_FALSE(j.at("cells")[0].at("failed").get<bool>());

    auto outdir = temp_dir("written");
    write_report(rep, outdir.string());
    CHECK(std::filesystem::exists(outdir / "report.json"));
    CHECK(std::filesystem::exists(outdir / "summary.csv"));
    std::ifstream in(outdir / "report.json");
    nlohmann::json jf = nlohmann::json::parse(in);
    CHECK(jf.at("cells").size() == 1);
}
