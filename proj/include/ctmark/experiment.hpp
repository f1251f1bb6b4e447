#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctmark/attacks.hpp"
#include "ctmark/detector.hpp"
#include "ctmark/grid.hpp"

namespace ctmark {

/// Monte-Carlo protocol: for every (image x wdr x attack x detector) cell,
/// n_keys H0 scores (detector on the attacked unwatermarked image with
/// each trial key) and n_keys H1 scores (embed with the key, attack,
/// detect with the same key), then ROC/AUROC and Gaussianity diagnostics.
struct ExperimentConfig {
    std::vector<std::string> corpus;
    std::vector<double> wdr_db_list = {-50.0};
    std::vector<std::string> detectors = {"ct-garch", "ct-gg", "wt-garch"};
    std::vector<AttackSpec> attacks;  // empty -> single "none" entry
    int n_keys = 200;
    std::vector<double> pf_grid;  // empty -> default_pf_grid()
    uint64_t master_seed = 42;
    std::vector<int> dir_levels = {2, 3};
    int threads = 1;
};

struct CellResult {
    std::string image;
    std::string detector;
    std::string attack;
    double wdr_db = 0.0;
    double auroc = 0.0;
    RocCurve roc;
    // -1 marks diagnostics skipped (n_keys below the KS minimum)
    double ksd_h0 = -1.0, ksd_h1 = -1.0;
    bool ks_h0_H = false, ks_h1_H = false;
    double kurt_h0 = 0.0, kurt_h1 = 0.0;
    std::vector<double> scores_h0, scores_h1;
    bool failed = false;
    std::string reason;
    double seconds = 0.0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<CellResult> cells;
};

ExperimentConfig experiment_config_from_json_string(const std::string& text);
std::string experiment_config_to_json_string(const ExperimentConfig& cfg);

/// Trial keys: n_keys draws from the keyed generator seeded with
/// master_seed; throws on the (astronomically unlikely) collision.
std::vector<uint64_t> draw_trial_keys(uint64_t master_seed, int n_keys);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// report.json + summary.csv + roc_<cell>.csv under dir (created if absent).
void write_report(const ExperimentReport& report, const std::string& dir);

std::string experiment_report_to_json_string(const ExperimentReport& report);
std::string experiment_summary_csv(const ExperimentReport& report);

}  // namespace ctmark
