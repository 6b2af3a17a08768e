#pragma once

#include "occurlens/explain.hpp"
#include "occurlens/ingest.hpp"
#include "occurlens/metrics.hpp"
#include "occurlens/model.hpp"
#include "occurlens/stats.hpp"
#include "occurlens/synth.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace occurlens {

// Fully-resolved run configuration. `canonical` is the normalized JSON
// document whose hash goes into the manifest.
struct RunConfig {
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    bool synthetic = true;
    Scenario scenario;   // synthetic source
    IngestPaths paths;   // csv source

    double station_filter_threshold = 0.03;
    std::string split_boundary; // ISO hour; empty = Jan 1 of the last data year
    std::vector<std::string> models = {"gbdt", "mlp", "prior"};
    int tune_budget = 0;
    int iv_bins = 10;

    ShapMode shap_mode = ShapMode::Exact;
    int shap_samples = 2048;
    std::size_t shap_max_rows = 256;
    int perm_repeats = 10;
    std::vector<double> gammas = {0.1, 0.25, 0.5};

    GbdtParams gbdt;
    MlpParams mlp;

    std::string only_station; // CLI --station restriction, empty = all

    nlohmann::ordered_json canonical;

    void validate() const; // throws DomainError
};

RunConfig parse_run_config(const nlohmann::ordered_json& j);
RunConfig load_run_config(const std::string& path);

struct ModelReport {
    std::string kind;
    bool degenerate = false; // single-class eval labels or constant scores
    double auc = 0.0;
    std::vector<RocPoint> roc;
    PrecisionCurve precision;
    std::vector<double> gammas;
    std::vector<GammaPrecision> gamma_precisions;
    nlohmann::ordered_json model_json;
    ImportanceReport shap;
    PermResult perm;
};

struct StationReport {
    std::string station_id;
    bool degenerate = false;
    std::size_t n_train = 0;
    std::size_t n_eval = 0;
    std::string split_boundary;
    CorrMatrix corr;
    std::vector<TestResult> tests;
    std::vector<IvResult> ivs;
    std::vector<ModelReport> models;
    std::vector<std::string> warnings;
};

struct ReportBundle {
    std::vector<StationReport> stations;
    nlohmann::ordered_json manifest;
};

// End-to-end: source -> stats -> train -> explain -> eval -> report, writing
// intermediates and the full report bundle under config.out_dir.
ReportBundle run_pipeline(const RunConfig& config);

// Writes every report artifact from an in-memory bundle (staging-then-rename).
void emit_report(const ReportBundle& bundle, const std::string& out_dir);

// Individual stages; each reads whatever intermediates it needs from
// config.out_dir and persists its own outputs there.
void stage_source(const RunConfig& config);  // synth or ingest
void stage_stats(const RunConfig& config);
void stage_train(const RunConfig& config);
void stage_explain(const RunConfig& config);
void stage_eval(const RunConfig& config);
void stage_report(const RunConfig& config);

} // namespace occurlens
