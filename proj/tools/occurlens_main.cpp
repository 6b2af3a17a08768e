#include "occurlens/error.hpp"
#include "occurlens/pipeline.hpp"

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

namespace {

struct CliArgs {
    std::string config_path;
    std::string station;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

occurlens::RunConfig resolve_config(const CliArgs& args) {
    auto doc = [&] {
        std::ifstream in(args.config_path, std::ios::binary);
        if (!in)
            throw occurlens::IoError("cannot open config: " + args.config_path);
        nlohmann::ordered_json j;
        in >> j;
        return j;
    }();
    if (args.seed_set)
        doc["seed"] = args.seed;
    if (!args.out_dir.empty())
        doc["out_dir"] = args.out_dir;
    occurlens::RunConfig cfg = occurlens::parse_run_config(doc);
    cfg.only_station = args.station;
    return cfg;
}

void add_common(CLI::App* sub, CliArgs& args) {
    sub->add_option("--config", args.config_path, "Run configuration (JSON)")
        ->required();
    sub->add_option("--seed", args.seed, "Override the config seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    sub->add_option("--station", args.station, "Restrict to one station id");
    sub->add_option("--out", args.out_dir, "Override the output directory");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"occurlens: factor-influence pipeline for hourly event occurrence"};
    app.require_subcommand(1);

    CliArgs args;
    CLI::App* synth = app.add_subcommand("synth", "Generate the synthetic scenario tables");
    CLI::App* ingest = app.add_subcommand("ingest", "Ingest and impute the CSV inputs");
    CLI::App* stats = app.add_subcommand("stats", "Correlations, tests, and information values");
    CLI::App* train = app.add_subcommand("train", "Train the configured models");
    CLI::App* explain = app.add_subcommand("explain", "SHAP and permutation importance");
    CLI::App* eval = app.add_subcommand("eval", "AUC, precision curves, and gamma-precision");
    CLI::App* report = app.add_subcommand("report", "Write the manifest");
    CLI::App* all = app.add_subcommand("all", "Run the full pipeline");
    for (CLI::App* sub : {synth, ingest, stats, train, explain, eval, report, all})
        add_common(sub, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        const occurlens::RunConfig cfg = resolve_config(args);
        if (synth->parsed() || ingest->parsed()) {
            if (synth->parsed() && !cfg.synthetic)
                throw occurlens::DomainError("config source is csv; use the ingest subcommand");
            if (ingest->parsed() && cfg.synthetic)
                throw occurlens::DomainError("config source is synth; use the synth subcommand");
            occurlens::stage_source(cfg);
        } else if (stats->parsed()) {
            occurlens::stage_stats(cfg);
        } else if (train->parsed()) {
            occurlens::stage_train(cfg);
        } else if (explain->parsed()) {
            occurlens::stage_explain(cfg);
        } else if (eval->parsed()) {
            occurlens::stage_eval(cfg);
        } else if (report->parsed()) {
            occurlens::stage_report(cfg);
        } else {
            occurlens::run_pipeline(cfg);
        }
    } catch (const occurlens::Error& e) {
        std::cerr << "occurlens: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "occurlens: config parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "occurlens: internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
