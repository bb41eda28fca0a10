#include "tcstruct/config.hpp"
#include "tcstruct/error.hpp"
#include "tcstruct/io.hpp"
#include "tcstruct/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

tcs::RunConfig make_config(const std::string& config_path, std::uint64_t seed, bool seed_set) {
    tcs::RunConfig config;
    if (!config_path.empty()) config = tcs::load_run_config(config_path);
    if (seed_set) config.seed = seed;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tropical-cyclone structural forecasting pipeline"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string config_path;
    std::string out_dir = "tcstruct_out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 1;
    app.add_option("--config", config_path, "Run configuration JSON")->envname("TCSTRUCT_CONFIG");
    app.add_option("--out", out_dir, "Output directory");
    auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
    app.add_option("--jobs", jobs, "Worker threads (stages are deterministic regardless)");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic storm library");
    auto* ingest = app.add_subcommand("ingest", "Parse tracks, read stacks, build samples");
    auto* extract = app.add_subcommand("extract", "Extract ORB vectors from samples");
    auto* fit = app.add_subcommand("fit", "Fit a model stage");
    std::string what;
    fit->add_option("--what", what, "pca|var|imagedyn|gam|lasso")
        ->required()
        ->check(CLI::IsMember({"pca", "var", "imagedyn", "gam", "lasso"}));
    auto* forecast = app.add_subcommand("forecast", "Issue structural forecasts");
    std::string pathway = "b";
    std::string horizons_arg;
    forecast->add_option("--pathway", pathway, "a|b|persistence")
        ->check(CLI::IsMember({"a", "b", "p", "persistence"}));
    forecast->add_option("--horizons", horizons_arg, "Comma-separated hours (default from config)");
    auto* evaluate = app.add_subcommand("evaluate", "Intensity and structural metrics");
    auto* cluster = app.add_subcommand("cluster", "Spectral clustering of trajectory windows");
    auto* analogs = app.add_subcommand("analogs", "Analog retrieval for test storms");
    auto* run = app.add_subcommand("run", "Full pipeline");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage errors exit 1
    }
    seed_set = seed_opt->count() > 0;

    try {
        const tcs::RunConfig config = make_config(config_path, seed, seed_set);
        (void)jobs;
        if (synth->parsed()) {
            tcs::stage_synth(config, out_dir);
        } else if (ingest->parsed()) {
            tcs::stage_ingest(config, out_dir);
        } else if (extract->parsed()) {
            tcs::stage_extract(config, out_dir);
        } else if (fit->parsed()) {
            tcs::stage_fit(config, out_dir, what);
        } else if (forecast->parsed()) {
            std::vector<int> horizons = config.horizons_hours;
            if (!horizons_arg.empty()) {
                horizons.clear();
                std::stringstream ss(horizons_arg);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    horizons.push_back(static_cast<int>(tcs::parse_long(tok, "--horizons")));
            }
            char p = 'b';
            if (pathway == "a") p = 'a';
            else if (pathway == "b") p = 'b';
            else if (pathway == "persistence" || pathway == "p") p = 'p';
            else throw tcs::DataError("unknown pathway '" + pathway + "'");
            tcs::stage_forecast(config, out_dir, p, horizons);
        } else if (evaluate->parsed()) {
            tcs::stage_evaluate(config, out_dir);
        } else if (cluster->parsed()) {
            tcs::stage_cluster(config, out_dir);
        } else if (analogs->parsed()) {
            tcs::stage_analogs(config, out_dir);
        } else if (run->parsed()) {
            tcs::run_pipeline(config, out_dir);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
