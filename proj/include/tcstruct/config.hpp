#pragma once

#include "tcstruct/image.hpp"
#include "tcstruct/orb.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tcs {

// Everything a pipeline run needs, loadable from one JSON document.
// Defaults reproduce the bundled default-synth configuration.
struct RunConfig {
    // input
    bool synthetic_input = true;        // generate the library before ingest
    std::filesystem::path library_dir;  // existing library when not synthetic
    int synth_n_storms = 24;
    int synth_steps = 30;
    int synth_start_year = 2020;

    double cadence_hours = 6.0;
    double tolerance_minutes = 90.0;
    GridGeom grid{200.0, 4.0};
    OrbConfig orb = default_orb();

    // latent
    std::string pca_rule = "variance"; // or "fixed"
    double pca_fraction = 0.95;
    int pca_k = 8;

    // structural dynamics
    int var_order = 4;
    std::vector<double> var_lambda_grid = {0.01, 0.1, 1.0, 10.0};
    bool pathway_a_enabled = true;
    int image_latent_rank = 64;
    int image_var_order = 2;
    double image_var_lambda = 0.1;

    // intensity
    int gam_knots = 10;
    double gam_penalty = 1.0;
    std::vector<double> lasso_lambda_grid = {0.001, 0.01, 0.1, 1.0};
    double ri_window_hours = 24.0;
    double ri_threshold_kt = 30.0;
    bool ri_increase_only = false;

    std::vector<int> horizons_hours = {6, 12, 24};
    double train_fraction = 0.6;
    double validation_fraction = 0.2;

    // analogs
    int cluster_k = 2;
    int window_len = 5;
    int window_stride = 1;
    int analog_top_m = 5;

    bool plots = true;
    std::uint64_t seed = 7;

    static OrbConfig default_orb() {
        OrbConfig cfg;
        cfg.r_max_km = 200.0; // matches the default synthetic grid extent
        return cfg;
    }
};

RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& config);
// FNV-1a hash of the canonical JSON form, for the run manifest.
std::uint64_t run_config_hash(const RunConfig& config);

} // namespace tcs
