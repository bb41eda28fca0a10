#pragma once

#include "tcstruct/hurdat2.hpp"
#include "tcstruct/image.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tcs {

// Parametric eye/eyewall scene: eye disk, eyewall ring with an optional
// wavenumber-1 asymmetry, uniform background, plus seeded Gaussian pixel
// noise. Rendering is a pure function of (params, geometry).
struct SceneParams {
    double eye_radius_km = 20.0;
    double eyewall_outer_radius_km = 70.0;
    double eye_temp_k = 270.0;
    double eyewall_temp_k = 215.0;
    double background_temp_k = 285.0;
    double asym_amp_k = 0.0;
    double asym_phase_rad = 0.0;
    double noise_sd_k = 0.0;
    std::uint64_t rng_seed = 0;
};

CenteredImage render_scene(const SceneParams& params, const GridGeom& geom,
                           double center_lat = 0.0, double center_lon = 0.0,
                           UtcTime valid_time = {});

// Prescribed structure -> intensity dynamics: convective depth
// D = background - eyewall_temp follows an AR(1) pulled toward the
// reference depth, and intensity integrates the depth anomaly:
//   D_{t+1} = D* (1 - rho) + rho D_t + eta_t
//   V_{t+1} = clamp(V_t + gain (D_t - D*) + eps_t, 15, 185)
struct StormSimConfig {
    int steps = 40;
    double cadence_hours = 6.0;
    double depth_ar = 0.9;          // rho
    double depth_noise_sd = 2.5;    // K
    double gain_kt_per_k = 0.8;     // gamma
    double intensity_noise_sd = 1.5; // kt
    double initial_intensity_kt = 60.0;
    double reference_depth_k = 60.0; // D*
    std::string regime = "default";
    SceneParams scene; // template; eyewall_temp_k is overwritten per step
};

struct SimStep {
    CenteredImage image;
    double vmax = 0.0;
    double depth = 0.0;
};

std::vector<SimStep> simulate_storm(const StormSimConfig& config, const GridGeom& geom,
                                    std::uint64_t seed);

// On-disk library in exactly the ingest formats (HURDAT2 text, stack
// manifests, TCIR1 frames), storms assigned round-robin to regimes.
struct LibraryConfig {
    int n_storms = 200;
    std::vector<StormSimConfig> regimes; // empty -> the documented two-regime default
    GridGeom geom{200.0, 4.0};
    int start_year = 2020;
    std::uint64_t seed = 7;
};

// The two-regime default: deep symmetric core vs shallower asymmetric core.
std::vector<StormSimConfig> default_regimes();

struct LibraryStorm {
    std::string storm_id;
    int regime_index = 0;
    std::string regime;
    std::filesystem::path manifest;
};

struct LibraryPaths {
    std::filesystem::path root;
    std::filesystem::path hurdat2;
    std::vector<LibraryStorm> storms;
};

LibraryPaths generate_library(const LibraryConfig& config,
                              const std::filesystem::path& out_dir);

// Reads the library_manifest.json written by generate_library.
LibraryPaths read_library_manifest(const std::filesystem::path& root);

} // namespace tcs
