#include "tcstruct/synth.hpp"

#include "tcstruct/error.hpp"
#include "tcstruct/io.hpp"
#include "tcstruct/rng.hpp"
#include "tcstruct/stack.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tcs {

using nlohmann::json;

namespace {

void validate_scene(const SceneParams& p, const GridGeom& geom) {
    if (!(p.eye_radius_km > 0.0) || !(p.eye_radius_km < p.eyewall_outer_radius_km) ||
        !(p.eyewall_outer_radius_km <= geom.half_width_km))
        throw DataError("scene radii must satisfy 0 < eye < eyewall_outer <= half_width");
    for (double t : {p.eye_temp_k, p.eyewall_temp_k, p.background_temp_k})
        if (t < kMinTempK || t > kMaxTempK)
            throw DataError("scene temperatures must lie in [150, 340] K");
    if (p.noise_sd_k < 0.0) throw DataError("scene noise sd must be >= 0");
}

// Noise-free scene value at a local displacement from the storm center.
double scene_value(const SceneParams& p, double x_km, double y_km) {
    const double r = std::hypot(x_km, y_km);
    if (r < p.eye_radius_km) return p.eye_temp_k;
    if (r < p.eyewall_outer_radius_km)
        return p.eyewall_temp_k +
               p.asym_amp_k * std::cos(std::atan2(y_km, x_km) - p.asym_phase_rad);
    return p.background_temp_k;
}

float noisy_pixel(const SceneParams& p, double base, std::uint64_t pixel_index) {
    double v = base;
    if (p.noise_sd_k > 0.0) v += p.noise_sd_k * gaussian(p.rng_seed, pixel_index);
    return std::clamp(static_cast<float>(v), kMinTempK, kMaxTempK);
}

void validate_sim(const StormSimConfig& c) {
    if (c.steps < 2) throw DataError("simulation needs at least 2 steps");
    if (std::abs(c.depth_ar) >= 1.0) throw DataError("|depth AR coefficient| must be < 1");
    if (c.depth_noise_sd < 0.0 || c.intensity_noise_sd < 0.0)
        throw DataError("noise standard deviations must be >= 0");
}

struct DepthIntensity {
    std::vector<double> depth;
    std::vector<double> vmax;
};

// The shared recurrence behind both the centered-image simulation and the
// on-disk library. Depth noise and intensity noise draw from separate
// substreams so either can be silenced without shifting the other.
DepthIntensity simulate_depth_intensity(const StormSimConfig& c, std::uint64_t seed) {
    validate_sim(c);
    DepthIntensity out;
    out.depth.resize(c.steps);
    out.vmax.resize(c.steps);
    const std::uint64_t depth_seed = substream(seed, 1);
    const std::uint64_t intens_seed = substream(seed, 2);

    double d = c.scene.background_temp_k - c.scene.eyewall_temp_k;
    double v = c.initial_intensity_kt;
    for (int t = 0; t < c.steps; ++t) {
        out.depth[t] = d;
        out.vmax[t] = v;
        const double eta = c.depth_noise_sd * gaussian(depth_seed, static_cast<std::uint64_t>(t));
        const double eps =
            c.intensity_noise_sd * gaussian(intens_seed, static_cast<std::uint64_t>(t));
        v = std::clamp(v + c.gain_kt_per_k * (d - c.reference_depth_k) + eps, 15.0, 185.0);
        d = c.reference_depth_k * (1.0 - c.depth_ar) + c.depth_ar * d + eta;
    }
    return out;
}

} // namespace

CenteredImage render_scene(const SceneParams& params, const GridGeom& geom, double center_lat,
                           double center_lon, UtcTime valid_time) {
    validate_scene(params, geom);
    CenteredImage img = make_centered_image(geom, center_lat, center_lon, valid_time);
    std::uint64_t idx = 0;
    for (int i = 0; i < img.side; ++i) {
        const double y = img.y_km(i);
        for (int j = 0; j < img.side; ++j, ++idx)
            img.at(i, j) = noisy_pixel(params, scene_value(params, img.x_km(j), y), idx);
    }
    return img;
}

std::vector<SimStep> simulate_storm(const StormSimConfig& config, const GridGeom& geom,
                                    std::uint64_t seed) {
    validate_scene(config.scene, geom);
    const DepthIntensity sim = simulate_depth_intensity(config, seed);

    std::vector<SimStep> steps;
    steps.reserve(config.steps);
    const std::int64_t cadence = static_cast<std::int64_t>(config.cadence_hours * 3600.0);
    for (int t = 0; t < config.steps; ++t) {
        SceneParams scene = config.scene;
        scene.eyewall_temp_k =
            std::clamp(config.scene.background_temp_k - sim.depth[t], static_cast<double>(kMinTempK),
                       static_cast<double>(kMaxTempK));
        scene.rng_seed = substream(seed, 1000 + static_cast<std::uint64_t>(t));
        SimStep step;
        step.image = render_scene(scene, geom, 0.0, 0.0, UtcTime{t * cadence});
        step.vmax = sim.vmax[t];
        step.depth = sim.depth[t];
        steps.push_back(std::move(step));
    }
    return steps;
}

std::vector<StormSimConfig> default_regimes() {
    StormSimConfig deep;
    deep.regime = "deep_symmetric";
    deep.scene.eye_radius_km = 20.0;
    deep.scene.eyewall_outer_radius_km = 70.0;
    deep.scene.eye_temp_k = 270.0;
    deep.scene.eyewall_temp_k = 225.0;
    deep.scene.background_temp_k = 285.0;
    deep.scene.asym_amp_k = 0.0;
    deep.scene.noise_sd_k = 2.0;
    deep.reference_depth_k = 60.0;
    deep.depth_ar = 0.9;
    deep.depth_noise_sd = 2.5;
    deep.gain_kt_per_k = 0.8;
    deep.intensity_noise_sd = 1.5;
    deep.initial_intensity_kt = 60.0;

    StormSimConfig shallow;
    shallow.regime = "shallow_asymmetric";
    shallow.scene.eye_radius_km = 35.0;
    shallow.scene.eyewall_outer_radius_km = 110.0;
    shallow.scene.eye_temp_k = 278.0;
    shallow.scene.eyewall_temp_k = 255.0;
    shallow.scene.background_temp_k = 285.0;
    shallow.scene.asym_amp_k = 12.0;
    shallow.scene.asym_phase_rad = 0.7;
    shallow.scene.noise_sd_k = 2.0;
    shallow.reference_depth_k = 30.0;
    shallow.depth_ar = 0.85;
    shallow.depth_noise_sd = 2.0;
    shallow.gain_kt_per_k = 0.5;
    shallow.intensity_noise_sd = 1.5;
    shallow.initial_intensity_kt = 55.0;

    return {deep, shallow};
}

LibraryPaths generate_library(const LibraryConfig& config, const std::filesystem::path& out_dir) {
    if (config.n_storms < 1) throw DataError("generate_library: n_storms must be >= 1");
    const std::vector<StormSimConfig> regimes =
        config.regimes.empty() ? default_regimes() : config.regimes;
    std::filesystem::create_directories(out_dir);

    LibraryPaths paths;
    paths.root = out_dir;

    const int half_n = (config.geom.side() - 1) / 2;
    const int margin = 8;
    const int frame_side = config.geom.side() + 2 * margin;
    const double step_deg = config.geom.step_km / kKmPerDegree;

    std::vector<StormTrack> tracks;
    json manifest;
    manifest["seed"] = config.seed;
    manifest["n_storms"] = config.n_storms;
    manifest["half_width_km"] = config.geom.half_width_km;
    manifest["step_km"] = config.geom.step_km;
    manifest["storms"] = json::array();

    for (int s = 0; s < config.n_storms; ++s) {
        const StormSimConfig& regime = regimes[s % regimes.size()];
        const int regime_index = static_cast<int>(s % regimes.size());
        const std::uint64_t storm_seed = substream(config.seed, static_cast<std::uint64_t>(s));

        char id[16];
        std::snprintf(id, sizeof id, "SY%02d%04d", s % 99 + 1, config.start_year + s / 99);
        const std::string storm_id = id;

        // Start positions and drift land on the 0.1-degree HURDAT2 grid so
        // the written track reproduces the rendered centers exactly.
        const double lat0 = 10.0 + 0.1 * (s % 60);
        const double lon0 = -30.0 - 0.1 * (s % 300);
        const UtcTime start = from_civil({config.start_year + s / 99, 8, 1 + s % 18, 0, 0, 0});
        const std::int64_t cadence = static_cast<std::int64_t>(regime.cadence_hours * 3600.0);

        const DepthIntensity sim = simulate_depth_intensity(regime, storm_seed);

        StormTrack track;
        track.storm_id = storm_id;
        track.name = "SYNTH";
        std::vector<IrFrame> frames;
        frames.reserve(regime.steps);

        for (int t = 0; t < regime.steps; ++t) {
            const double lat = lat0 + 0.1 * t;
            const double lon = lon0 - 0.2 * t;
            const UtcTime when = start + t * cadence;

            TrackFix fix;
            fix.time = when;
            const double v = std::round(sim.vmax[t]);
            fix.vmax = v;
            fix.pmin = std::clamp(std::round(1013.0 - 0.7 * (v - 15.0)), 800.0, 1100.0);
            fix.status = v >= 64.0 ? "HU" : (v >= 34.0 ? "TS" : "TD");
            fix.lat = lat;
            fix.lon = lon;
            track.fixes.push_back(fix);

            SceneParams scene = regime.scene;
            scene.eyewall_temp_k = std::clamp(regime.scene.background_temp_k - sim.depth[t],
                                              static_cast<double>(kMinTempK),
                                              static_cast<double>(kMaxTempK));
            scene.rng_seed = substream(storm_seed, 2000 + static_cast<std::uint64_t>(t));

            IrFrame frame;
            frame.valid_time = when;
            frame.step_deg = step_deg;
            frame.width = frame_side;
            frame.height = frame_side;
            frame.origin_lat = lat + (half_n + margin) * step_deg;
            frame.origin_lon = lon - (half_n + margin) * step_deg;
            frame.temps.resize(static_cast<std::size_t>(frame_side) * frame_side);
            const double coslat = std::cos(lat * M_PI / 180.0);
            std::uint64_t idx = 0;
            for (int r = 0; r < frame_side; ++r) {
                const double y_km = (frame.lat_of_row(r) - lat) * kKmPerDegree;
                for (int c = 0; c < frame_side; ++c, ++idx) {
                    const double x_km = (frame.lon_of_col(c) - lon) * kKmPerDegree * coslat;
                    frame.temps[idx] = noisy_pixel(scene, scene_value(scene, x_km, y_km), idx);
                }
            }
            frames.push_back(std::move(frame));
        }

        const std::filesystem::path stack_dir = out_dir / storm_id;
        const std::filesystem::path manifest_path = write_ir_stack(stack_dir, storm_id, frames);
        tracks.push_back(std::move(track));

        json entry;
        entry["storm_id"] = storm_id;
        entry["regime_index"] = regime_index;
        entry["regime"] = regime.regime;
        entry["manifest"] = std::filesystem::relative(manifest_path, out_dir).string();
        entry["steps"] = regime.steps;
        manifest["storms"].push_back(std::move(entry));
        paths.storms.push_back({storm_id, regime_index, regime.regime, manifest_path});
    }

    paths.hurdat2 = out_dir / "hurdat2.txt";
    write_file_atomic(paths.hurdat2, format_hurdat2(tracks));
    manifest["hurdat2"] = "hurdat2.txt";
    write_file_atomic(out_dir / "library_manifest.json", manifest.dump(2) + "\n");
    return paths;
}

LibraryPaths read_library_manifest(const std::filesystem::path& root) {
    json doc;
    try {
        doc = json::parse(read_file(root / "library_manifest.json"));
    } catch (const json::exception& e) {
        throw ParseError("bad library manifest in " + root.string() + ": " + e.what());
    }
    LibraryPaths paths;
    paths.root = root;
    paths.hurdat2 = root / doc.at("hurdat2").get<std::string>();
    for (const json& entry : doc.at("storms")) {
        LibraryStorm storm;
        storm.storm_id = entry.at("storm_id").get<std::string>();
        storm.regime_index = entry.at("regime_index").get<int>();
        storm.regime = entry.at("regime").get<std::string>();
        storm.manifest = root / entry.at("manifest").get<std::string>();
        paths.storms.push_back(std::move(storm));
    }
    return paths;
}

} // namespace tcs
