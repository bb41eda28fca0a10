#include "tcstruct/config.hpp"

#include "tcstruct/error.hpp"
#include "tcstruct/io.hpp"
#include "tcstruct/rng.hpp"

#include <json.hpp>

namespace tcs {

using nlohmann::json;

namespace {

json to_json(const RunConfig& c) {
    json doc;
    doc["input"]["kind"] = c.synthetic_input ? "synthetic" : "paths";
    doc["input"]["library_dir"] = c.library_dir.string();
    doc["input"]["synthetic"]["n_storms"] = c.synth_n_storms;
    doc["input"]["synthetic"]["steps"] = c.synth_steps;
    doc["input"]["synthetic"]["start_year"] = c.synth_start_year;
    doc["cadence_hours"] = c.cadence_hours;
    doc["tolerance_minutes"] = c.tolerance_minutes;
    doc["grid"]["half_width_km"] = c.grid.half_width_km;
    doc["grid"]["step_km"] = c.grid.step_km;
    doc["orb"]["r_max_km"] = c.orb.r_max_km;
    doc["orb"]["r_step_km"] = c.orb.r_step_km;
    doc["orb"]["c_min_k"] = c.orb.c_min_k;
    doc["orb"]["c_max_k"] = c.orb.c_max_k;
    doc["orb"]["c_step_k"] = c.orb.c_step_k;
    doc["orb"]["asym_wavenumbers"] = c.orb.asym_wavenumbers;
    doc["orb"]["max_missing_fraction"] = c.orb.max_missing_fraction;
    doc["pca"]["rule"] = c.pca_rule;
    doc["pca"]["fraction"] = c.pca_fraction;
    doc["pca"]["k"] = c.pca_k;
    doc["var"]["order"] = c.var_order;
    doc["var"]["lambda_grid"] = c.var_lambda_grid;
    doc["image_dynamics"]["enabled"] = c.pathway_a_enabled;
    doc["image_dynamics"]["latent_rank"] = c.image_latent_rank;
    doc["image_dynamics"]["order"] = c.image_var_order;
    doc["image_dynamics"]["lambda"] = c.image_var_lambda;
    doc["gam"]["knots_per_feature"] = c.gam_knots;
    doc["gam"]["penalty"] = c.gam_penalty;
    doc["lasso"]["lambda_grid"] = c.lasso_lambda_grid;
    doc["ri"]["window_hours"] = c.ri_window_hours;
    doc["ri"]["threshold_kt"] = c.ri_threshold_kt;
    doc["ri"]["increase_only"] = c.ri_increase_only;
    doc["horizons_hours"] = c.horizons_hours;
    doc["split"]["train"] = c.train_fraction;
    doc["split"]["validation"] = c.validation_fraction;
    doc["cluster"]["k_clusters"] = c.cluster_k;
    doc["cluster"]["window_len"] = c.window_len;
    doc["cluster"]["stride"] = c.window_stride;
    doc["analogs"]["top_m"] = c.analog_top_m;
    doc["plots"] = c.plots;
    doc["seed"] = c.seed;
    return doc;
}

} // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError("bad run config " + path.string() + ": " + e.what());
    }
    RunConfig c;
    try {
        if (doc.contains("input")) {
            const json& in = doc["input"];
            c.synthetic_input = in.value("kind", std::string("synthetic")) == "synthetic";
            c.library_dir = in.value("library_dir", std::string());
            if (in.contains("synthetic")) {
                const json& s = in["synthetic"];
                c.synth_n_storms = s.value("n_storms", c.synth_n_storms);
                c.synth_steps = s.value("steps", c.synth_steps);
                c.synth_start_year = s.value("start_year", c.synth_start_year);
            }
        }
        c.cadence_hours = doc.value("cadence_hours", c.cadence_hours);
        c.tolerance_minutes = doc.value("tolerance_minutes", c.tolerance_minutes);
        if (doc.contains("grid")) {
            c.grid.half_width_km = doc["grid"].value("half_width_km", c.grid.half_width_km);
            c.grid.step_km = doc["grid"].value("step_km", c.grid.step_km);
        }
        if (doc.contains("orb")) {
            const json& o = doc["orb"];
            c.orb.r_max_km = o.value("r_max_km", c.orb.r_max_km);
            c.orb.r_step_km = o.value("r_step_km", c.orb.r_step_km);
            c.orb.c_min_k = o.value("c_min_k", c.orb.c_min_k);
            c.orb.c_max_k = o.value("c_max_k", c.orb.c_max_k);
            c.orb.c_step_k = o.value("c_step_k", c.orb.c_step_k);
            c.orb.asym_wavenumbers = o.value("asym_wavenumbers", c.orb.asym_wavenumbers);
            c.orb.max_missing_fraction = o.value("max_missing_fraction", c.orb.max_missing_fraction);
        }
        if (doc.contains("pca")) {
            c.pca_rule = doc["pca"].value("rule", c.pca_rule);
            c.pca_fraction = doc["pca"].value("fraction", c.pca_fraction);
            c.pca_k = doc["pca"].value("k", c.pca_k);
        }
        if (doc.contains("var")) {
            c.var_order = doc["var"].value("order", c.var_order);
            c.var_lambda_grid = doc["var"].value("lambda_grid", c.var_lambda_grid);
        }
        if (doc.contains("image_dynamics")) {
            const json& i = doc["image_dynamics"];
            c.pathway_a_enabled = i.value("enabled", c.pathway_a_enabled);
            c.image_latent_rank = i.value("latent_rank", c.image_latent_rank);
            c.image_var_order = i.value("order", c.image_var_order);
            c.image_var_lambda = i.value("lambda", c.image_var_lambda);
        }
        if (doc.contains("gam")) {
            c.gam_knots = doc["gam"].value("knots_per_feature", c.gam_knots);
            c.gam_penalty = doc["gam"].value("penalty", c.gam_penalty);
        }
        if (doc.contains("lasso"))
            c.lasso_lambda_grid = doc["lasso"].value("lambda_grid", c.lasso_lambda_grid);
        if (doc.contains("ri")) {
            c.ri_window_hours = doc["ri"].value("window_hours", c.ri_window_hours);
            c.ri_threshold_kt = doc["ri"].value("threshold_kt", c.ri_threshold_kt);
            c.ri_increase_only = doc["ri"].value("increase_only", c.ri_increase_only);
        }
        c.horizons_hours = doc.value("horizons_hours", c.horizons_hours);
        if (doc.contains("split")) {
            c.train_fraction = doc["split"].value("train", c.train_fraction);
            c.validation_fraction = doc["split"].value("validation", c.validation_fraction);
        }
        if (doc.contains("cluster")) {
            c.cluster_k = doc["cluster"].value("k_clusters", c.cluster_k);
            c.window_len = doc["cluster"].value("window_len", c.window_len);
            c.window_stride = doc["cluster"].value("stride", c.window_stride);
        }
        if (doc.contains("analogs")) c.analog_top_m = doc["analogs"].value("top_m", c.analog_top_m);
        c.plots = doc.value("plots", c.plots);
        c.seed = doc.value("seed", c.seed);
    } catch (const json::exception& e) {
        throw ParseError("bad run config " + path.string() + ": " + e.what());
    }

    if (c.train_fraction < 0 || c.validation_fraction < 0 ||
        c.train_fraction + c.validation_fraction > 1.0)
        throw DataError("split fractions must be non-negative and sum to at most 1");
    const std::int64_t cadence = static_cast<std::int64_t>(c.cadence_hours * 3600.0);
    for (int h : c.horizons_hours)
        if (h <= 0 || (static_cast<std::int64_t>(h) * 3600) % cadence != 0)
            throw DataError("horizons must be positive multiples of the cadence");
    return c;
}

std::string run_config_to_json(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

std::uint64_t run_config_hash(const RunConfig& config) {
    const std::string s = to_json(config).dump();
    return fnv1a(s.data(), s.size());
}

} // namespace tcs
