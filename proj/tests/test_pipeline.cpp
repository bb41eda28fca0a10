#include "tcstruct/config.hpp"
#include "tcstruct/error.hpp"
#include "tcstruct/image_dynamics.hpp"
#include "tcstruct/io.hpp"
#include "tcstruct/metrics.hpp"
#include "tcstruct/orb.hpp"
#include "tcstruct/pca.hpp"
#include "tcstruct/pipeline.hpp"
#include "tcstruct/synth.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace tcs;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const char* tag) {
        path = fs::temp_directory_path() / (std::string("tcs_pipe_") + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

RunConfig small_config() {
    RunConfig config;
    config.synthetic_input = true;
    config.synth_n_storms = 8;
    config.synth_steps = 14;
    config.grid = GridGeom{120.0, 4.0};
    config.orb.r_max_km = 120.0;
    config.var_order = 2;
    config.var_lambda_grid = {0.01, 0.1};
    config.image_latent_rank = 24;
    config.image_var_order = 2;
    config.horizons_hours = {6, 24};
    config.cluster_k = 2;
    config.analog_top_m = 3;
    config.seed = 7;
    return config;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> csv_lines(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

} // namespace

TEST_CASE("full pipeline on a small synthetic library") {
    TempDir dir("run");
    const RunConfig config = small_config();
    run_pipeline(config, dir.path);

    SUBCASE("reports and sentinel exist") {
        for (const char* f :
             {"reports/metrics_intensity.csv", "reports/metrics_structural.csv",
              "reports/predictions.csv", "reports/clusters.csv", "reports/analogs.csv",
              "run_manifest.json", "DONE", "orb.csv", "orb_layout.json"})
            CHECK(fs::exists(dir.path / f));
        CHECK(fs::exists(dir.path / "plots"));
    }
    SUBCASE("metrics cover both horizons and both models") {
        const auto lines = csv_lines(dir.path / "reports" / "metrics_intensity.csv");
        REQUIRE(lines.size() >= 3);
        CHECK(lines[0] == "horizon_hours,model,n,rmse_kt,bias_forecast_minus_truth_kt");
        int h6 = 0, h24 = 0;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            if (lines[i].rfind("6,", 0) == 0) ++h6;
            if (lines[i].rfind("24,", 0) == 0) ++h24;
        }
        CHECK(h6 == 2);  // gam + persistence
        CHECK(h24 == 2);
    }
    SUBCASE("structural metrics carry all three pairs") {
        const std::string text = slurp(dir.path / "reports" / "metrics_structural.csv");
        CHECK(text.find("A_vs_B") != std::string::npos);
        CHECK(text.find("A_vs_truth") != std::string::npos);
        CHECK(text.find("B_vs_truth") != std::string::npos);
    }
    SUBCASE("re-running a stage from persisted intermediates is byte-identical") {
        const std::string metrics_before = slurp(dir.path / "reports" / "metrics_intensity.csv");
        const std::string preds_before = slurp(dir.path / "reports" / "predictions.csv");
        const std::string structural_before =
            slurp(dir.path / "reports" / "metrics_structural.csv");
        stage_evaluate(config, dir.path);
        CHECK(slurp(dir.path / "reports" / "metrics_intensity.csv") == metrics_before);
        CHECK(slurp(dir.path / "reports" / "predictions.csv") == preds_before);
        CHECK(slurp(dir.path / "reports" / "metrics_structural.csv") == structural_before);

        const std::string orb_before = slurp(dir.path / "orb.csv");
        stage_extract(config, dir.path);
        CHECK(slurp(dir.path / "orb.csv") == orb_before);
    }
    SUBCASE("clusters and analogs reference only the expected splits") {
        const auto clusters = csv_lines(dir.path / "reports" / "clusters.csv");
        REQUIRE(clusters.size() > 1);
        for (std::size_t i = 1; i < clusters.size(); ++i) {
            const std::string storm = clusters[i].substr(0, clusters[i].find(','));
            CHECK(split_of(storm, config.train_fraction, config.validation_fraction) ==
                  Split::Train);
        }
        const auto analogs = csv_lines(dir.path / "reports" / "analogs.csv");
        for (std::size_t i = 1; i < analogs.size(); ++i) {
            const std::string query = analogs[i].substr(0, analogs[i].find(','));
            CHECK(split_of(query, config.train_fraction, config.validation_fraction) ==
                  Split::Test);
        }
    }
}

TEST_CASE("horizons {6} only: reports contain only the 6-h rows") {
    TempDir dir("h6");
    RunConfig config = small_config();
    config.horizons_hours = {6};
    config.pathway_a_enabled = false; // keep this variant lean
    run_pipeline(config, dir.path);
    const auto lines = csv_lines(dir.path / "reports" / "metrics_intensity.csv");
    REQUIRE(lines.size() > 1);
    for (std::size_t i = 1; i < lines.size(); ++i) CHECK(lines[i].rfind("6,", 0) == 0);
    // The RI window (24 h) has no forecasts in this configuration, so the
    // lasso stage records a skip instead of a model.
    CHECK_FALSE(fs::exists(dir.path / "models" / "lasso.json"));
    CHECK(fs::exists(dir.path / "notes" / "fit_lasso.json"));
}

TEST_CASE("nonexistent input aborts in the ingest stage with a stage-named error") {
    TempDir dir("badinput");
    RunConfig config = small_config();
    config.synthetic_input = false;
    config.library_dir = dir.path / "does_not_exist";
    CHECK_THROWS_WITH_AS(run_pipeline(config, dir.path), doctest::Contains("ingest"), Error);
    CHECK_FALSE(fs::exists(dir.path / "DONE"));
}

TEST_CASE("horizon-0 agreement: pathways and persistence coincide within truncation error") {
    // Both pathways collapsed to horizon 0 reproduce the observed structural
    // state up to their own PCA truncation errors, measured on training data.
    StormSimConfig sim;
    sim.steps = 24;
    sim.depth_noise_sd = 2.0;
    sim.intensity_noise_sd = 1.0;
    const GridGeom geom{120.0, 4.0};
    OrbConfig orb_cfg;
    orb_cfg.r_max_km = 120.0;
    const auto steps = simulate_storm(sim, geom, 19);

    std::vector<CenteredImage> images;
    for (const SimStep& s : steps) images.push_back(s.image);
    Eigen::MatrixXd X(steps.size(), orb_layout(orb_cfg).d);
    for (std::size_t t = 0; t < steps.size(); ++t)
        X.row(t) = assemble_orb_vector(images[t], orb_cfg).values;

    const PcBasis basis = fit_pca(X, RankRule::variance(0.95));
    const ImageDynamicsModel imagedyn = fit_image_dynamics({images}, 12, 1, 1e-6);

    // Truncation errors on training data.
    double orb_trunc = 0.0, image_trunc = 0.0;
    for (std::size_t t = 0; t < steps.size(); ++t) {
        const Eigen::VectorXd x = X.row(t);
        const Eigen::VectorXd b_rec = pca_reconstruct(basis, pca_project(basis, x));
        orb_trunc = std::max(orb_trunc, standardized_l2(x, b_rec, basis));

        const Eigen::VectorXd pix = pca_reconstruct(
            imagedyn.image_basis, pca_project(imagedyn.image_basis, flatten_image(images[t])));
        CenteredImage rec = images[t];
        for (std::size_t p = 0; p < rec.temps.size(); ++p)
            rec.temps[p] = std::clamp(static_cast<float>(pix[p]), kMinTempK, kMaxTempK);
        const Eigen::VectorXd a_hat = assemble_orb_vector(rec, orb_cfg).values;
        image_trunc = std::max(image_trunc, standardized_l2(x, a_hat, basis));
    }

    for (std::size_t t : {std::size_t(5), std::size_t(15), std::size_t(23)}) {
        const Eigen::VectorXd x_obs = X.row(t);
        // Persistence at horizon 0 is the observation itself.
        CHECK(standardized_l2(x_obs, x_obs, basis) == 0.0);
        // Pathway B at horizon 0: reconstruct current coefficients.
        const Eigen::VectorXd b0 = pca_reconstruct(basis, pca_project(basis, x_obs));
        CHECK(standardized_l2(x_obs, b0, basis) <= orb_trunc + 1e-12);
        // Pathway A at horizon 0: ORB of the reconstructed current frame.
        const Eigen::VectorXd pix = pca_reconstruct(
            imagedyn.image_basis, pca_project(imagedyn.image_basis, flatten_image(images[t])));
        CenteredImage rec = images[t];
        for (std::size_t p = 0; p < rec.temps.size(); ++p)
            rec.temps[p] = std::clamp(static_cast<float>(pix[p]), kMinTempK, kMaxTempK);
        const Eigen::VectorXd a0 = assemble_orb_vector(rec, orb_cfg).values;
        CHECK(standardized_l2(x_obs, a0, basis) <= image_trunc + 1e-12);
    }
}
