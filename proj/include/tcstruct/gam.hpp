#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace tcs {

// Piecewise-linear smoother: coeffs[l] is the fitted value at knots[l];
// evaluation interpolates between knots and extrapolates the end segments.
// A degenerate (constant) feature leaves an empty smoother pinned at zero.
struct GamSmoother {
    Eigen::VectorXd knots;  // strictly increasing
    Eigen::VectorXd coeffs; // same length

    bool degenerate() const { return knots.size() < 2; }
    double eval(double x) const;
};

struct GamModel {
    double intercept = 0.0;
    std::vector<GamSmoother> smoothers; // one per feature, input order
    double penalty = 0.0;
    int cycles = 0;
    Eigen::VectorXd fitted;                // training fitted values
    std::vector<double> objective_history; // penalized RSS per cycle
    std::vector<std::string> notes;        // degenerate-feature warnings

    double predict_change(const Eigen::VectorXd& features) const;
};

// Backfitting with per-feature penalized least squares on a piecewise-linear
// basis at feature quantile knots and a second-difference penalty. Each
// smoother is mean-centered into the intercept after its update. Stops when
// the largest fitted-value change in a cycle drops below 1e-8, or after 100
// cycles. Requires at least 20 rows.
GamModel fit_gam(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int knots_per_feature = 10,
                 double penalty = 1.0);

// features[0] must be v_now; the model predicts the intensity change, so
//   V_hat = v_now + intercept + sum_j smoother_j(features[j]),
// clamped to the physical [0, 250] kt range.
double predict_intensity(const GamModel& model, const Eigen::VectorXd& features);

void save_gam_model(const GamModel& model, const std::filesystem::path& path);
GamModel load_gam_model(const std::filesystem::path& path);

} // namespace tcs
