#pragma once

#include "tcstruct/forecast.hpp"
#include "tcstruct/hurdat2.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace tcs {

// Per-sample intensity/coefficient record: what the intensity models see
// instead of raw imagery.
struct CoeffSample {
    std::string storm_id;
    UtcTime time;
    double vmax = 0.0;
    Eigen::VectorXd z; // observed ORB coefficients
};

struct DesignKey {
    std::string storm_id;
    UtcTime issue_time;
};

// Design matrix with the fixed feature order
// [v_now, dv_past, z_obs(1..k), z_fc(1..k)]; has_target marks training rows
// (target dv is meaningless where false).
struct DesignMatrix {
    Eigen::MatrixXd X;
    Eigen::VectorXd y; // dv over the horizon, where has_target
    std::vector<bool> has_target;
    std::vector<DesignKey> keys;
    int n_coeffs = 0;
    int horizon_hours = 0;
    int skipped_no_forecast = 0;

    // Rows restricted to those with targets, for fitting.
    void training_view(Eigen::MatrixXd& Xt, Eigen::VectorXd& yt) const;
};

// One row per issue time that has v_now, z_obs, and a pathway forecast at
// the horizon. dv_past falls back to 0 at storm start. Issue times missing
// a forecast are skipped and counted.
DesignMatrix build_design(const std::vector<CoeffSample>& samples,
                          const std::vector<StructuralForecast>& forecasts, int horizon_hours,
                          int cadence_hours);

// True iff |V(t+window) - V(t)| >= threshold (or the increase alone when
// increase_only is set) with both fixes present; nullopt when either
// endpoint lacks a vmax at exactly the required time.
std::optional<bool> label_rapid_change(const StormTrack& track, UtcTime t,
                                       double window_hours = 24.0, double threshold_kt = 30.0,
                                       bool increase_only = false);

} // namespace tcs
