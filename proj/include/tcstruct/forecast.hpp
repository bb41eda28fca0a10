#pragma once

#include "tcstruct/time.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace tcs {

// One structural forecast: latent coefficients plus the reconstructed (or
// re-extracted) ORB vector, per issue time and horizon.
struct StructuralForecast {
    std::string storm_id;
    UtcTime issue_time;
    int horizon_hours = 0;
    char pathway = 'B'; // 'A', 'B', or 'P' (persistence)
    Eigen::VectorXd z_hat;
    Eigen::VectorXd x_hat;
};

// CSV: storm_id, issue_time, horizon, pathway, z0..z{k-1}, x0..x{d-1}.
void save_forecasts_csv(const std::vector<StructuralForecast>& forecasts,
                        const std::filesystem::path& path);
std::vector<StructuralForecast> load_forecasts_csv(const std::filesystem::path& path);

} // namespace tcs
