#pragma once

#include "tcstruct/time.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace tcs {

// A fixed-length window of coefficient states at synoptic cadence.
struct TrajWindow {
    std::string storm_id;
    UtcTime start;
    Eigen::MatrixXd coeffs; // L x k, rows in time order
};

// sqrt( sum_{t,j} (a - b)^2 / L ) over equal-shape windows, in standardized
// coefficient units.
double trajectory_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// All length-L windows with the given stride whose times are contiguous at
// the cadence (windows spanning gaps are dropped).
std::vector<TrajWindow> extract_windows(const std::string& storm_id,
                                        const std::vector<UtcTime>& times,
                                        const Eigen::MatrixXd& coeffs, int window_len,
                                        int cadence_hours, int stride = 1);

struct ClusterResult {
    std::vector<int> labels;
    Eigen::MatrixXd embedding; // n x k_clusters spectral coordinates
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

// Gaussian affinity at the median off-diagonal bandwidth (mean fallback;
// all-zero distances collapse to a single label), symmetric normalized
// Laplacian, row-normalized bottom eigenvectors, then k-means++ with 10
// restarts from the given seed. Deterministic given (input, seed).
ClusterResult spectral_cluster(const Eigen::MatrixXd& distances, int k_clusters,
                               std::uint64_t seed);

struct AnalogMatch {
    std::string storm_id;
    UtcTime window_start;
    double distance = 0.0;
};

// Top-m library windows by ascending distance; ties break on
// (storm_id, earlier start). Windows from the query's own storm are
// excluded unless exclude_same_storm is cleared.
std::vector<AnalogMatch> find_analogs(const TrajWindow& query,
                                      const std::vector<TrajWindow>& library, int m,
                                      bool exclude_same_storm = true);

} // namespace tcs
