#pragma once

#include "tcstruct/forecast.hpp"
#include "tcstruct/pca.hpp"
#include "tcstruct/time.hpp"

#include <map>
#include <string>
#include <vector>

namespace tcs {

struct IntensityPrediction {
    std::string storm_id;
    UtcTime issue_time;
    int horizon_hours = 0;
    std::string model; // "gam", "persistence", ...
    double v_hat = 0.0;
};

struct IntensityTruth {
    std::string storm_id;
    UtcTime issue_time;
    int horizon_hours = 0;
    double v_true = 0.0;
};

// Bias is forecast minus truth throughout.
struct MetricsRow {
    int horizon_hours = 0;
    std::string model;
    long n = 0;
    double rmse_kt = 0.0; // NaN when n == 0
    double bias_kt = 0.0; // NaN when n == 0
};

struct MetricsReport {
    std::vector<MetricsRow> rows; // sorted by (horizon, model)
    long unmatched_predictions = 0;
};

MetricsReport intensity_metrics(const std::vector<IntensityPrediction>& predictions,
                                const std::vector<IntensityTruth>& truths);

struct StructuralRow {
    int horizon_hours = 0;
    std::string pair; // "A_vs_B", "A_vs_truth", "B_vs_truth"
    long n = 0;
    double mean_l2 = 0.0; // standardized, divided by sqrt(d); NaN when n == 0
};

// Distances are Euclidean over basis-standardized coordinates divided by
// sqrt(d), averaged over issue times matched per (horizon, pair).
std::vector<StructuralRow> structural_metrics(
    const std::vector<StructuralForecast>& pathway_a,
    const std::vector<StructuralForecast>& pathway_b,
    const std::map<std::pair<std::string, std::int64_t>, Eigen::VectorXd>& truth_by_time,
    const PcBasis& basis);

double standardized_l2(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const PcBasis& basis);

// Deterministic storm-id split: FNV-1a hash of the id mapped to [0,1) and
// cut at the cumulative fractions. A storm never lands in two splits.
enum class Split { Train, Validation, Test };
Split split_of(const std::string& storm_id, double train_fraction, double validation_fraction);

void save_metrics_csv(const MetricsReport& report, const std::filesystem::path& path);
void save_structural_csv(const std::vector<StructuralRow>& rows,
                         const std::filesystem::path& path);

} // namespace tcs
