#include "tcstruct/metrics.hpp"

#include "tcstruct/error.hpp"
#include "tcstruct/io.hpp"
#include "tcstruct/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tcs {

MetricsReport intensity_metrics(const std::vector<IntensityPrediction>& predictions,
                                const std::vector<IntensityTruth>& truths) {
    std::map<std::tuple<std::string, std::int64_t, int>, double> truth_by_key;
    for (const IntensityTruth& t : truths)
        truth_by_key[{t.storm_id, t.issue_time.secs, t.horizon_hours}] = t.v_true;

    struct Accum {
        long n = 0;
        double sq = 0.0;
        double sum = 0.0;
    };
    std::map<std::pair<int, std::string>, Accum> groups;
    MetricsReport report;
    for (const IntensityPrediction& p : predictions) {
        const auto it = truth_by_key.find({p.storm_id, p.issue_time.secs, p.horizon_hours});
        if (it == truth_by_key.end()) {
            ++report.unmatched_predictions;
            continue;
        }
        Accum& acc = groups[{p.horizon_hours, p.model}];
        const double err = p.v_hat - it->second;
        ++acc.n;
        acc.sq += err * err;
        acc.sum += err;
    }

    for (const auto& [key, acc] : groups) {
        MetricsRow row;
        row.horizon_hours = key.first;
        row.model = key.second;
        row.n = acc.n;
        if (acc.n > 0) {
            row.rmse_kt = std::sqrt(acc.sq / static_cast<double>(acc.n));
            row.bias_kt = acc.sum / static_cast<double>(acc.n);
        } else {
            row.rmse_kt = row.bias_kt = std::numeric_limits<double>::quiet_NaN();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

double standardized_l2(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const PcBasis& basis) {
    if (a.size() != b.size() || a.size() != basis.mean.size())
        throw DataError("standardized_l2: layout mismatch");
    const Eigen::VectorXd diff = (a - b).cwiseQuotient(basis.scale);
    return diff.norm() / std::sqrt(static_cast<double>(a.size()));
}

std::vector<StructuralRow> structural_metrics(
    const std::vector<StructuralForecast>& pathway_a,
    const std::vector<StructuralForecast>& pathway_b,
    const std::map<std::pair<std::string, std::int64_t>, Eigen::VectorXd>& truth_by_time,
    const PcBasis& basis) {
    std::map<std::tuple<std::string, std::int64_t, int>, const StructuralForecast*> b_by_key;
    for (const StructuralForecast& f : pathway_b)
        b_by_key[{f.storm_id, f.issue_time.secs, f.horizon_hours}] = &f;

    struct Accum {
        long n = 0;
        double sum = 0.0;
    };
    std::map<std::pair<int, std::string>, Accum> groups;
    auto add = [&](int horizon, const std::string& pair, double dist) {
        Accum& acc = groups[{horizon, pair}];
        ++acc.n;
        acc.sum += dist;
    };

    auto truth_at = [&](const StructuralForecast& f) -> const Eigen::VectorXd* {
        const std::int64_t valid =
            f.issue_time.secs + static_cast<std::int64_t>(f.horizon_hours) * kSecondsPerHour;
        const auto it = truth_by_time.find({f.storm_id, valid});
        return it == truth_by_time.end() ? nullptr : &it->second;
    };

    for (const StructuralForecast& fa : pathway_a) {
        const auto fb = b_by_key.find({fa.storm_id, fa.issue_time.secs, fa.horizon_hours});
        if (fb != b_by_key.end())
            add(fa.horizon_hours, "A_vs_B",
                standardized_l2(fa.x_hat, fb->second->x_hat, basis));
        if (const Eigen::VectorXd* x = truth_at(fa))
            add(fa.horizon_hours, "A_vs_truth", standardized_l2(fa.x_hat, *x, basis));
    }
    for (const StructuralForecast& fb : pathway_b)
        if (const Eigen::VectorXd* x = truth_at(fb))
            add(fb.horizon_hours, "B_vs_truth", standardized_l2(fb.x_hat, *x, basis));

    std::vector<StructuralRow> rows;
    for (const auto& [key, acc] : groups) {
        StructuralRow row;
        row.horizon_hours = key.first;
        row.pair = key.second;
        row.n = acc.n;
        row.mean_l2 = acc.n > 0 ? acc.sum / static_cast<double>(acc.n)
                                : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(std::move(row));
    }
    return rows;
}

Split split_of(const std::string& storm_id, double train_fraction, double validation_fraction) {
    // FNV-1a disperses similar short ids poorly in the high bits; run the
    // result through the integer finalizer before mapping to [0, 1).
    const double u = static_cast<double>(hash_u64(fnv1a(storm_id.data(), storm_id.size()), 0)) /
                     18446744073709551616.0; // 2^64
    if (u < train_fraction) return Split::Train;
    if (u < train_fraction + validation_fraction) return Split::Validation;
    return Split::Test;
}

void save_metrics_csv(const MetricsReport& report, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "horizon_hours,model,n,rmse_kt,bias_forecast_minus_truth_kt\n";
    for (const MetricsRow& row : report.rows)
        out << row.horizon_hours << ',' << row.model << ',' << row.n << ','
            << format_double(row.rmse_kt) << ',' << format_double(row.bias_kt) << "\n";
    write_file_atomic(path, out.str());
}

void save_structural_csv(const std::vector<StructuralRow>& rows,
                         const std::filesystem::path& path) {
    std::ostringstream out;
    out << "horizon_hours,pair,n,mean_standardized_l2\n";
    for (const StructuralRow& row : rows)
        out << row.horizon_hours << ',' << row.pair << ',' << row.n << ','
            << format_double(row.mean_l2) << "\n";
    write_file_atomic(path, out.str());
}

} // namespace tcs
