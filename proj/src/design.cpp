#include "tcstruct/design.hpp"

#include "tcstruct/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace tcs {

void DesignMatrix::training_view(Eigen::MatrixXd& Xt, Eigen::VectorXd& yt) const {
    Eigen::Index n = 0;
    for (bool h : has_target)
        if (h) ++n;
    Xt.resize(n, X.cols());
    yt.resize(n);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        if (!has_target[i]) continue;
        Xt.row(r) = X.row(i);
        yt[r] = y[i];
        ++r;
    }
}

DesignMatrix build_design(const std::vector<CoeffSample>& samples,
                          const std::vector<StructuralForecast>& forecasts, int horizon_hours,
                          int cadence_hours) {
    DesignMatrix design;
    design.horizon_hours = horizon_hours;
    if (samples.empty()) {
        design.X.resize(0, 0);
        design.y.resize(0);
        return design;
    }

    const int k = static_cast<int>(samples.front().z.size());
    design.n_coeffs = k;

    std::map<std::pair<std::string, std::int64_t>, const CoeffSample*> by_key;
    for (const CoeffSample& s : samples) {
        if (s.z.size() != k) throw DataError("build_design: coefficient length mismatch");
        by_key[{s.storm_id, s.time.secs}] = &s;
    }
    std::map<std::pair<std::string, std::int64_t>, const StructuralForecast*> fc_by_key;
    for (const StructuralForecast& f : forecasts) {
        if (f.horizon_hours != horizon_hours) continue;
        if (f.z_hat.size() != k)
            throw DataError("build_design: forecast coefficient basis mismatch (" +
                            std::to_string(f.z_hat.size()) + " vs " + std::to_string(k) + ")");
        fc_by_key[{f.storm_id, f.issue_time.secs}] = &f;
    }

    const std::int64_t horizon = static_cast<std::int64_t>(horizon_hours) * kSecondsPerHour;
    const std::int64_t cadence = static_cast<std::int64_t>(cadence_hours) * kSecondsPerHour;

    std::vector<Eigen::VectorXd> rows;
    std::vector<double> targets;
    for (const CoeffSample& s : samples) {
        const auto fc = fc_by_key.find({s.storm_id, s.time.secs});
        if (fc == fc_by_key.end()) {
            ++design.skipped_no_forecast;
            continue;
        }
        const auto prev = by_key.find({s.storm_id, s.time.secs - cadence});
        const double dv_past = prev != by_key.end() ? s.vmax - prev->second->vmax : 0.0;

        Eigen::VectorXd row(2 + 2 * k);
        row[0] = s.vmax;
        row[1] = dv_past;
        row.segment(2, k) = s.z;
        row.segment(2 + k, k) = fc->second->z_hat;
        rows.push_back(std::move(row));

        const auto future = by_key.find({s.storm_id, s.time.secs + horizon});
        if (future != by_key.end()) {
            targets.push_back(future->second->vmax - s.vmax);
            design.has_target.push_back(true);
        } else {
            targets.push_back(0.0);
            design.has_target.push_back(false);
        }
        design.keys.push_back({s.storm_id, s.time});
    }

    design.X.resize(rows.size(), 2 + 2 * k);
    design.y.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        design.X.row(i) = rows[i];
        design.y[i] = targets[i];
    }
    return design;
}

std::optional<bool> label_rapid_change(const StormTrack& track, UtcTime t, double window_hours,
                                       double threshold_kt, bool increase_only) {
    const UtcTime t2 = t + static_cast<std::int64_t>(window_hours * 3600.0);
    std::optional<double> v0, v1;
    for (const TrackFix& fix : track.fixes) {
        if (fix.time == t) v0 = fix.vmax;
        if (fix.time == t2) v1 = fix.vmax;
    }
    if (!v0 || !v1) return std::nullopt;
    const double change = *v1 - *v0;
    return increase_only ? change >= threshold_kt : std::abs(change) >= threshold_kt;
}

} // namespace tcs
