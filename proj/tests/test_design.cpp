#include "tcstruct/design.hpp"
#include "tcstruct/error.hpp"

#include <doctest.h>

using namespace tcs;

namespace {

const UtcTime kStart = from_civil({2000, 8, 1, 0, 0, 0});

StormTrack track_with_vmax(const std::vector<std::optional<double>>& vmax) {
    StormTrack track;
    track.storm_id = "AL012000";
    for (std::size_t i = 0; i < vmax.size(); ++i) {
        TrackFix fix;
        fix.time = kStart + static_cast<std::int64_t>(i) * 6 * 3600;
        fix.lat = 15.0;
        fix.lon = -50.0;
        fix.vmax = vmax[i];
        track.fixes.push_back(fix);
    }
    return track;
}

std::vector<CoeffSample> samples_for(const std::vector<double>& vmax, int k = 2,
                                     const std::string& storm = "AL012000") {
    std::vector<CoeffSample> samples;
    for (std::size_t i = 0; i < vmax.size(); ++i) {
        CoeffSample s;
        s.storm_id = storm;
        s.time = kStart + static_cast<std::int64_t>(i) * 6 * 3600;
        s.vmax = vmax[i];
        s.z = Eigen::VectorXd::Constant(k, static_cast<double>(i));
        samples.push_back(std::move(s));
    }
    return samples;
}

std::vector<StructuralForecast> forecasts_for(const std::vector<CoeffSample>& samples, int horizon,
                                              int k = 2) {
    std::vector<StructuralForecast> out;
    for (const CoeffSample& s : samples) {
        StructuralForecast f;
        f.storm_id = s.storm_id;
        f.issue_time = s.time;
        f.horizon_hours = horizon;
        f.pathway = 'B';
        f.z_hat = Eigen::VectorXd::Constant(k, 0.5);
        f.x_hat = Eigen::VectorXd::Zero(k);
        out.push_back(std::move(f));
    }
    return out;
}

} // namespace

TEST_CASE("label_rapid_change pins the 30 kt / 24 h threshold") {
    SUBCASE("+30 kt is rapid") {
        const StormTrack track = track_with_vmax({60, 70, 80, 85, 90});
        const auto label = label_rapid_change(track, kStart);
        REQUIRE(label.has_value());
        CHECK(*label == true);
    }
    SUBCASE("+29 kt is not") {
        const StormTrack track = track_with_vmax({60, 70, 80, 85, 89});
        CHECK(*label_rapid_change(track, kStart) == false);
    }
    SUBCASE("rapid weakening counts under the absolute rule") {
        const StormTrack track = track_with_vmax({90, 80, 70, 65, 60});
        CHECK(*label_rapid_change(track, kStart) == true);
        CHECK(*label_rapid_change(track, kStart, 24.0, 30.0, true) == false); // increase-only
    }
    SUBCASE("missing endpoint is undefined") {
        const StormTrack track = track_with_vmax({60, 70, 80, 85, std::nullopt});
        CHECK_FALSE(label_rapid_change(track, kStart).has_value());
        CHECK_FALSE(label_rapid_change(track, kStart + 6 * 3600).has_value()); // beyond span
    }
}

TEST_CASE("build_design row structure") {
    const std::vector<double> vmax = {50, 55, 60, 70, 75, 80};
    const std::vector<CoeffSample> samples = samples_for(vmax);
    const std::vector<StructuralForecast> forecasts = forecasts_for(samples, 24);

    const DesignMatrix design = build_design(samples, forecasts, 24, 6);
    REQUIRE(design.X.rows() == 6);
    CHECK(design.X.cols() == 2 + 2 * 2);

    SUBCASE("feature order is [v_now, dv_past, z_obs, z_fc]") {
        CHECK(design.X(2, 0) == 60.0);       // v_now at t=12h
        CHECK(design.X(2, 1) == 5.0);        // dv over the prior 6 h
        CHECK(design.X(2, 2) == 2.0);        // z_obs
        CHECK(design.X(2, 4) == 0.5);        // z_fc
        CHECK(design.X(0, 1) == 0.0);        // dv_past defaults to 0 at storm start
    }
    SUBCASE("targets exist only where V(t+h) is available") {
        // 24 h = 4 steps; rows 0 and 1 have targets, the rest do not.
        CHECK(design.has_target[0]);
        CHECK(design.has_target[1]);
        for (int i = 2; i < 6; ++i) CHECK_FALSE(design.has_target[i]);
        CHECK(design.y[0] == 75.0 - 50.0);
        CHECK(design.y[1] == 80.0 - 55.0);
        Eigen::MatrixXd Xt;
        Eigen::VectorXd yt;
        design.training_view(Xt, yt);
        CHECK(Xt.rows() == 2);
    }
    SUBCASE("issue times without a forecast are skipped and counted") {
        std::vector<StructuralForecast> partial = forecasts;
        partial.erase(partial.begin() + 1);
        const DesignMatrix d2 = build_design(samples, partial, 24, 6);
        CHECK(d2.X.rows() == 5);
        CHECK(d2.skipped_no_forecast == 1);
    }
    SUBCASE("coefficient basis mismatch throws") {
        std::vector<StructuralForecast> bad = forecasts;
        bad[0].z_hat = Eigen::VectorXd::Zero(7);
        CHECK_THROWS_AS(build_design(samples, bad, 24, 6), DataError);
    }
}

TEST_CASE("build_design row count equals brute-force enumeration") {
    // Two storms with gaps in available forecasts and vmax coverage.
    std::vector<CoeffSample> samples = samples_for({50, 55, 60, 70, 75, 80, 85, 82});
    const std::vector<CoeffSample> other =
        samples_for({40, 45, 50, 55, 60}, 2, "EP022000");
    samples.insert(samples.end(), other.begin(), other.end());

    std::vector<StructuralForecast> forecasts = forecasts_for(samples, 12);
    forecasts.erase(forecasts.begin() + 3); // one missing forecast

    const DesignMatrix design = build_design(samples, forecasts, 12, 6);

    int expected_rows = 0, expected_targets = 0;
    for (const CoeffSample& s : samples) {
        bool has_fc = false;
        for (const StructuralForecast& f : forecasts)
            if (f.storm_id == s.storm_id && f.issue_time == s.time) has_fc = true;
        if (!has_fc) continue;
        ++expected_rows;
        for (const CoeffSample& s2 : samples)
            if (s2.storm_id == s.storm_id && s2.time == s.time + 12 * 3600) ++expected_targets;
    }
    CHECK(design.X.rows() == expected_rows);
    int targets = 0;
    for (bool t : design.has_target)
        if (t) ++targets;
    CHECK(targets == expected_targets);
}
