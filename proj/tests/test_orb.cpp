#include "tcstruct/error.hpp"
#include "tcstruct/orb.hpp"
#include "tcstruct/rng.hpp"
#include "tcstruct/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace tcs;

namespace {

// Brute-force oracles: independent per-pixel enumeration with naive
// accumulation, no shared code with the implementation path.

int oracle_annulus(const CenteredImage& img, int i, int j, const OrbConfig& cfg) {
    const double r = std::sqrt(img.x_km(j) * img.x_km(j) + img.y_km(i) * img.y_km(i));
    const int k = static_cast<int>(std::floor(r / cfg.r_step_km));
    if (r >= cfg.r_max_km || k >= cfg.n_annuli()) return -1;
    return k;
}

std::vector<double> oracle_radial(const CenteredImage& img, RadialStat stat,
                                  const OrbConfig& cfg) {
    std::vector<std::vector<double>> members(cfg.n_annuli());
    std::vector<long> total(cfg.n_annuli(), 0);
    for (int i = 0; i < img.side; ++i)
        for (int j = 0; j < img.side; ++j) {
            const int k = oracle_annulus(img, i, j, cfg);
            if (k < 0) continue;
            ++total[k];
            if (!is_missing(img.at(i, j))) members[k].push_back(img.at(i, j));
        }
    std::vector<double> out(cfg.n_annuli(), std::numeric_limits<double>::quiet_NaN());
    for (int k = 0; k < cfg.n_annuli(); ++k) {
        if (total[k] == 0) continue;
        const double missing_frac =
            static_cast<double>(total[k] - static_cast<long>(members[k].size())) / total[k];
        if (missing_frac > cfg.max_missing_fraction || members[k].empty()) continue;
        double mean = 0;
        for (double v : members[k]) mean += v;
        mean /= static_cast<double>(members[k].size());
        if (stat == RadialStat::Mean) {
            out[k] = mean;
        } else {
            double ss = 0;
            for (double v : members[k]) ss += (v - mean) * (v - mean);
            out[k] = std::sqrt(ss / static_cast<double>(members[k].size()));
        }
    }
    return out;
}

std::vector<double> oracle_asym(const CenteredImage& img, int wavenumber, const OrbConfig& cfg) {
    const int n_ann = cfg.n_annuli();
    std::vector<std::vector<std::pair<double, double>>> members(n_ann); // (T, theta)
    std::vector<long> total(n_ann, 0);
    for (int i = 0; i < img.side; ++i)
        for (int j = 0; j < img.side; ++j) {
            const int k = oracle_annulus(img, i, j, cfg);
            if (k < 0) continue;
            ++total[k];
            if (!is_missing(img.at(i, j)))
                members[k].push_back({img.at(i, j), std::atan2(img.y_km(i), img.x_km(j))});
        }
    std::vector<double> out(n_ann, std::numeric_limits<double>::quiet_NaN());
    for (int k = 0; k < n_ann; ++k) {
        if (total[k] == 0 || members[k].empty()) continue;
        const double missing_frac =
            static_cast<double>(total[k] - static_cast<long>(members[k].size())) / total[k];
        if (missing_frac > cfg.max_missing_fraction) continue;
        double mean = 0;
        for (const auto& [t, th] : members[k]) mean += t;
        mean /= static_cast<double>(members[k].size());
        std::complex<double> acc(0, 0);
        for (const auto& [t, th] : members[k])
            acc += (t - mean) * std::exp(std::complex<double>(0, -wavenumber * th));
        out[k] = 2.0 / static_cast<double>(members[k].size()) * std::abs(acc);
    }
    return out;
}

std::vector<double> oracle_levelset(const CenteredImage& img, const OrbConfig& cfg) {
    std::vector<double> out;
    long valid = 0;
    for (float v : img.temps)
        if (!is_missing(v)) ++valid;
    REQUIRE(valid > 0);
    for (double c : cfg.thresholds()) {
        long le = 0;
        for (float v : img.temps)
            if (!is_missing(v) && static_cast<double>(v) <= c) ++le;
        out.push_back(static_cast<double>(le) / static_cast<double>(valid));
    }
    return out;
}

CenteredImage blank(const GridGeom& geom, float fill) {
    CenteredImage img = make_centered_image(geom, 0.0, 0.0, UtcTime{});
    std::fill(img.temps.begin(), img.temps.end(), fill);
    return img;
}

CenteredImage rotate90(const CenteredImage& img) {
    CenteredImage out = img;
    for (int i = 0; i < img.side; ++i)
        for (int j = 0; j < img.side; ++j) out.at(j, img.side - 1 - i) = img.at(i, j);
    return out;
}

void check_matches(const OrbFunction& f, const std::vector<double>& oracle, double tol) {
    REQUIRE(f.values.size() == oracle.size());
    for (std::size_t k = 0; k < oracle.size(); ++k) {
        if (std::isnan(oracle[k])) {
            CHECK(std::isnan(f.values[k]));
        } else {
            REQUIRE_FALSE(std::isnan(f.values[k]));
            CHECK(std::abs(f.values[k] - oracle[k]) <= tol);
        }
    }
}

const GridGeom kGeom{100.0, 4.0};
const OrbConfig kCfg = [] {
    OrbConfig cfg;
    cfg.r_max_km = 100.0;
    return cfg;
}();

} // namespace

TEST_CASE("constant image: mean constant, stdev and asymmetry zero") {
    const CenteredImage img = blank(kGeom, 250.0f);
    const OrbFunction mean = radial_profile(img, RadialStat::Mean, kCfg);
    const OrbFunction sd = radial_profile(img, RadialStat::Stdev, kCfg);
    const OrbFunction asym = asymmetry_profile(img, 1, kCfg);
    for (std::size_t k = 0; k < mean.values.size(); ++k) {
        REQUIRE_FALSE(std::isnan(mean.values[k]));
        CHECK(mean.values[k] == 250.0);
        CHECK(sd.values[k] == 0.0);
        CHECK(asym.values[k] == 0.0);
    }
    for (int w = 2; w <= 3; ++w) {
        const OrbFunction a = asymmetry_profile(img, w, kCfg);
        for (double v : a.values)
            if (!std::isnan(v)) CHECK(v == 0.0);
    }
}

TEST_CASE("disk/ring scene matches the per-pixel oracle") {
    CenteredImage img = blank(kGeom, 270.0f);
    for (int i = 0; i < img.side; ++i)
        for (int j = 0; j < img.side; ++j) {
            const double r = std::hypot(img.x_km(j), img.y_km(i));
            if (r < 20.0)
                img.at(i, j) = 280.0f;
            else if (r < 50.0)
                img.at(i, j) = 200.0f;
        }
    check_matches(radial_profile(img, RadialStat::Mean, kCfg),
                  oracle_radial(img, RadialStat::Mean, kCfg), 1e-10);
    check_matches(radial_profile(img, RadialStat::Stdev, kCfg),
                  oracle_radial(img, RadialStat::Stdev, kCfg), 1e-10);
    check_matches(asymmetry_profile(img, 1, kCfg), oracle_asym(img, 1, kCfg), 1e-10);
    check_matches(levelset_area(img, kCfg), oracle_levelset(img, kCfg), 1e-12);
}

TEST_CASE("wavenumber-1 cosine pattern has amplitude ~10 K") {
    CenteredImage img = blank(kGeom, 250.0f);
    for (int i = 0; i < img.side; ++i)
        for (int j = 0; j < img.side; ++j) {
            const double theta = std::atan2(img.y_km(i), img.x_km(j));
            img.at(i, j) = static_cast<float>(250.0 + 10.0 * std::cos(theta));
        }
    const OrbFunction asym = asymmetry_profile(img, 1, kCfg);
    check_matches(asym, oracle_asym(img, 1, kCfg), 1e-10);
    // Skip the innermost annuli, whose handful of pixels undersample the
    // harmonic; outward of 20 km the amplitude sits on 10 K.
    for (std::size_t k = 5; k < asym.values.size(); ++k) {
        if (std::isnan(asym.values[k])) continue;
        CHECK(asym.values[k] == doctest::Approx(10.0).epsilon(0.02));
    }
}

TEST_CASE("rotation invariance") {
    SceneParams params;
    params.asym_amp_k = 7.0;
    params.asym_phase_rad = 0.3;
    params.noise_sd_k = 3.0;
    params.rng_seed = 99;
    const CenteredImage img = render_scene(params, kGeom);
    CenteredImage rot = img;
    for (int turns = 1; turns <= 3; ++turns) {
        rot = rotate90(rot);
        CAPTURE(turns);
        // Mean and level-set area are exactly invariant.
        const OrbFunction m0 = radial_profile(img, RadialStat::Mean, kCfg);
        const OrbFunction m1 = radial_profile(rot, RadialStat::Mean, kCfg);
        for (std::size_t k = 0; k < m0.values.size(); ++k) {
            if (std::isnan(m0.values[k])) {
                CHECK(std::isnan(m1.values[k]));
            } else {
                CHECK(m0.values[k] == m1.values[k]);
            }
        }
        const OrbFunction l0 = levelset_area(img, kCfg);
        const OrbFunction l1 = levelset_area(rot, kCfg);
        for (std::size_t c = 0; c < l0.values.size(); ++c) CHECK(l0.values[c] == l1.values[c]);
        // Stdev and asymmetry are invariant up to rounding.
        const OrbFunction s0 = radial_profile(img, RadialStat::Stdev, kCfg);
        const OrbFunction s1 = radial_profile(rot, RadialStat::Stdev, kCfg);
        const OrbFunction a0 = asymmetry_profile(img, 1, kCfg);
        const OrbFunction a1 = asymmetry_profile(rot, 1, kCfg);
        for (std::size_t k = 0; k < s0.values.size(); ++k) {
            if (std::isnan(s0.values[k])) continue;
            CHECK(std::abs(s0.values[k] - s1.values[k]) <= 1e-10);
            CHECK(std::abs(a0.values[k] - a1.values[k]) <= 1e-10);
        }
    }
}

TEST_CASE("asymmetry is exactly invariant under adding a constant") {
    SceneParams params;
    params.asym_amp_k = 5.0;
    params.noise_sd_k = 2.0;
    params.rng_seed = 7;
    const CenteredImage img = render_scene(params, kGeom);
    CenteredImage shifted = img;
    for (float& v : shifted.temps) v += 16.0f; // exactly representable shift
    const OrbFunction a0 = asymmetry_profile(img, 1, kCfg);
    const OrbFunction a1 = asymmetry_profile(shifted, 1, kCfg);
    for (std::size_t k = 0; k < a0.values.size(); ++k) {
        if (std::isnan(a0.values[k])) continue;
        CHECK(a0.values[k] == a1.values[k]);
    }
}

TEST_CASE("levelset is a cumulative fraction") {
    SUBCASE("half cold half warm") {
        CenteredImage img = blank(GridGeom{40.0, 4.0}, 200.0f);
        // Odd pixel count: park the center pixel as missing, then split the
        // rest exactly in half.
        img.temps[img.temps.size() / 2] = kMissing;
        std::size_t flip = 0;
        for (std::size_t p = 0; p < img.temps.size(); ++p) {
            if (is_missing(img.temps[p])) continue;
            if (flip++ % 2 == 0) img.temps[p] = 280.0f;
        }
        const OrbFunction f = levelset_area(img, kCfg);
        const std::vector<double> thresholds = kCfg.thresholds();
        for (std::size_t c = 0; c < thresholds.size(); ++c) {
            if (thresholds[c] == 240.0) CHECK(f.values[c] == 0.5);
            if (thresholds[c] < 200.0) CHECK(f.values[c] == 0.0);
            if (thresholds[c] >= 280.0) CHECK(f.values[c] == 1.0);
        }
    }
    SUBCASE("random image: non-decreasing in [0,1], matches oracle") {
        CenteredImage img = blank(kGeom, 250.0f);
        for (std::size_t p = 0; p < img.temps.size(); ++p)
            img.temps[p] = static_cast<float>(180.0 + 140.0 * uniform_open(42, p));
        const OrbFunction f = levelset_area(img, kCfg);
        check_matches(f, oracle_levelset(img, kCfg), 1e-12);
        for (std::size_t c = 0; c < f.values.size(); ++c) {
            CHECK(f.values[c] >= 0.0);
            CHECK(f.values[c] <= 1.0);
            if (c > 0) CHECK(f.values[c] >= f.values[c - 1]);
        }
    }
    SUBCASE("all missing throws") {
        CenteredImage img = make_centered_image(GridGeom{40.0, 4.0}, 0, 0, UtcTime{});
        CHECK_THROWS_AS(levelset_area(img, kCfg), DataError);
        CHECK_THROWS_AS(assemble_orb_vector(img, kCfg), DataError);
        // A fully missing radial profile is all-missing, not an error.
        const OrbFunction m = radial_profile(img, RadialStat::Mean, kCfg);
        for (double v : m.values) CHECK(std::isnan(v));
    }
}

TEST_CASE("assemble_orb_vector layout and imputation") {
    SUBCASE("default config gives d=366 with documented offsets") {
        const OrbLayout layout = orb_layout(OrbConfig{});
        CHECK(layout.d == 366);
        REQUIRE(layout.components.size() == 4);
        CHECK(layout.components[0].offset == 0);
        CHECK(layout.components[1].offset == 100);
        CHECK(layout.components[2].offset == 200);
        CHECK(layout.components[3].offset == 300);
        CHECK(layout.components[3].length == 66);
    }
    SUBCASE("slicing reproduces each function where observed") {
        SceneParams params;
        params.noise_sd_k = 1.0;
        params.rng_seed = 3;
        const CenteredImage img = render_scene(params, kGeom);
        const OrbVector vec = assemble_orb_vector(img, kCfg);
        const OrbFunction mean = radial_profile(img, RadialStat::Mean, kCfg);
        const OrbFunction level = levelset_area(img, kCfg);
        const OrbComponent& c0 = vec.layout.components[0];
        for (int k = 0; k < c0.length; ++k)
            if (!std::isnan(mean.values[k])) CHECK(vec.values[c0.offset + k] == mean.values[k]);
        const OrbComponent& c3 = vec.layout.components[3];
        for (int k = 0; k < c3.length; ++k) CHECK(vec.values[c3.offset + k] == level.values[k]);
    }
    SUBCASE("interior missing annulus imputed from the nearer neighbor") {
        OrbConfig cfg;
        cfg.r_max_km = 40.0;
        CenteredImage img = blank(GridGeom{40.0, 4.0}, 250.0f);
        for (int i = 0; i < img.side; ++i)
            for (int j = 0; j < img.side; ++j) {
                const double r = std::hypot(img.x_km(j), img.y_km(i));
                if (r >= 12.0 && r < 16.0) img.at(i, j) = kMissing; // annulus 3 gone
                if (r >= 8.0 && r < 12.0) img.at(i, j) = 210.0f;
                if (r >= 16.0 && r < 20.0) img.at(i, j) = 290.0f;
            }
        const OrbVector vec = assemble_orb_vector(img, cfg);
        // Equidistant neighbors: tie goes to the lower abscissa (annulus 2).
        CHECK(vec.values[3] == 210.0);
    }
    SUBCASE("oversparse function rejects the sample") {
        CenteredImage img = blank(kGeom, 250.0f);
        for (std::size_t p = 0; p < img.temps.size(); ++p)
            if (p % 97 != 0) img.temps[p] = kMissing; // ~99% missing
        CHECK_THROWS_WITH_AS(assemble_orb_vector(img, kCfg), doctest::Contains("missing"),
                             DataError);
    }
}

TEST_CASE("noise-free symmetric synth scene: wavenumber-1 below oracle bound") {
    SceneParams params; // defaults: no asymmetry, no noise
    const CenteredImage img = render_scene(params, kGeom);
    const std::vector<double> oracle = oracle_asym(img, 1, kCfg);
    const OrbFunction asym = asymmetry_profile(img, 1, kCfg);
    for (std::size_t k = 0; k < asym.values.size(); ++k) {
        if (std::isnan(asym.values[k])) continue;
        CHECK(std::abs(asym.values[k] - oracle[k]) <= 1e-10);
    }
}
