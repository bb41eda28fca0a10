#include "tcstruct/orb.hpp"

#include "tcstruct/error.hpp"

#include <algorithm>
#include <cmath>

namespace tcs {

std::vector<double> OrbConfig::r_centers() const {
    std::vector<double> centers(n_annuli());
    for (int k = 0; k < n_annuli(); ++k) centers[k] = (k + 0.5) * r_step_km;
    return centers;
}

std::vector<double> OrbConfig::thresholds() const {
    std::vector<double> t(n_thresholds());
    for (int i = 0; i < n_thresholds(); ++i) t[i] = c_min_k + i * c_step_k;
    return t;
}

namespace {

// Per-pixel annulus assignment plus the exact per-annulus sums shared by the
// radial statistics. Squared radii are formed from products of the pixel
// offsets, so the annulus of a pixel is a bit-exact function of {|x|, |y|}
// and survives grid rotations unchanged. Sums of binary32 temperatures in
// [150, 340] K accumulate exactly in double (every addend is a multiple of
// 2^-16 and the total stays far below 2^53 ulps), which is what makes the
// documented exact-invariance properties hold.
struct AnnulusBins {
    int n_annuli = 0;
    std::vector<int> bin;       // per pixel; -1 = outside r_max
    std::vector<long> total;    // pixels per annulus
    std::vector<long> valid;    // non-missing pixels per annulus
    std::vector<double> sum;    // exact sum of non-missing temps
};

AnnulusBins bin_annuli(const CenteredImage& img, const OrbConfig& cfg) {
    AnnulusBins bins;
    bins.n_annuli = cfg.n_annuli();
    bins.bin.assign(img.temps.size(), -1);
    bins.total.assign(bins.n_annuli, 0);
    bins.valid.assign(bins.n_annuli, 0);
    bins.sum.assign(bins.n_annuli, 0.0);

    const double step = cfg.r_step_km;
    for (int i = 0; i < img.side; ++i) {
        const double y = img.y_km(i);
        for (int j = 0; j < img.side; ++j) {
            const double x = img.x_km(j);
            const double r2 = x * x + y * y;
            int k = static_cast<int>(std::sqrt(r2) / step);
            // sqrt/divide rounding can misplace boundary pixels by one bin;
            // settle against the exact squared edges.
            while (k > 0 && r2 < (k * step) * (k * step)) --k;
            while (r2 >= ((k + 1) * step) * ((k + 1) * step)) ++k;
            if (k >= bins.n_annuli) continue;
            const std::size_t p = static_cast<std::size_t>(i) * img.side + j;
            bins.bin[p] = k;
            ++bins.total[k];
            const float v = img.temps[p];
            if (!is_missing(v)) {
                ++bins.valid[k];
                bins.sum[k] += v;
            }
        }
    }
    return bins;
}

bool annulus_missing(const AnnulusBins& bins, int k, const OrbConfig& cfg) {
    if (bins.total[k] == 0) return true;
    const double missing_fraction =
        static_cast<double>(bins.total[k] - bins.valid[k]) / static_cast<double>(bins.total[k]);
    return missing_fraction > cfg.max_missing_fraction;
}

OrbFunction radial_from_bins(const CenteredImage& img, const AnnulusBins& bins, RadialStat stat,
                             const OrbConfig& cfg) {
    OrbFunction f;
    f.abscissa = Abscissa::RadiusKm;
    f.grid = cfg.r_centers();
    f.values.assign(bins.n_annuli, std::numeric_limits<double>::quiet_NaN());

    if (stat == RadialStat::Mean) {
        for (int k = 0; k < bins.n_annuli; ++k)
            if (!annulus_missing(bins, k, cfg) && bins.valid[k] > 0)
                f.values[k] = bins.sum[k] / static_cast<double>(bins.valid[k]);
        return f;
    }

    // Population standard deviation via exact integer-scaled deviations:
    // n*T_j - S is exact, so variance = sum (n*T_j - S)^2 / n^3.
    std::vector<double> sq(bins.n_annuli, 0.0);
    for (std::size_t p = 0; p < img.temps.size(); ++p) {
        const int k = bins.bin[p];
        if (k < 0 || is_missing(img.temps[p])) continue;
        const double d = static_cast<double>(bins.valid[k]) * img.temps[p] - bins.sum[k];
        sq[k] += d * d;
    }
    for (int k = 0; k < bins.n_annuli; ++k) {
        if (annulus_missing(bins, k, cfg) || bins.valid[k] == 0) continue;
        const double n = static_cast<double>(bins.valid[k]);
        f.values[k] = std::sqrt(sq[k] / (n * n * n));
    }
    return f;
}

OrbFunction asymmetry_from_bins(const CenteredImage& img, const AnnulusBins& bins, int wavenumber,
                                const OrbConfig& cfg) {
    if (wavenumber < 1) throw DataError("asymmetry wavenumber must be >= 1");
    OrbFunction f;
    f.abscissa = Abscissa::RadiusKm;
    f.grid = cfg.r_centers();
    f.values.assign(bins.n_annuli, std::numeric_limits<double>::quiet_NaN());

    std::vector<double> re(bins.n_annuli, 0.0), im(bins.n_annuli, 0.0);
    for (int i = 0; i < img.side; ++i) {
        const double y = img.y_km(i);
        for (int j = 0; j < img.side; ++j) {
            const std::size_t p = static_cast<std::size_t>(i) * img.side + j;
            const int k = bins.bin[p];
            if (k < 0 || is_missing(img.temps[p])) continue;
            const double theta = std::atan2(y, img.x_km(j));
            const double d = static_cast<double>(bins.valid[k]) * img.temps[p] - bins.sum[k];
            re[k] += d * std::cos(wavenumber * theta);
            im[k] += d * std::sin(wavenumber * theta);
        }
    }
    for (int k = 0; k < bins.n_annuli; ++k) {
        if (annulus_missing(bins, k, cfg) || bins.valid[k] == 0) continue;
        const double n = static_cast<double>(bins.valid[k]);
        f.values[k] = 2.0 / (n * n) * std::hypot(re[k], im[k]);
    }
    return f;
}

} // namespace

OrbFunction radial_profile(const CenteredImage& img, RadialStat stat, const OrbConfig& cfg) {
    return radial_from_bins(img, bin_annuli(img, cfg), stat, cfg);
}

OrbFunction asymmetry_profile(const CenteredImage& img, int wavenumber, const OrbConfig& cfg) {
    return asymmetry_from_bins(img, bin_annuli(img, cfg), wavenumber, cfg);
}

OrbFunction levelset_area(const CenteredImage& img, const OrbConfig& cfg) {
    OrbFunction f;
    f.abscissa = Abscissa::ThresholdK;
    f.grid = cfg.thresholds();
    const int m = cfg.n_thresholds();

    // Histogram into "first threshold >= T", then take the running total so
    // every value is an exact pixel count divided by the valid count.
    std::vector<long> counts(m + 1, 0);
    long n_valid = 0;
    for (const float v : img.temps) {
        if (is_missing(v)) continue;
        ++n_valid;
        const auto it = std::lower_bound(f.grid.begin(), f.grid.end(), static_cast<double>(v));
        ++counts[static_cast<std::size_t>(it - f.grid.begin())];
    }
    if (n_valid == 0) throw DataError("level-set area undefined: image entirely missing");

    f.values.resize(m);
    long cum = 0;
    for (int i = 0; i < m; ++i) {
        cum += counts[i];
        f.values[i] = static_cast<double>(cum) / static_cast<double>(n_valid);
    }
    return f;
}

OrbLayout orb_layout(const OrbConfig& cfg) {
    OrbLayout layout;
    int offset = 0;
    auto add = [&](const std::string& name, Abscissa a, int len) {
        layout.components.push_back({name, a, offset, len});
        offset += len;
    };
    add("radial_mean", Abscissa::RadiusKm, cfg.n_annuli());
    add("radial_stdev", Abscissa::RadiusKm, cfg.n_annuli());
    for (int k : cfg.asym_wavenumbers)
        add("asym_w" + std::to_string(k), Abscissa::RadiusKm, cfg.n_annuli());
    add("levelset_area", Abscissa::ThresholdK, cfg.n_thresholds());
    layout.d = offset;
    return layout;
}

namespace {

// Nearest non-missing value along the abscissa; ties go to the lower one.
void impute_nearest(const OrbFunction& f, Eigen::VectorXd& out, int offset,
                    const std::string& name) {
    const int n = static_cast<int>(f.values.size());
    int n_missing = 0;
    for (double v : f.values)
        if (std::isnan(v)) ++n_missing;
    if (n_missing * 2 > n)
        throw DataError("orb function " + name + " is " + std::to_string(n_missing) + "/" +
                        std::to_string(n) + " missing; sample rejected");

    for (int i = 0; i < n; ++i) {
        if (!std::isnan(f.values[i])) {
            out[offset + i] = f.values[i];
            continue;
        }
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (std::isnan(f.values[j])) continue;
            const double dist = std::abs(f.grid[j] - f.grid[i]);
            if (dist < best_dist) {
                best = j;
                best_dist = dist;
            }
        }
        out[offset + i] = f.values[best];
    }
}

} // namespace

OrbVector assemble_orb_vector(const CenteredImage& img, const OrbConfig& cfg) {
    OrbVector vec;
    vec.layout = orb_layout(cfg);
    vec.values.resize(vec.layout.d);

    if (img.missing_count() == img.temps.size())
        throw DataError("orb extraction rejected: image entirely missing");

    const AnnulusBins bins = bin_annuli(img, cfg);
    std::size_t c = 0;
    auto place = [&](const OrbFunction& f) {
        const OrbComponent& comp = vec.layout.components[c++];
        impute_nearest(f, vec.values, comp.offset, comp.name);
    };
    place(radial_from_bins(img, bins, RadialStat::Mean, cfg));
    place(radial_from_bins(img, bins, RadialStat::Stdev, cfg));
    for (int k : cfg.asym_wavenumbers) place(asymmetry_from_bins(img, bins, k, cfg));
    place(levelset_area(img, cfg));
    return vec;
}

} // namespace tcs
