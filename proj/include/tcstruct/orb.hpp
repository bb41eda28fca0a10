#pragma once

#include "tcstruct/image.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace tcs {

enum class Abscissa { RadiusKm, ThresholdK };

// A discretized structural-summary function. grid is strictly increasing;
// missing values are NaN.
struct OrbFunction {
    Abscissa abscissa = Abscissa::RadiusKm;
    std::vector<double> grid;
    std::vector<double> values;
};

// Discretization of the structural functions. Radial annuli have edges
// 0, r_step, ..., r_max (bin centers serve as the abscissa grid); level-set
// thresholds run c_min..c_max inclusive.
struct OrbConfig {
    double r_max_km = 400.0;
    double r_step_km = 4.0;
    double c_min_k = 180.0;
    double c_max_k = 310.0;
    double c_step_k = 2.0;
    std::vector<int> asym_wavenumbers = {1};
    double max_missing_fraction = 0.5; // per annulus

    int n_annuli() const { return static_cast<int>(std::llround(r_max_km / r_step_km)); }
    int n_thresholds() const {
        return static_cast<int>(std::llround((c_max_k - c_min_k) / c_step_k)) + 1;
    }
    std::vector<double> r_centers() const;
    std::vector<double> thresholds() const;
};

enum class RadialStat { Mean, Stdev };

// Azimuthal mean or population standard deviation per annulus. An annulus is
// missing when its missing fraction exceeds the config limit or it has no
// pixels at all (beyond the image extent).
OrbFunction radial_profile(const CenteredImage& img, RadialStat stat, const OrbConfig& cfg);

// Amplitude (Kelvin) of the wavenumber-k azimuthal harmonic of the
// mean-removed temperatures per annulus:
//   (2/n) * | sum_j (T_j - mean) * exp(-i k theta_j) |
// with theta measured from east, counterclockwise. Exactly invariant under
// adding a constant to all temperatures (deviations are formed from exact
// integer-scaled sums of the binary32 inputs).
OrbFunction asymmetry_profile(const CenteredImage& img, int wavenumber, const OrbConfig& cfg);

// Cold-cloud fraction: share of non-missing pixels with T <= threshold.
// Non-decreasing in the threshold by construction. Throws DataError when
// every pixel is missing.
OrbFunction levelset_area(const CenteredImage& img, const OrbConfig& cfg);

struct OrbComponent {
    std::string name;
    Abscissa abscissa = Abscissa::RadiusKm;
    int offset = 0;
    int length = 0;
};

struct OrbLayout {
    std::vector<OrbComponent> components;
    int d = 0;
};

OrbLayout orb_layout(const OrbConfig& cfg);

// The concatenated structural state vector: [radial mean, radial stdev,
// asymmetry per wavenumber, level-set area], with missing entries imputed
// from the nearest non-missing abscissa (ties to the lower abscissa).
struct OrbVector {
    Eigen::VectorXd values;
    OrbLayout layout;
};

// Throws DataError when any single component function is more than half
// missing (or the image is entirely missing).
OrbVector assemble_orb_vector(const CenteredImage& img, const OrbConfig& cfg);

} // namespace tcs
