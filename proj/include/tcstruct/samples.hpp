#pragma once

#include "tcstruct/hurdat2.hpp"
#include "tcstruct/image.hpp"

#include <vector>

namespace tcs {

// One synoptically aligned training/evaluation unit: a storm-centered image
// with the observed intensity at the same synoptic time.
struct Sample {
    std::string storm_id;
    UtcTime time; // multiple of the cadence from 00Z
    CenteredImage image;
    double vmax = 0.0; // knots
};

struct SampleBuildOptions {
    double cadence_hours = 6.0;
    double tolerance_minutes = 90.0;
    GridGeom geom;
};

struct SampleBuildSummary {
    int emitted = 0;
    int skipped_no_frame = 0;
    int skipped_no_vmax = 0;
};

// For each synoptic time inside the track span that has a fix with vmax,
// picks the frame closest in time (within the tolerance; ties go to the
// earlier frame), regrids it about the track position interpolated at the
// frame time, and stamps the sample with the synoptic time. Times without a
// qualifying frame or vmax are skipped and counted, never fatal.
std::vector<Sample> build_samples(const std::vector<IrFrame>& frames, const StormTrack& track,
                                  const SampleBuildOptions& options,
                                  SampleBuildSummary* summary = nullptr);

} // namespace tcs
