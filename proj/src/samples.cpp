#include "tcstruct/samples.hpp"

#include "tcstruct/error.hpp"
#include "tcstruct/regrid.hpp"

#include <algorithm>
#include <cmath>

namespace tcs {

std::vector<Sample> build_samples(const std::vector<IrFrame>& frames, const StormTrack& track,
                                  const SampleBuildOptions& options,
                                  SampleBuildSummary* summary) {
    SampleBuildSummary local;
    SampleBuildSummary& sum = summary ? *summary : local;
    sum = SampleBuildSummary{};

    std::vector<Sample> samples;
    if (track.fixes.empty()) return samples;

    const std::int64_t cadence = static_cast<std::int64_t>(options.cadence_hours * 3600.0);
    const std::int64_t tolerance = static_cast<std::int64_t>(options.tolerance_minutes * 60.0);
    if (cadence <= 0) throw DataError("cadence must be positive");

    const std::int64_t first = track.fixes.front().time.secs;
    const std::int64_t last = track.fixes.back().time.secs;
    // First synoptic time at or after the first fix (cadence counted from 00Z).
    std::int64_t t0 = (first / cadence) * cadence;
    if (t0 < first) t0 += cadence;

    for (std::int64_t ts = t0; ts <= last; ts += cadence) {
        const UtcTime t{ts};
        const auto fix = std::find_if(track.fixes.begin(), track.fixes.end(),
                                      [&](const TrackFix& f) { return f.time == t; });
        if (fix == track.fixes.end() || !fix->vmax) {
            ++sum.skipped_no_vmax;
            continue;
        }

        // Nearest frame within the tolerance; earlier frame wins ties.
        const IrFrame* best = nullptr;
        std::int64_t best_dist = tolerance + 1;
        for (const IrFrame& frame : frames) {
            const std::int64_t dist = std::llabs(frame.valid_time - t);
            if (dist < best_dist) {
                best = &frame;
                best_dist = dist;
            }
        }
        if (!best) {
            ++sum.skipped_no_frame;
            continue;
        }

        // Frame times near the span edges may fall slightly outside the
        // track; clamp into the span before interpolating.
        UtcTime frame_time = best->valid_time;
        if (frame_time.secs < first) frame_time.secs = first;
        if (frame_time.secs > last) frame_time.secs = last;
        const LatLon center = interpolate_center(track, frame_time);
        Sample sample;
        sample.storm_id = track.storm_id;
        sample.time = t;
        sample.image = regrid_to_storm(*best, center, options.geom);
        sample.vmax = *fix->vmax;
        samples.push_back(std::move(sample));
        ++sum.emitted;
    }
    return samples;
}

} // namespace tcs
