#pragma once

#include "tcstruct/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tcs {

// Pipeline stages. Each stage reads only the run config and files persisted
// under `out` by earlier stages, and persists its own outputs atomically, so
// re-running any stage from the same intermediates reproduces its outputs
// byte for byte. `run_pipeline` is exactly the composition below plus the
// run manifest and DONE sentinel.

void stage_synth(const RunConfig& config, const std::filesystem::path& out);
void stage_ingest(const RunConfig& config, const std::filesystem::path& out);
void stage_extract(const RunConfig& config, const std::filesystem::path& out);
// what: pca | var | imagedyn | gam | lasso
void stage_fit(const RunConfig& config, const std::filesystem::path& out, const std::string& what);
// pathway: 'a' | 'b' | 'p'
void stage_forecast(const RunConfig& config, const std::filesystem::path& out, char pathway,
                    const std::vector<int>& horizons);
void stage_evaluate(const RunConfig& config, const std::filesystem::path& out);
void stage_cluster(const RunConfig& config, const std::filesystem::path& out);
void stage_analogs(const RunConfig& config, const std::filesystem::path& out);

void run_pipeline(const RunConfig& config, const std::filesystem::path& out);

inline constexpr const char* kVersion = "0.1.0";

} // namespace tcs
