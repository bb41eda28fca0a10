#pragma once

#include "tcstruct/image.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tcs {

// Reads a stack manifest ({"storm_id", "channel", "frames": [...]}) and the
// TCIR1 frame files it references. Frames must already be listed in strictly
// increasing valid_time order; every error names the offending file.
std::vector<IrFrame> read_ir_stack(const std::filesystem::path& manifest_path);

// Writes frames as TCIR1 files plus a manifest next to them. Frame files are
// named <storm_id>_NNNN.tcir1 in time order.
std::filesystem::path write_ir_stack(const std::filesystem::path& dir, const std::string& storm_id,
                                     const std::vector<IrFrame>& frames);

} // namespace tcs
