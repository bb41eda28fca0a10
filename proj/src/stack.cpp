#include "tcstruct/stack.hpp"

#include "tcstruct/error.hpp"
#include "tcstruct/io.hpp"

#include <json.hpp>

#include <cstdio>

namespace tcs {

using nlohmann::json;

std::vector<IrFrame> read_ir_stack(const std::filesystem::path& manifest_path) {
    json doc;
    try {
        doc = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
        throw ParseError("bad stack manifest " + manifest_path.string() + ": " + e.what());
    }

    std::vector<IrFrame> frames;
    const std::filesystem::path base = manifest_path.parent_path();
    try {
        const std::string channel = doc.value("channel", std::string("IR ~10.7um"));
        for (const json& entry : doc.at("frames")) {
            IrFrame frame;
            frame.channel = channel;
            frame.valid_time = parse_iso8601(entry.at("valid_time").get<std::string>());
            frame.origin_lat = entry.at("origin_lat").get<double>();
            frame.origin_lon = entry.at("origin_lon").get<double>();
            frame.step_deg = entry.at("step_deg").get<double>();
            frame.width = entry.at("width").get<int>();
            frame.height = entry.at("height").get<int>();

            const std::filesystem::path file = base / entry.at("file").get<std::string>();
            std::uint32_t w = 0, h = 0;
            read_tcir1_file(file, w, h, frame.temps);
            if (static_cast<int>(w) != frame.width || static_cast<int>(h) != frame.height)
                throw DataError("frame " + file.string() + ": file is " + std::to_string(w) + "x" +
                                std::to_string(h) + " but manifest declares " +
                                std::to_string(frame.width) + "x" + std::to_string(frame.height));
            validate_frame(frame, file.string());

            if (!frames.empty()) {
                if (frame.valid_time == frames.back().valid_time)
                    throw DataError("duplicate valid_time " + format_iso8601(frame.valid_time) +
                                    " at frame " + file.string());
                if (frame.valid_time < frames.back().valid_time)
                    throw DataError("manifest " + manifest_path.string() +
                                    " frames out of order at " + file.string());
            }
            frames.push_back(std::move(frame));
        }
    } catch (const json::exception& e) {
        throw ParseError("bad stack manifest " + manifest_path.string() + ": " + e.what());
    }
    return frames;
}

std::filesystem::path write_ir_stack(const std::filesystem::path& dir, const std::string& storm_id,
                                     const std::vector<IrFrame>& frames) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["storm_id"] = storm_id;
    manifest["channel"] = frames.empty() ? "IR ~10.7um" : frames.front().channel;
    manifest["frames"] = json::array();
    char name[64];
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const IrFrame& frame = frames[i];
        std::snprintf(name, sizeof name, "%s_%04zu.tcir1", storm_id.c_str(), i);
        write_tcir1_file(dir / name, static_cast<std::uint32_t>(frame.width),
                         static_cast<std::uint32_t>(frame.height), frame.temps.data());
        json entry;
        entry["file"] = name;
        entry["valid_time"] = format_iso8601(frame.valid_time);
        entry["origin_lat"] = frame.origin_lat;
        entry["origin_lon"] = frame.origin_lon;
        entry["step_deg"] = frame.step_deg;
        entry["width"] = frame.width;
        entry["height"] = frame.height;
        manifest["frames"].push_back(std::move(entry));
    }
    const std::filesystem::path manifest_path = dir / (storm_id + "_stack.json");
    write_file_atomic(manifest_path, manifest.dump(2) + "\n");
    return manifest_path;
}

} // namespace tcs
