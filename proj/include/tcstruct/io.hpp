#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tcs {

// --- small string utilities shared by the parsers ---

std::string_view trim(std::string_view s);
std::vector<std::string> split_csv_line(const std::string& line); // fields trimmed
double parse_double(std::string_view s, const std::string& context);
long parse_long(std::string_view s, const std::string& context);

// Shortest round-trip decimal rendering (std::to_chars); the one float
// format used in every CSV/JSON we emit so that reruns are byte-stable.
std::string format_double(double v);

// --- TCIR1 binary blocks ---
//
// Layout (little-endian): magic "TCIR1\0", width u32, height u32, then
// height*width IEEE-754 binary32 values in row-major order. Missing values
// are encoded as quiet NaN. Frame files hold exactly one block; model
// files concatenate several.

inline constexpr char kTcir1Magic[6] = {'T', 'C', 'I', 'R', '1', '\0'};

void write_tcir1_block(std::ostream& out, std::uint32_t width, std::uint32_t height,
                       const float* data);
// Throws ParseError naming `name` on bad magic or short payload.
void read_tcir1_block(std::istream& in, std::uint32_t& width, std::uint32_t& height,
                      std::vector<float>& data, const std::string& name);

void write_tcir1_file(const std::filesystem::path& path, std::uint32_t width,
                      std::uint32_t height, const float* data);
void read_tcir1_file(const std::filesystem::path& path, std::uint32_t& width,
                     std::uint32_t& height, std::vector<float>& data);

// --- atomic whole-file writes (temp file + rename) ---

void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

} // namespace tcs
