#include "tcstruct/io.hpp"

#include "tcstruct/error.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tcs {

std::string_view trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.emplace_back(trim(std::string_view(line).substr(start, i - start)));
            start = i + 1;
        }
    }
    return fields;
}

double parse_double(std::string_view s, const std::string& context) {
    s = trim(s);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("bad numeric field '" + std::string(s) + "' in " + context);
    return v;
}

long parse_long(std::string_view s, const std::string& context) {
    s = trim(s);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("bad integer field '" + std::string(s) + "' in " + context);
    return v;
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

namespace {

void put_u32_le(std::ostream& out, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

std::uint32_t get_u32_le(std::istream& in, const std::string& name) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4) throw ParseError("truncated TCIR1 header in " + name);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

} // namespace

void write_tcir1_block(std::ostream& out, std::uint32_t width, std::uint32_t height,
                       const float* data) {
    out.write(kTcir1Magic, 6);
    put_u32_le(out, width);
    put_u32_le(out, height);
    // This code only targets little-endian IEEE hosts; write floats raw.
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(sizeof(float) * width * height));
}

void read_tcir1_block(std::istream& in, std::uint32_t& width, std::uint32_t& height,
                      std::vector<float>& data, const std::string& name) {
    char magic[6];
    in.read(magic, 6);
    if (in.gcount() != 6 || std::memcmp(magic, kTcir1Magic, 6) != 0)
        throw ParseError("bad TCIR1 magic in " + name);
    width = get_u32_le(in, name);
    height = get_u32_le(in, name);
    const std::size_t n = static_cast<std::size_t>(width) * height;
    data.resize(n);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(n * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != n * sizeof(float))
        throw ParseError("truncated TCIR1 payload in " + name + " (expected " +
                         std::to_string(n * sizeof(float)) + " bytes)");
}

void write_tcir1_file(const std::filesystem::path& path, std::uint32_t width,
                      std::uint32_t height, const float* data) {
    std::ostringstream buf(std::ios::binary);
    write_tcir1_block(buf, width, height, data);
    write_file_atomic(path, buf.str());
}

void read_tcir1_file(const std::filesystem::path& path, std::uint32_t& width,
                     std::uint32_t& height, std::vector<float>& data) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open frame file " + path.string());
    read_tcir1_block(in, width, height, data, path.string());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace tcs
