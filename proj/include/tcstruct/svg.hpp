#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tcs {

struct SvgSeries {
    std::string name;
    std::vector<double> xs;
    std::vector<double> ys;
};

// Minimal deterministic line-plot writer (axes, polylines, legend). These
// plots are diagnostics only; nothing downstream reads them.
void write_svg_line_plot(const std::filesystem::path& path, const std::string& title,
                         const std::vector<SvgSeries>& series, const std::string& x_label,
                         const std::string& y_label);

} // namespace tcs
