#include "tcstruct/forecast.hpp"

#include "tcstruct/error.hpp"
#include "tcstruct/io.hpp"

#include <fstream>
#include <sstream>

namespace tcs {

void save_forecasts_csv(const std::vector<StructuralForecast>& forecasts,
                        const std::filesystem::path& path) {
    std::ostringstream out;
    const Eigen::Index k = forecasts.empty() ? 0 : forecasts.front().z_hat.size();
    const Eigen::Index d = forecasts.empty() ? 0 : forecasts.front().x_hat.size();
    out << "storm_id,issue_time,horizon_hours,pathway";
    for (Eigen::Index i = 0; i < k; ++i) out << ",z" << i;
    for (Eigen::Index i = 0; i < d; ++i) out << ",x" << i;
    out << "\n";
    for (const StructuralForecast& f : forecasts) {
        out << f.storm_id << ',' << format_iso8601(f.issue_time) << ',' << f.horizon_hours << ','
            << f.pathway;
        for (Eigen::Index i = 0; i < f.z_hat.size(); ++i) out << ',' << format_double(f.z_hat[i]);
        for (Eigen::Index i = 0; i < f.x_hat.size(); ++i) out << ',' << format_double(f.x_hat[i]);
        out << "\n";
    }
    write_file_atomic(path, out.str());
}

std::vector<StructuralForecast> load_forecasts_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty forecast CSV " + path.string());
    const std::vector<std::string> header = split_csv_line(line);
    Eigen::Index k = 0, d = 0;
    for (const std::string& h : header) {
        if (!h.empty() && h[0] == 'z') ++k;
        if (!h.empty() && h[0] == 'x') ++d;
    }

    std::vector<StructuralForecast> forecasts;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (static_cast<Eigen::Index>(f.size()) != 4 + k + d)
            throw ParseError("bad forecast row in " + path.string());
        StructuralForecast fc;
        fc.storm_id = f[0];
        fc.issue_time = parse_iso8601(f[1]);
        fc.horizon_hours = static_cast<int>(parse_long(f[2], "horizon"));
        fc.pathway = f[3].empty() ? '?' : f[3][0];
        fc.z_hat.resize(k);
        fc.x_hat.resize(d);
        for (Eigen::Index i = 0; i < k; ++i) fc.z_hat[i] = parse_double(f[4 + i], "forecast z");
        for (Eigen::Index i = 0; i < d; ++i) fc.x_hat[i] = parse_double(f[4 + k + i], "forecast x");
        forecasts.push_back(std::move(fc));
    }
    return forecasts;
}

} // namespace tcs
