#include "tcstruct/image_dynamics.hpp"

#include "tcstruct/error.hpp"
#include "tcstruct/io.hpp"

#include <json.hpp>

#include <algorithm>

namespace tcs {

using nlohmann::json;

Eigen::VectorXd flatten_image(const CenteredImage& img) {
    const std::size_t n = img.temps.size();
    double sum = 0.0;
    std::size_t valid = 0;
    for (float v : img.temps) {
        if (!is_missing(v)) {
            sum += v;
            ++valid;
        }
    }
    if (valid == 0) throw DataError("flatten_image: image entirely missing");
    const double fill = sum / static_cast<double>(valid);

    Eigen::VectorXd out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = is_missing(img.temps[i]) ? fill : img.temps[i];
    return out;
}

ImageDynamicsModel fit_image_dynamics(const std::vector<std::vector<CenteredImage>>& sequences,
                                      int latent_rank, int order, double ridge) {
    if (latent_rank < 1) throw DataError("fit_image_dynamics: latent rank must be >= 1");
    if (sequences.empty() || sequences.front().empty())
        throw DataError("fit_image_dynamics: no images");

    const CenteredImage& ref = sequences.front().front();
    std::size_t n_images = 0;
    for (const auto& seq : sequences) {
        for (const CenteredImage& img : seq)
            if (img.side != ref.side || img.step_km != ref.step_km)
                throw DataError("fit_image_dynamics: mixed grid geometries");
        n_images += seq.size();
    }

    const std::size_t npix = ref.temps.size();
    Eigen::MatrixXd flat(n_images, npix);
    std::size_t r = 0;
    for (const auto& seq : sequences)
        for (const CenteredImage& img : seq) flat.row(r++) = flatten_image(img);

    ImageDynamicsModel model;
    model.image_basis = fit_pca(flat, RankRule::fixed(latent_rank));
    model.side = ref.side;
    model.half_width_km = ref.half_width_km;
    model.step_km = ref.step_km;

    std::vector<Eigen::MatrixXd> latent;
    latent.reserve(sequences.size());
    r = 0;
    for (const auto& seq : sequences) {
        Eigen::MatrixXd z = pca_project_rows(model.image_basis,
                                             flat.middleRows(r, seq.size()));
        r += seq.size();
        latent.push_back(std::move(z));
    }
    model.dynamics = fit_var(latent, order, ridge);
    return model;
}

std::vector<CenteredImage> forecast_images(const ImageDynamicsModel& model,
                                           const std::vector<CenteredImage>& history, int steps) {
    if (history.empty()) throw DataError("forecast_images: empty history");
    for (const CenteredImage& img : history)
        if (img.side != model.side || img.step_km != model.step_km)
            throw DataError("forecast_images: history grid does not match training geometry");

    const int p = model.dynamics.order;
    if (static_cast<int>(history.size()) < p)
        throw DataError("forecast_images: need at least " + std::to_string(p) + " history frames");

    Eigen::MatrixXd hist_latent(history.size(), model.image_basis.k());
    for (std::size_t i = 0; i < history.size(); ++i)
        hist_latent.row(i) = pca_project(model.image_basis, flatten_image(history[i]));

    const Eigen::MatrixXd z = forecast_var(model.dynamics, hist_latent, steps);

    std::vector<CenteredImage> out;
    out.reserve(steps);
    const CenteredImage& last = history.back();
    for (int s = 0; s < steps; ++s) {
        CenteredImage img = make_centered_image(GridGeom{model.half_width_km, model.step_km},
                                                last.center_lat, last.center_lon, last.valid_time);
        const Eigen::VectorXd pix = pca_reconstruct(model.image_basis, z.row(s));
        for (std::size_t i = 0; i < img.temps.size(); ++i)
            img.temps[i] = std::clamp(static_cast<float>(pix[i]), kMinTempK, kMaxTempK);
        out.push_back(std::move(img));
    }
    return out;
}

void save_image_dynamics(const ImageDynamicsModel& model, const std::filesystem::path& stem) {
    json meta;
    meta["side"] = model.side;
    meta["half_width_km"] = model.half_width_km;
    meta["step_km"] = model.step_km;
    write_file_atomic(stem.string() + ".geom.json", meta.dump(2) + "\n");
    save_pc_basis(model.image_basis, stem.string() + ".basis");
    save_var_model(model.dynamics, stem.string() + ".var");
}

ImageDynamicsModel load_image_dynamics(const std::filesystem::path& stem) {
    ImageDynamicsModel model;
    json meta;
    try {
        meta = json::parse(read_file(stem.string() + ".geom.json"));
    } catch (const json::exception& e) {
        throw ParseError("bad image-dynamics metadata: " + std::string(e.what()));
    }
    model.side = meta.at("side").get<int>();
    model.half_width_km = meta.at("half_width_km").get<double>();
    model.step_km = meta.at("step_km").get<double>();
    model.image_basis = load_pc_basis(stem.string() + ".basis");
    model.dynamics = load_var_model(stem.string() + ".var");
    return model;
}

} // namespace tcs
