#pragma once

#include "tcstruct/image.hpp"
#include "tcstruct/pca.hpp"
#include "tcstruct/var.hpp"

#include <filesystem>
#include <vector>

namespace tcs {

// Linear latent image dynamics: PCA over flattened centered images followed
// by a VAR in the image-latent space. This is the imagery-forecast pathway;
// callers extract ORB functions from the forecast frames.
struct ImageDynamicsModel {
    PcBasis image_basis; // fitted on flattened images
    VarModel dynamics;   // dimension == image_basis.k()
    int side = 0;        // training grid geometry
    double half_width_km = 0.0;
    double step_km = 0.0;
};

// Missing pixels are imputed to the per-image non-missing mean before
// flattening. Throws DataError for mixed grids or sequences shorter than
// order+1.
ImageDynamicsModel fit_image_dynamics(const std::vector<std::vector<CenteredImage>>& sequences,
                                      int latent_rank, int order, double ridge);

// Projects the trailing history into latent space, steps the VAR, and
// reconstructs frames. Output temperatures are clamped to [150, 340] K;
// frames inherit the last history frame's center and valid_time.
std::vector<CenteredImage> forecast_images(const ImageDynamicsModel& model,
                                           const std::vector<CenteredImage>& history, int steps);

// Row vector of pixel temperatures with missing pixels imputed to the
// image's non-missing mean.
Eigen::VectorXd flatten_image(const CenteredImage& img);

void save_image_dynamics(const ImageDynamicsModel& model, const std::filesystem::path& stem);
ImageDynamicsModel load_image_dynamics(const std::filesystem::path& stem);

} // namespace tcs
