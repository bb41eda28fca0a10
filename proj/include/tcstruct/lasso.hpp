#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <vector>

namespace tcs {

// L1-penalized logistic regression fitted on internally standardized
// features (training mean/scale are stored with the model, so predictions
// are invariant under affine rescaling of any input column).
struct LassoModel {
    Eigen::VectorXd weights; // on standardized features
    double intercept = 0.0;
    double lambda = 0.0;
    Eigen::VectorXd feat_mean;
    Eigen::VectorXd feat_scale;
    std::vector<double> objective_history; // penalized objective per iteration

    int n_nonzero() const;
};

// Minimizes mean logistic loss + lambda * sum |w_j| (intercept unpenalized)
// by proximal gradient with backtracking; weights start at zero and the
// intercept at the base-rate logit. Stops when the objective decrease falls
// below 1e-10 or after 10,000 iterations. Labels must contain both classes
// unless allow_single_class is set, in which case the fit degenerates to an
// intercept-only model at the +/-40 logit surrogate.
LassoModel fit_logistic_lasso(const Eigen::MatrixXd& X, const std::vector<bool>& labels,
                              double lambda, bool allow_single_class = false);

// Smallest lambda for which every weight is zero at the optimum:
// max_j |mean_i x_std_ij (base_rate - y_i)|.
double lasso_lambda_max(const Eigen::MatrixXd& X, const std::vector<bool>& labels);

double predict_ri(const LassoModel& model, const Eigen::VectorXd& features);

void save_lasso_model(const LassoModel& model, const std::filesystem::path& path);
LassoModel load_lasso_model(const std::filesystem::path& path);

} // namespace tcs
