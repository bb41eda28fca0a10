#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <vector>

namespace tcs {

// Vector autoregression z_t = b + sum_i A_i z_{t-i} + e_t, fitted by ridge
// least squares pooled across sequences.
struct VarModel {
    int order = 1;
    std::vector<Eigen::MatrixXd> coeffs; // A_1..A_p, each k x k
    Eigen::VectorXd intercept;           // length k
    double ridge = 0.0;
    Eigen::VectorXd resid_var;           // training residual variance, per coordinate

    int dim() const { return static_cast<int>(intercept.size()); }
    // Frobenius norm over [A_1..A_p]; non-increasing in the ridge weight.
    double coeff_norm() const;
};

// Each sequence is a T x k matrix with rows in time order. Lags never cross
// sequence boundaries; the intercept is not penalized. Throws DataError when
// any sequence is shorter than p+1 rows or dimensions disagree.
VarModel fit_var(const std::vector<Eigen::MatrixXd>& series, int order, double ridge);

// Iterated one-step prediction feeding forecasts back as lags. history holds
// at least p rows (the trailing p are used); returns steps x k.
Eigen::MatrixXd forecast_var(const VarModel& model, const Eigen::MatrixXd& history, int steps);

// Repeats the last element of a non-empty history.
template <typename T>
std::vector<T> persistence_forecast(const std::vector<T>& history, int steps);

void save_var_model(const VarModel& model, const std::filesystem::path& stem);
VarModel load_var_model(const std::filesystem::path& stem);

} // namespace tcs
