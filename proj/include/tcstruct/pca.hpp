#pragma once

#include <Eigen/Core>

#include <filesystem>

namespace tcs {

// Fitted principal-component basis over standardized coordinates.
// components has k orthonormal rows; all latent-space distances downstream
// are in these standardized units.
struct PcBasis {
    Eigen::VectorXd mean;               // length d
    Eigen::VectorXd scale;              // length d, floored at 1e-8
    Eigen::MatrixXd components;         // k x d
    Eigen::VectorXd singular_values;    // length k, non-increasing
    Eigen::VectorXd explained_fraction; // length k, cumulative

    int d() const { return static_cast<int>(mean.size()); }
    int k() const { return static_cast<int>(components.rows()); }
};

struct RankRule {
    enum class Kind { FixedK, VarianceFraction };
    Kind kind = Kind::VarianceFraction;
    int k = 0;
    double fraction = 0.95;

    static RankRule fixed(int k) { return {Kind::FixedK, k, 0.0}; }
    static RankRule variance(double f) { return {Kind::VarianceFraction, 0, f}; }
};

// Columns are standardized by (mean, scale) before the SVD. The retained
// rank is the fixed k (clamped to min(n-1, d)) or the smallest k whose
// cumulative explained variance reaches the requested fraction. Component
// signs follow a fixed convention (largest-magnitude entry positive, ties
// to the lowest index) so identical bytes in give identical bases out.
PcBasis fit_pca(const Eigen::MatrixXd& X, const RankRule& rule);

Eigen::VectorXd pca_project(const PcBasis& basis, const Eigen::VectorXd& x);
Eigen::VectorXd pca_reconstruct(const PcBasis& basis, const Eigen::VectorXd& z);
// Row-wise projection of an n x d matrix to n x k.
Eigen::MatrixXd pca_project_rows(const PcBasis& basis, const Eigen::MatrixXd& X);

// Persistence: <stem>.json (dimensions, singular values, explained
// fractions) plus <stem>.bin holding mean/scale/components as consecutive
// TCIR1-style binary32 blocks. Reloading therefore quantizes the basis to
// binary32; fitted-basis tolerances (orthonormality etc.) apply to the
// in-memory result of fit_pca.
void save_pc_basis(const PcBasis& basis, const std::filesystem::path& stem);
PcBasis load_pc_basis(const std::filesystem::path& stem);

} // namespace tcs
