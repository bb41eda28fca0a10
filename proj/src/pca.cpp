#include "tcstruct/pca.hpp"

#include "tcstruct/error.hpp"
#include "tcstruct/io.hpp"

#include <Eigen/SVD>
#include <json.hpp>

#include <fstream>

namespace tcs {

using nlohmann::json;

PcBasis fit_pca(const Eigen::MatrixXd& X, const RankRule& rule) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    if (n < 2) throw DataError("fit_pca needs at least 2 rows, got " + std::to_string(n));
    for (Eigen::Index i = 0; i < n; ++i)
        if (!X.row(i).allFinite())
            throw DataError("fit_pca: non-finite value in row " + std::to_string(i));

    PcBasis basis;
    basis.mean = X.colwise().mean();
    Eigen::MatrixXd Z = X.rowwise() - basis.mean.transpose();
    basis.scale = (Z.array().square().colwise().sum() / static_cast<double>(n)).sqrt();
    basis.scale = basis.scale.cwiseMax(1e-8);
    Z.array().rowwise() /= basis.scale.transpose().array();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(Z, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double total = sv.array().square().sum();

    const Eigen::Index max_rank = std::min<Eigen::Index>(n - 1, d);
    Eigen::Index k = 0;
    if (rule.kind == RankRule::Kind::FixedK) {
        if (rule.k < 1) throw DataError("fit_pca: fixed rank must be >= 1");
        k = std::min<Eigen::Index>(rule.k, max_rank);
    } else {
        double cum = 0.0;
        for (k = 0; k < max_rank; ) {
            cum += sv[k] * sv[k];
            ++k;
            if (total <= 0.0 || cum / total >= rule.fraction) break;
        }
        if (k == 0) k = 1;
    }

    basis.components = svd.matrixV().leftCols(k).transpose();
    basis.singular_values = sv.head(k);
    basis.explained_fraction.resize(k);
    double cum = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        cum += sv[i] * sv[i];
        basis.explained_fraction[i] = total > 0.0 ? cum / total : 1.0;
    }

    // Sign convention: the largest-magnitude entry of each component is
    // positive; ties resolve to the lowest index.
    for (Eigen::Index i = 0; i < k; ++i) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            const double a = std::abs(basis.components(i, j));
            if (a > best) {
                best = a;
                arg = j;
            }
        }
        if (basis.components(i, arg) < 0.0) basis.components.row(i) *= -1.0;
    }
    return basis;
}

Eigen::VectorXd pca_project(const PcBasis& basis, const Eigen::VectorXd& x) {
    if (x.size() != basis.mean.size())
        throw DataError("pca_project: expected length " + std::to_string(basis.mean.size()) +
                        ", got " + std::to_string(x.size()));
    return basis.components * ((x - basis.mean).cwiseQuotient(basis.scale));
}

Eigen::VectorXd pca_reconstruct(const PcBasis& basis, const Eigen::VectorXd& z) {
    if (z.size() != basis.components.rows())
        throw DataError("pca_reconstruct: expected length " +
                        std::to_string(basis.components.rows()) + ", got " +
                        std::to_string(z.size()));
    return basis.mean + (basis.components.transpose() * z).cwiseProduct(basis.scale);
}

Eigen::MatrixXd pca_project_rows(const PcBasis& basis, const Eigen::MatrixXd& X) {
    if (X.cols() != basis.mean.size())
        throw DataError("pca_project_rows: column count mismatch");
    Eigen::MatrixXd Z = X.rowwise() - basis.mean.transpose();
    Z.array().rowwise() /= basis.scale.transpose().array();
    return Z * basis.components.transpose();
}

namespace {

void append_matrix_block(std::ostream& out, const Eigen::MatrixXd& m) {
    std::vector<float> buf(static_cast<std::size_t>(m.rows()) * m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            buf[static_cast<std::size_t>(i) * m.cols() + j] = static_cast<float>(m(i, j));
    write_tcir1_block(out, static_cast<std::uint32_t>(m.cols()),
                      static_cast<std::uint32_t>(m.rows()), buf.data());
}

Eigen::MatrixXd read_matrix_block(std::istream& in, const std::string& name) {
    std::uint32_t w = 0, h = 0;
    std::vector<float> buf;
    read_tcir1_block(in, w, h, buf, name);
    Eigen::MatrixXd m(h, w);
    for (std::uint32_t i = 0; i < h; ++i)
        for (std::uint32_t j = 0; j < w; ++j) m(i, j) = buf[static_cast<std::size_t>(i) * w + j];
    return m;
}

} // namespace

void save_pc_basis(const PcBasis& basis, const std::filesystem::path& stem) {
    json meta;
    meta["d"] = basis.d();
    meta["k"] = basis.k();
    meta["singular_values"] = std::vector<double>(
        basis.singular_values.data(), basis.singular_values.data() + basis.singular_values.size());
    meta["explained_fraction"] =
        std::vector<double>(basis.explained_fraction.data(),
                            basis.explained_fraction.data() + basis.explained_fraction.size());
    write_file_atomic(stem.string() + ".json", meta.dump(2) + "\n");

    std::ostringstream bin(std::ios::binary);
    append_matrix_block(bin, basis.mean.transpose());
    append_matrix_block(bin, basis.scale.transpose());
    append_matrix_block(bin, basis.components);
    write_file_atomic(stem.string() + ".bin", bin.str());
}

PcBasis load_pc_basis(const std::filesystem::path& stem) {
    const std::string bin_path = stem.string() + ".bin";
    std::ifstream in(bin_path, std::ios::binary);
    if (!in) throw Error("cannot open " + bin_path);
    PcBasis basis;
    basis.mean = read_matrix_block(in, bin_path).row(0);
    basis.scale = read_matrix_block(in, bin_path).row(0);
    basis.components = read_matrix_block(in, bin_path);

    json meta;
    try {
        meta = json::parse(read_file(stem.string() + ".json"));
    } catch (const json::exception& e) {
        throw ParseError("bad basis metadata " + stem.string() + ".json: " + e.what());
    }
    const auto sv = meta.at("singular_values").get<std::vector<double>>();
    const auto ef = meta.at("explained_fraction").get<std::vector<double>>();
    basis.singular_values = Eigen::Map<const Eigen::VectorXd>(sv.data(), sv.size());
    basis.explained_fraction = Eigen::Map<const Eigen::VectorXd>(ef.data(), ef.size());
    return basis;
}

} // namespace tcs
