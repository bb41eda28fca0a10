#include "tcstruct/var.hpp"

#include "tcstruct/error.hpp"
#include "tcstruct/io.hpp"

#include <Eigen/Cholesky>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace tcs {

using nlohmann::json;

double VarModel::coeff_norm() const {
    double s = 0.0;
    for (const Eigen::MatrixXd& a : coeffs) s += a.squaredNorm();
    return std::sqrt(s);
}

VarModel fit_var(const std::vector<Eigen::MatrixXd>& series, int order, double ridge) {
    if (order < 1) throw DataError("fit_var: order must be >= 1");
    if (series.empty()) throw DataError("fit_var: no sequences");
    const Eigen::Index k = series.front().cols();
    Eigen::Index n_rows = 0;
    for (const Eigen::MatrixXd& s : series) {
        if (s.cols() != k) throw DataError("fit_var: sequence dimension mismatch");
        if (s.rows() < order + 1)
            throw DataError("fit_var: sequence of length " + std::to_string(s.rows()) +
                            " is too short for order " + std::to_string(order));
        n_rows += s.rows() - order;
    }

    const Eigen::Index m = 1 + order * k; // intercept + stacked lags
    Eigen::MatrixXd U(n_rows, m);
    Eigen::MatrixXd Y(n_rows, k);
    Eigen::Index r = 0;
    for (const Eigen::MatrixXd& s : series) {
        for (Eigen::Index t = order; t < s.rows(); ++t, ++r) {
            U(r, 0) = 1.0;
            for (int lag = 1; lag <= order; ++lag)
                U.block(r, 1 + (lag - 1) * k, 1, k) = s.row(t - lag);
            Y.row(r) = s.row(t);
        }
    }

    Eigen::MatrixXd gram = U.transpose() * U;
    for (Eigen::Index i = 1; i < m; ++i) gram(i, i) += ridge; // intercept unpenalized
    const Eigen::MatrixXd W = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(U.transpose() * Y);

    VarModel model;
    model.order = order;
    model.ridge = ridge;
    model.intercept = W.row(0);
    model.coeffs.reserve(order);
    for (int lag = 1; lag <= order; ++lag)
        model.coeffs.push_back(W.block(1 + (lag - 1) * k, 0, k, k).transpose());

    const Eigen::MatrixXd resid = Y - U * W;
    model.resid_var =
        (resid.array().square().colwise().sum() / static_cast<double>(n_rows)).matrix();
    return model;
}

Eigen::MatrixXd forecast_var(const VarModel& model, const Eigen::MatrixXd& history, int steps) {
    const int p = model.order;
    const int k = model.dim();
    if (history.cols() != k) throw DataError("forecast_var: history dimension mismatch");
    if (history.rows() < p)
        throw DataError("forecast_var: need at least " + std::to_string(p) +
                        " history rows, got " + std::to_string(history.rows()));
    if (steps < 0) throw DataError("forecast_var: negative step count");

    // Rolling lag buffer: row 0 is the most recent state.
    Eigen::MatrixXd lags(p, k);
    for (int i = 0; i < p; ++i) lags.row(i) = history.row(history.rows() - 1 - i);

    Eigen::MatrixXd out(steps, k);
    for (int s = 0; s < steps; ++s) {
        Eigen::VectorXd z = model.intercept;
        for (int lag = 1; lag <= p; ++lag) z += model.coeffs[lag - 1] * lags.row(lag - 1).transpose();
        out.row(s) = z;
        for (int i = p - 1; i > 0; --i) lags.row(i) = lags.row(i - 1);
        lags.row(0) = z;
    }
    return out;
}

template <typename T>
std::vector<T> persistence_forecast(const std::vector<T>& history, int steps) {
    if (history.empty()) throw DataError("persistence_forecast: empty history");
    if (steps < 0) throw DataError("persistence_forecast: negative step count");
    return std::vector<T>(static_cast<std::size_t>(steps), history.back());
}

template std::vector<double> persistence_forecast(const std::vector<double>&, int);
template std::vector<Eigen::VectorXd> persistence_forecast(const std::vector<Eigen::VectorXd>&,
                                                           int);

namespace {

void append_block(std::ostream& out, const Eigen::MatrixXd& m) {
    std::vector<float> buf(static_cast<std::size_t>(m.rows()) * m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            buf[static_cast<std::size_t>(i) * m.cols() + j] = static_cast<float>(m(i, j));
    write_tcir1_block(out, static_cast<std::uint32_t>(m.cols()),
                      static_cast<std::uint32_t>(m.rows()), buf.data());
}

} // namespace

void save_var_model(const VarModel& model, const std::filesystem::path& stem) {
    json meta;
    meta["order"] = model.order;
    meta["k"] = model.dim();
    meta["ridge"] = model.ridge;
    meta["intercept"] = std::vector<double>(model.intercept.data(),
                                            model.intercept.data() + model.intercept.size());
    meta["resid_var"] = std::vector<double>(model.resid_var.data(),
                                            model.resid_var.data() + model.resid_var.size());
    write_file_atomic(stem.string() + ".json", meta.dump(2) + "\n");

    std::ostringstream bin(std::ios::binary);
    for (const Eigen::MatrixXd& a : model.coeffs) append_block(bin, a);
    write_file_atomic(stem.string() + ".bin", bin.str());
}

VarModel load_var_model(const std::filesystem::path& stem) {
    json meta;
    try {
        meta = json::parse(read_file(stem.string() + ".json"));
    } catch (const json::exception& e) {
        throw ParseError("bad VAR metadata " + stem.string() + ".json: " + e.what());
    }
    VarModel model;
    model.order = meta.at("order").get<int>();
    model.ridge = meta.at("ridge").get<double>();
    const auto b = meta.at("intercept").get<std::vector<double>>();
    const auto rv = meta.at("resid_var").get<std::vector<double>>();
    model.intercept = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
    model.resid_var = Eigen::Map<const Eigen::VectorXd>(rv.data(), rv.size());

    const std::string bin_path = stem.string() + ".bin";
    std::ifstream in(bin_path, std::ios::binary);
    if (!in) throw Error("cannot open " + bin_path);
    for (int lag = 0; lag < model.order; ++lag) {
        std::uint32_t w = 0, h = 0;
        std::vector<float> buf;
        read_tcir1_block(in, w, h, buf, bin_path);
        Eigen::MatrixXd a(h, w);
        for (std::uint32_t i = 0; i < h; ++i)
            for (std::uint32_t j = 0; j < w; ++j)
                a(i, j) = buf[static_cast<std::size_t>(i) * w + j];
        model.coeffs.push_back(std::move(a));
    }
    return model;
}

} // namespace tcs
