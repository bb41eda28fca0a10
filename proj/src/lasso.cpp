#include "tcstruct/lasso.hpp"

#include "tcstruct/error.hpp"
#include "tcstruct/io.hpp"

#include <json.hpp>

#include <cmath>

namespace tcs {

using nlohmann::json;

namespace {

// log(1 + exp(s)) - y*s, evaluated without overflow.
double logistic_term(double s, double y) {
    const double softplus = s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
    return softplus - y * s;
}

double sigmoid(double s) {
    return s >= 0.0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
}

struct Standardized {
    Eigen::MatrixXd X;
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
};

Standardized standardize(const Eigen::MatrixXd& X) {
    Standardized s;
    const double n = static_cast<double>(X.rows());
    s.mean = X.colwise().mean();
    Eigen::MatrixXd centered = X.rowwise() - s.mean.transpose();
    s.scale = (centered.array().square().colwise().sum() / n).sqrt();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j)
        if (s.scale[j] <= 0.0) s.scale[j] = 1.0; // constant column stays centered at 0
    centered.array().rowwise() /= s.scale.transpose().array();
    s.X = std::move(centered);
    return s;
}

double mean_loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                 double b) {
    const Eigen::VectorXd score = X * w + Eigen::VectorXd::Constant(X.rows(), b);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) loss += logistic_term(score[i], y[i]);
    return loss / static_cast<double>(X.rows());
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

} // namespace

int LassoModel::n_nonzero() const {
    int c = 0;
    for (Eigen::Index j = 0; j < weights.size(); ++j)
        if (weights[j] != 0.0) ++c;
    return c;
}

double lasso_lambda_max(const Eigen::MatrixXd& X, const std::vector<bool>& labels) {
    const Standardized s = standardize(X);
    const Eigen::Index n = X.rows();
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[i] ? 1.0 : 0.0;
    const double rate = y.mean();
    const Eigen::VectorXd grad = s.X.transpose() * (Eigen::VectorXd::Constant(n, rate) - y) /
                                 static_cast<double>(n);
    return grad.cwiseAbs().maxCoeff();
}

LassoModel fit_logistic_lasso(const Eigen::MatrixXd& X, const std::vector<bool>& labels,
                              double lambda, bool allow_single_class) {
    const Eigen::Index n = X.rows();
    const Eigen::Index q = X.cols();
    if (static_cast<Eigen::Index>(labels.size()) != n)
        throw DataError("fit_logistic_lasso: label/row count mismatch");
    if (n == 0) throw DataError("fit_logistic_lasso: empty design");
    if (lambda < 0.0) throw DataError("fit_logistic_lasso: negative lambda");

    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[i] ? 1.0 : 0.0;
    const double rate = y.mean();

    LassoModel model;
    model.lambda = lambda;
    const Standardized s = standardize(X);
    model.feat_mean = s.mean;
    model.feat_scale = s.scale;
    model.weights = Eigen::VectorXd::Zero(q);

    if (rate <= 0.0 || rate >= 1.0) {
        if (!allow_single_class)
            throw DataError("fit_logistic_lasso: labels are single-class; intercept-only logit "
                            "undefined (pass allow_single_class to force)");
        model.intercept = rate >= 1.0 ? 40.0 : -40.0;
        model.objective_history.push_back(mean_loss(s.X, y, model.weights, model.intercept));
        return model;
    }

    double b = std::log(rate / (1.0 - rate)); // base-rate logit start
    Eigen::VectorXd w = Eigen::VectorXd::Zero(q);
    double step = 1.0;
    double obj = mean_loss(s.X, y, w, b) + lambda * w.cwiseAbs().sum();
    model.objective_history.push_back(obj);

    for (int iter = 0; iter < 10000; ++iter) {
        const Eigen::VectorXd score = s.X * w + Eigen::VectorXd::Constant(n, b);
        Eigen::VectorXd resid(n);
        for (Eigen::Index i = 0; i < n; ++i) resid[i] = sigmoid(score[i]) - y[i];
        const Eigen::VectorXd grad_w = s.X.transpose() * resid / static_cast<double>(n);
        const double grad_b = resid.mean();
        const double smooth = mean_loss(s.X, y, w, b);

        // Backtracking line search on the smooth part.
        step *= 2.0; // allow recovery after conservative steps
        Eigen::VectorXd w_next;
        double b_next = b;
        for (;;) {
            w_next = w - step * grad_w;
            for (Eigen::Index j = 0; j < q; ++j)
                w_next[j] = soft_threshold(w_next[j], step * lambda);
            b_next = b - step * grad_b;
            const Eigen::VectorXd dw = w_next - w;
            const double db = b_next - b;
            const double quad = smooth + grad_w.dot(dw) + grad_b * db +
                                (dw.squaredNorm() + db * db) / (2.0 * step);
            if (mean_loss(s.X, y, w_next, b_next) <= quad + 1e-15) break;
            step *= 0.5;
            if (step < 1e-12) break;
        }

        const double obj_next = mean_loss(s.X, y, w_next, b_next) + lambda * w_next.cwiseAbs().sum();
        const double decrease = obj - obj_next;
        if (obj_next <= obj) {
            w = w_next;
            b = b_next;
            obj = obj_next;
            model.objective_history.push_back(obj);
        }
        if (decrease < 1e-10) break;
    }

    model.weights = w;
    model.intercept = b;
    return model;
}

double predict_ri(const LassoModel& model, const Eigen::VectorXd& features) {
    if (features.size() != model.weights.size())
        throw DataError("predict_ri: expected " + std::to_string(model.weights.size()) +
                        " features, got " + std::to_string(features.size()));
    const Eigen::VectorXd std_feat =
        (features - model.feat_mean).cwiseQuotient(model.feat_scale);
    return sigmoid(std_feat.dot(model.weights) + model.intercept);
}

void save_lasso_model(const LassoModel& model, const std::filesystem::path& path) {
    json doc;
    doc["lambda"] = model.lambda;
    doc["intercept"] = model.intercept;
    doc["weights"] =
        std::vector<double>(model.weights.data(), model.weights.data() + model.weights.size());
    doc["feat_mean"] = std::vector<double>(model.feat_mean.data(),
                                           model.feat_mean.data() + model.feat_mean.size());
    doc["feat_scale"] = std::vector<double>(model.feat_scale.data(),
                                            model.feat_scale.data() + model.feat_scale.size());
    write_file_atomic(path, doc.dump(2) + "\n");
}

LassoModel load_lasso_model(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError("bad lasso model " + path.string() + ": " + e.what());
    }
    LassoModel model;
    model.lambda = doc.at("lambda").get<double>();
    model.intercept = doc.at("intercept").get<double>();
    const auto w = doc.at("weights").get<std::vector<double>>();
    const auto fm = doc.at("feat_mean").get<std::vector<double>>();
    const auto fs = doc.at("feat_scale").get<std::vector<double>>();
    model.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
    model.feat_mean = Eigen::Map<const Eigen::VectorXd>(fm.data(), fm.size());
    model.feat_scale = Eigen::Map<const Eigen::VectorXd>(fs.data(), fs.size());
    return model;
}

} // namespace tcs
