#include "tcstruct/gam.hpp"

#include "tcstruct/error.hpp"
#include "tcstruct/io.hpp"

#include <Eigen/Cholesky>
#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace tcs {

using nlohmann::json;

double GamSmoother::eval(double x) const {
    if (degenerate()) return 0.0;
    const Eigen::Index m = knots.size();
    // Segment index; x beyond the knot range extrapolates the end segment.
    Eigen::Index l = std::upper_bound(knots.data(), knots.data() + m, x) - knots.data() - 1;
    l = std::clamp<Eigen::Index>(l, 0, m - 2);
    const double w = (x - knots[l]) / (knots[l + 1] - knots[l]);
    return (1.0 - w) * coeffs[l] + w * coeffs[l + 1];
}

double GamModel::predict_change(const Eigen::VectorXd& features) const {
    if (features.size() != static_cast<Eigen::Index>(smoothers.size()))
        throw DataError("gam predict: expected " + std::to_string(smoothers.size()) +
                        " features, got " + std::to_string(features.size()));
    double v = intercept;
    for (std::size_t j = 0; j < smoothers.size(); ++j) v += smoothers[j].eval(features[j]);
    return v;
}

namespace {

Eigen::VectorXd quantile_knots(Eigen::VectorXd col, int m) {
    std::sort(col.data(), col.data() + col.size());
    const Eigen::Index n = col.size();
    std::vector<double> knots;
    for (int l = 0; l < m; ++l) {
        const double pos = static_cast<double>(l) / (m - 1) * (n - 1);
        const Eigen::Index lo = static_cast<Eigen::Index>(pos);
        const double frac = pos - lo;
        const double q = lo + 1 < n ? (1.0 - frac) * col[lo] + frac * col[lo + 1] : col[n - 1];
        if (knots.empty() || q > knots.back()) knots.push_back(q);
    }
    return Eigen::Map<const Eigen::VectorXd>(knots.data(), knots.size());
}

// Basis evaluation as (segment, weight) pairs; at most two active hat
// functions per row.
struct BasisEval {
    Eigen::VectorXi seg;
    Eigen::VectorXd w;
};

BasisEval eval_basis(const Eigen::VectorXd& col, const Eigen::VectorXd& knots) {
    const Eigen::Index n = col.size();
    const Eigen::Index m = knots.size();
    BasisEval b{Eigen::VectorXi(n), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index l =
            std::upper_bound(knots.data(), knots.data() + m, col[i]) - knots.data() - 1;
        l = std::clamp<Eigen::Index>(l, 0, m - 2);
        b.seg[i] = static_cast<int>(l);
        b.w[i] = (col[i] - knots[l]) / (knots[l + 1] - knots[l]);
    }
    return b;
}

Eigen::VectorXd smoother_values(const BasisEval& b, const Eigen::VectorXd& coeffs) {
    Eigen::VectorXd v(b.seg.size());
    for (Eigen::Index i = 0; i < b.seg.size(); ++i) {
        const int l = b.seg[i];
        v[i] = (1.0 - b.w[i]) * coeffs[l] + b.w[i] * coeffs[l + 1];
    }
    return v;
}

Eigen::MatrixXd second_difference_penalty(Eigen::Index m) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index l = 1; l + 1 < m; ++l) {
        Eigen::Vector3d d(1.0, -2.0, 1.0);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) P(l - 1 + a, l - 1 + b) += d[a] * d[b];
    }
    return P;
}

} // namespace

GamModel fit_gam(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int knots_per_feature,
                 double penalty) {
    const Eigen::Index n = X.rows();
    const Eigen::Index q = X.cols();
    if (n < 20) throw DataError("fit_gam: need at least 20 rows, got " + std::to_string(n));
    if (y.size() != n) throw DataError("fit_gam: target length mismatch");
    if (!y.allFinite() || !X.allFinite()) throw DataError("fit_gam: non-finite input");
    if (knots_per_feature < 2) throw DataError("fit_gam: need at least 2 knots per feature");

    GamModel model;
    model.penalty = penalty;
    model.intercept = y.mean();
    model.smoothers.resize(q);

    std::vector<BasisEval> basis(q);
    std::vector<Eigen::MatrixXd> normal(q); // N'N + penalty * P, prefactored data side
    std::vector<Eigen::VectorXd> values(q); // current smoother values over rows
    for (Eigen::Index j = 0; j < q; ++j) {
        Eigen::VectorXd knots = quantile_knots(X.col(j), knots_per_feature);
        if (knots.size() < 2) {
            model.smoothers[j] = GamSmoother{}; // constant feature
            model.notes.push_back("feature " + std::to_string(j) +
                                  " is constant; smoother fixed at 0");
            values[j] = Eigen::VectorXd::Zero(n);
            continue;
        }
        model.smoothers[j].knots = knots;
        model.smoothers[j].coeffs = Eigen::VectorXd::Zero(knots.size());
        basis[j] = eval_basis(X.col(j), knots);
        values[j] = Eigen::VectorXd::Zero(n);

        const Eigen::Index m = knots.size();
        Eigen::MatrixXd NtN = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int l = basis[j].seg[i];
            const double w = basis[j].w[i];
            NtN(l, l) += (1.0 - w) * (1.0 - w);
            NtN(l, l + 1) += (1.0 - w) * w;
            NtN(l + 1, l) += w * (1.0 - w);
            NtN(l + 1, l + 1) += w * w;
        }
        normal[j] = NtN + penalty * second_difference_penalty(m);
    }

    model.fitted = Eigen::VectorXd::Constant(n, model.intercept);
    auto objective = [&]() {
        double rss = (y - model.fitted).squaredNorm();
        for (Eigen::Index j = 0; j < q; ++j) {
            if (model.smoothers[j].degenerate()) continue;
            const Eigen::VectorXd& c = model.smoothers[j].coeffs;
            for (Eigen::Index l = 1; l + 1 < c.size(); ++l) {
                const double d2 = c[l - 1] - 2.0 * c[l] + c[l + 1];
                rss += penalty * d2 * d2;
            }
        }
        return rss;
    };
    model.objective_history.push_back(objective());

    for (int cycle = 0; cycle < 100; ++cycle) {
        const Eigen::VectorXd before = model.fitted;
        for (Eigen::Index j = 0; j < q; ++j) {
            if (model.smoothers[j].degenerate()) continue;
            const Eigen::VectorXd partial =
                y - (model.fitted - values[j]); // residual excluding this smoother

            const Eigen::Index m = model.smoothers[j].knots.size();
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
            for (Eigen::Index i = 0; i < n; ++i) {
                const int l = basis[j].seg[i];
                const double w = basis[j].w[i];
                rhs[l] += (1.0 - w) * partial[i];
                rhs[l + 1] += w * partial[i];
            }
            Eigen::VectorXd c = Eigen::LDLT<Eigen::MatrixXd>(normal[j]).solve(rhs);

            // Identifiability: shift the smoother's training mean into the
            // intercept (the second-difference penalty ignores constants).
            Eigen::VectorXd v = smoother_values(BasisEval{basis[j].seg, basis[j].w}, c);
            const double mean_v = v.mean();
            c.array() -= mean_v;
            v.array() -= mean_v;
            model.intercept += mean_v;

            model.fitted += v - values[j];
            model.smoothers[j].coeffs = c;
            values[j] = std::move(v);
        }
        model.cycles = cycle + 1;
        model.objective_history.push_back(objective());
        if ((model.fitted - before).cwiseAbs().maxCoeff() < 1e-8) break;
    }
    return model;
}

double predict_intensity(const GamModel& model, const Eigen::VectorXd& features) {
    const double v = features[0] + model.predict_change(features);
    return std::clamp(v, 0.0, 250.0);
}

void save_gam_model(const GamModel& model, const std::filesystem::path& path) {
    json doc;
    doc["intercept"] = model.intercept;
    doc["penalty"] = model.penalty;
    doc["cycles"] = model.cycles;
    doc["notes"] = model.notes;
    doc["smoothers"] = json::array();
    for (const GamSmoother& s : model.smoothers) {
        json sm;
        sm["knots"] = std::vector<double>(s.knots.data(), s.knots.data() + s.knots.size());
        sm["coeffs"] = std::vector<double>(s.coeffs.data(), s.coeffs.data() + s.coeffs.size());
        doc["smoothers"].push_back(std::move(sm));
    }
    write_file_atomic(path, doc.dump(2) + "\n");
}

GamModel load_gam_model(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError("bad GAM model " + path.string() + ": " + e.what());
    }
    GamModel model;
    model.intercept = doc.at("intercept").get<double>();
    model.penalty = doc.at("penalty").get<double>();
    model.cycles = doc.value("cycles", 0);
    for (const json& sm : doc.at("smoothers")) {
        GamSmoother s;
        const auto knots = sm.at("knots").get<std::vector<double>>();
        const auto coeffs = sm.at("coeffs").get<std::vector<double>>();
        s.knots = Eigen::Map<const Eigen::VectorXd>(knots.data(), knots.size());
        s.coeffs = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), coeffs.size());
        model.smoothers.push_back(std::move(s));
    }
    return model;
}

} // namespace tcs
