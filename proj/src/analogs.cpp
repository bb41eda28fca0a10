#include "tcstruct/analogs.hpp"

#include "tcstruct/error.hpp"
#include "tcstruct/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace tcs {

double trajectory_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DataError("trajectory_distance: window shape mismatch");
    if (a.rows() == 0) throw DataError("trajectory_distance: empty window");
    return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.rows()));
}

std::vector<TrajWindow> extract_windows(const std::string& storm_id,
                                        const std::vector<UtcTime>& times,
                                        const Eigen::MatrixXd& coeffs, int window_len,
                                        int cadence_hours, int stride) {
    if (static_cast<Eigen::Index>(times.size()) != coeffs.rows())
        throw DataError("extract_windows: time/coefficient count mismatch");
    if (window_len < 1 || stride < 1) throw DataError("extract_windows: bad window parameters");
    const std::int64_t cadence = static_cast<std::int64_t>(cadence_hours) * kSecondsPerHour;

    std::vector<TrajWindow> windows;
    for (std::size_t start = 0; start + window_len <= times.size(); start += stride) {
        bool contiguous = true;
        for (int i = 1; i < window_len; ++i)
            if (times[start + i] - times[start + i - 1] != cadence) {
                contiguous = false;
                break;
            }
        if (!contiguous) continue;
        windows.push_back({storm_id, times[start],
                           coeffs.middleRows(static_cast<Eigen::Index>(start), window_len)});
    }
    return windows;
}

namespace {

// Lloyd iterations with k-means++ seeding; returns within-cluster sum of
// squares. Assignment ties go to the lower center index.
double kmeans_once(const Eigen::MatrixXd& points, int k, RngStream& rng,
                   std::vector<int>& labels) {
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd centers(k, points.cols());

    // k-means++: first center uniform, then D^2 sampling.
    centers.row(0) = points.row(rng.next_index(n));
    Eigen::VectorXd d2 =
        (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            const double u = rng.next_double() * total;
            double cum = 0.0;
            for (pick = 0; pick < n - 1; ++pick) {
                cum += d2[pick];
                if (cum >= u) break;
            }
        } else {
            pick = rng.next_index(n);
        }
        centers.row(c) = points.row(pick);
        d2 = d2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    labels.assign(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (points.row(i) - centers.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double d = (points.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
        Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(labels[i]) += points.row(i);
            ++counts[labels[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                centers.row(c) = sums.row(c) / counts[c];
            } else {
                // Re-seed an empty cluster at the point farthest from its center.
                Eigen::Index far = 0;
                double far_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double d = (points.row(i) - centers.row(labels[i])).squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centers.row(c) = points.row(far);
            }
        }
    }

    double wcss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        wcss += (points.row(i) - centers.row(labels[i])).squaredNorm();
    return wcss;
}

} // namespace

ClusterResult spectral_cluster(const Eigen::MatrixXd& distances, int k_clusters,
                               std::uint64_t seed) {
    const Eigen::Index n = distances.rows();
    if (distances.cols() != n) throw DataError("spectral_cluster: distance matrix not square");
    if (k_clusters < 1) throw DataError("spectral_cluster: k_clusters must be >= 1");
    if (n < k_clusters)
        throw DataError("spectral_cluster: fewer points than clusters (" + std::to_string(n) +
                        " < " + std::to_string(k_clusters) + ")");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (distances(i, i) != 0.0)
            throw DataError("spectral_cluster: distance diagonal must be zero");
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (distances(i, j) < 0.0) throw DataError("spectral_cluster: negative distance");
            if (distances(i, j) != distances(j, i))
                throw DataError("spectral_cluster: distance matrix not symmetric");
        }
    }

    ClusterResult result;
    result.seed = seed;

    // Bandwidth: median off-diagonal distance, mean fallback.
    std::vector<double> off;
    off.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) off.push_back(distances(i, j));
    double sigma = 0.0;
    if (!off.empty()) {
        std::vector<double> sorted = off;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t mid = sorted.size() / 2;
        sigma = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
        if (sigma == 0.0) {
            double sum = 0.0;
            for (double v : off) sum += v;
            sigma = sum / static_cast<double>(off.size());
        }
    }
    result.sigma = sigma;
    if (sigma == 0.0) { // all points identical
        result.labels.assign(n, 0);
        result.embedding = Eigen::MatrixXd::Zero(n, k_clusters);
        return result;
    }

    Eigen::MatrixXd affinity(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            affinity(i, j) = std::exp(-distances(i, j) * distances(i, j) / (2.0 * sigma * sigma));

    const Eigen::VectorXd inv_sqrt_deg =
        affinity.rowwise().sum().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n) -
                          (inv_sqrt_deg.asDiagonal() * affinity * inv_sqrt_deg.asDiagonal());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap);
    result.embedding = eig.eigenvectors().leftCols(k_clusters); // smallest eigenvalues first
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = result.embedding.row(i).norm();
        if (norm > 0.0) result.embedding.row(i) /= norm;
    }

    std::vector<int> best_labels;
    double best_wcss = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < 10; ++restart) {
        RngStream rng(substream(seed, static_cast<std::uint64_t>(restart)));
        std::vector<int> labels;
        const double wcss = kmeans_once(result.embedding, k_clusters, rng, labels);
        if (wcss < best_wcss) {
            best_wcss = wcss;
            best_labels = std::move(labels);
        }
    }
    result.labels = std::move(best_labels);
    return result;
}

std::vector<AnalogMatch> find_analogs(const TrajWindow& query,
                                      const std::vector<TrajWindow>& library, int m,
                                      bool exclude_same_storm) {
    if (library.empty()) throw DataError("find_analogs: empty library");
    std::vector<AnalogMatch> matches;
    matches.reserve(library.size());
    for (const TrajWindow& w : library) {
        if (exclude_same_storm && w.storm_id == query.storm_id) continue;
        matches.push_back({w.storm_id, w.start, trajectory_distance(query.coeffs, w.coeffs)});
    }
    std::sort(matches.begin(), matches.end(), [](const AnalogMatch& a, const AnalogMatch& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        if (a.storm_id != b.storm_id) return a.storm_id < b.storm_id;
        return a.window_start < b.window_start;
    });
    if (static_cast<int>(matches.size()) > m) matches.resize(m);
    return matches;
}

} // namespace tcs
