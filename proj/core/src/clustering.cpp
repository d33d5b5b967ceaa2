#include "pkm/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pkm {

namespace {

void check_same_length(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("vector lengths differ: " + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()));
    }
}

void check_order(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("Minkowski order p must be >= 1");
}

double log_sum_exp(std::span<const double> v) {
    const double top = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(top)) return top;
    double s = 0.0;
    for (double x : v) s += std::exp(x - top);
    return top + std::log(s);
}

std::vector<double> log_joint(std::span<const double> x, std::span<const double> priors) {
    auto joint = class_log_likelihoods(x, priors.size());
    for (std::size_t j = 0; j < joint.size(); ++j) joint[j] += std::log(priors[j]);
    return joint;
}

// D^2 sampling of one index given current squared distances to the nearest
// center. Falls back to a uniform pick among unchosen points when every
// distance is zero.
std::size_t sample_d2(std::span<const double> d2, const std::vector<bool>& chosen, std::mt19937_64& rng) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    if (total > 0.0) {
        const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
        double cumulative = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < d2.size(); ++i) {
            if (d2[i] <= 0.0) continue;
            cumulative += d2[i];
            last_positive = i;
            if (target < cumulative) return i;
        }
        return last_positive;
    }
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        if (!chosen[i]) free.push_back(i);
    }
    if (free.empty()) {
        return std::uniform_int_distribution<std::size_t>(0, d2.size() - 1)(rng);
    }
    return free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
}

// Completes `centers` up to k rows by D^2 sampling.
void extend_d2(const Matrix& data, Matrix& centers, std::size_t k, std::vector<bool>& chosen,
               std::mt19937_64& rng) {
    const std::size_t m = data.rows();
    std::vector<double> d2(m, std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < centers.rows(); ++c) {
        for (std::size_t i = 0; i < m; ++i) d2[i] = std::min(d2[i], squared_euclidean(data.row(i), centers.row(c)));
    }
    while (centers.rows() < k) {
        const std::size_t pick = sample_d2(d2, chosen, rng);
        chosen[pick] = true;
        centers.append_row(data.row(pick));
        const auto c = centers.row(centers.rows() - 1);
        for (std::size_t i = 0; i < m; ++i) d2[i] = std::min(d2[i], squared_euclidean(data.row(i), c));
    }
}

std::vector<std::size_t> assign_all(const Matrix& data, const Matrix& centers) {
    std::vector<std::size_t> out(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) out[i] = nearest_center(centers, data.row(i));
    return out;
}

}  // namespace

double squared_euclidean(std::span<const double> a, std::span<const double> b) {
    check_same_length(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double euclidean_phi(std::span<const double> a, std::span<const double> b) { return std::sqrt(squared_euclidean(a, b)); }

std::vector<double> class_log_likelihoods(std::span<const double> x, std::size_t num_classes) {
    if (num_classes == 0 || x.size() % num_classes != 0) {
        throw std::invalid_argument("encoded length is not a multiple of the class count");
    }
    std::vector<double> out(num_classes, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) out[i % num_classes] += x[i];
    return out;
}

double log_evidence(std::span<const double> x, std::span<const double> priors) {
    const auto joint = log_joint(x, priors);
    return log_sum_exp(joint);
}

std::vector<double> log_posteriors(std::span<const double> x, std::span<const double> priors) {
    auto joint = log_joint(x, priors);
    const double evidence = log_sum_exp(joint);
    for (double& v : joint) v -= evidence;
    return joint;
}

double dist_B_p(std::span<const double> a, std::span<const double> b, std::size_t num_classes, double p) {
    check_order(p);
    check_same_length(a, b);
    const auto la = class_log_likelihoods(a, num_classes);
    const auto lb = class_log_likelihoods(b, num_classes);
    double s = 0.0;
    for (std::size_t j = 0; j < num_classes; ++j) s += std::abs(la[j] - lb[j]);
    return s;
}

double delta_p(std::span<const double> a, std::span<const double> b, std::span<const double> priors, double p) {
    check_order(p);
    check_same_length(a, b);
    for (double q : priors) {
        if (!(q > 0.0)) throw std::invalid_argument("delta_p: priors must be positive");
    }
    const auto pa = log_posteriors(a, priors);
    const auto pb = log_posteriors(b, priors);
    double s = 0.0;
    for (std::size_t j = 0; j < priors.size(); ++j) {
        if (!std::isfinite(pa[j]) || !std::isfinite(pb[j])) throw std::domain_error("delta_p: zero posterior");
        s += std::abs(pa[j] - pb[j]);
    }
    return s;
}

std::string_view to_string(InitMethod method) noexcept {
    return method == InitMethod::KppR ? "kpp_r" : "kmeans_pp";
}

InitMethod parse_init_method(std::string_view text) {
    if (text == "kpp_r") return InitMethod::KppR;
    if (text == "kmeans_pp") return InitMethod::KmeansPP;
    throw std::invalid_argument("unknown initialization '" + std::string(text) + "'");
}

Centers kpp_r_init(const Matrix& data, std::span<const int> labels, std::size_t num_classes, std::size_t k,
                   std::mt19937_64& rng) {
    if (labels.size() != data.rows()) throw std::invalid_argument("kpp_r_init: labels do not match data");
    if (k < num_classes) throw std::invalid_argument("kpp_r_init: K must be >= J");
    if (k > data.rows()) throw std::invalid_argument("kpp_r_init: K exceeds the number of instances");

    const std::size_t dim = data.cols();
    Matrix means(num_classes, dim, 0.0);
    std::vector<std::size_t> sizes(num_classes, 0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        if (c >= num_classes) throw std::invalid_argument("kpp_r_init: label out of range");
        ++sizes[c];
        auto row = data.row(i);
        auto mean = means.row(c);
        for (std::size_t t = 0; t < dim; ++t) mean[t] += row[t];
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (sizes[c] == 0) throw std::invalid_argument("kpp_r_init: class " + std::to_string(c) + " is empty");
        for (double& v : means.row(c)) v /= static_cast<double>(sizes[c]);
    }
    std::vector<bool> chosen(data.rows(), false);
    extend_d2(data, means, k, chosen, rng);
    return Centers{std::move(means), InitMethod::KppR};
}

Centers kpp_r_init(const Matrix& data, std::span<const int> labels, std::size_t num_classes, std::size_t k,
                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return kpp_r_init(data, labels, num_classes, k, rng);
}

Centers kmeans_pp_init(const Matrix& data, std::size_t k, std::mt19937_64& rng) {
    if (k == 0) throw std::invalid_argument("kmeans_pp_init: K must be >= 1");
    if (k > data.rows()) throw std::invalid_argument("kmeans_pp_init: K exceeds the number of instances");
    std::vector<bool> chosen(data.rows(), false);
    const std::size_t first = std::uniform_int_distribution<std::size_t>(0, data.rows() - 1)(rng);
    chosen[first] = true;
    Matrix centers;
    centers.append_row(data.row(first));
    extend_d2(data, centers, k, chosen, rng);
    return Centers{std::move(centers), InitMethod::KmeansPP};
}

Centers kmeans_pp_init(const Matrix& data, std::size_t k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return kmeans_pp_init(data, k, rng);
}

std::size_t nearest_center(const Matrix& centers, std::span<const double> x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centers.rows(); ++k) {
        const double d = squared_euclidean(x, centers.row(k));
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

double inertia(const Matrix& data, std::span<const std::size_t> assignment, const Matrix& centers) {
    if (assignment.size() != data.rows()) throw std::invalid_argument("inertia: assignment does not match data");
    double s = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        if (assignment[i] >= centers.rows()) throw std::invalid_argument("inertia: assignment out of range");
        s += squared_euclidean(data.row(i), centers.row(assignment[i]));
    }
    return s;
}

ClusterModel fit_kmeans(const Matrix& data, Centers init, const LloydOptions& options) {
    if (data.empty()) throw std::invalid_argument("fit_kmeans: no data");
    if (options.max_iter == 0) throw std::invalid_argument("fit_kmeans: max_iter must be >= 1");
    if (init.size() == 0) throw std::invalid_argument("fit_kmeans: no centers");
    if (init.vectors.cols() != data.cols()) throw std::invalid_argument("fit_kmeans: center dimension mismatch");

    const std::size_t k = init.size();
    const std::size_t dim = data.cols();
    ClusterModel model;
    model.centers = std::move(init);
    model.assignment = assign_all(data, model.centers.vectors);
    model.inertia = inertia(data, model.assignment, model.centers.vectors);
    model.inertia_history.push_back(model.inertia);

    for (std::size_t t = 1; t <= options.max_iter; ++t) {
        Matrix updated(k, dim, 0.0);
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < data.rows(); ++i) {
            const auto c = model.assignment[i];
            ++sizes[c];
            auto row = data.row(i);
            auto acc = updated.row(c);
            for (std::size_t t2 = 0; t2 < dim; ++t2) acc[t2] += row[t2];
        }
        std::vector<bool> reseeded(data.rows(), false);
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) {
                for (double& v : updated.row(c)) v /= static_cast<double>(sizes[c]);
                continue;
            }
            const auto former = model.centers.vectors.row(c);
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < data.rows(); ++i) {
                if (reseeded[i]) continue;
                const double d = squared_euclidean(data.row(i), former);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            reseeded[far] = true;
            std::copy(data.row(far).begin(), data.row(far).end(), updated.row(c).begin());
        }

        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            shift = std::max(shift, euclidean_phi(updated.row(c), model.centers.vectors.row(c)));
        }
        model.centers.vectors = std::move(updated);

        auto assignment = assign_all(data, model.centers.vectors);
        const bool changed = assignment != model.assignment;
        model.assignment = std::move(assignment);
        model.inertia = inertia(data, model.assignment, model.centers.vectors);
        model.inertia_history.push_back(model.inertia);
        model.iterations = t;
        if (!changed || shift < options.tol) {
            model.converged = true;
            break;
        }
    }
    return model;
}

ClusterModel best_of_kmeans(const Matrix& data, std::size_t k, std::size_t restarts, std::mt19937_64& rng,
                            const LloydOptions& options) {
    if (restarts == 0) throw std::invalid_argument("best_of_kmeans: restarts must be >= 1");
    ClusterModel best;
    for (std::size_t r = 0; r < restarts; ++r) {
        auto model = fit_kmeans(data, kmeans_pp_init(data, k, rng), options);
        if (r == 0 || model.inertia < best.inertia) best = std::move(model);
    }
    return best;
}

}  // namespace pkm
