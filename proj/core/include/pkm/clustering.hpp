#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "pkm/matrix.hpp"

namespace pkm {

// Distances over the redescription space. An encoded vector holds d*J
// components laid out feature-major (component n*J + j).

/// Standard Euclidean distance; throws std::invalid_argument on length mismatch.
double euclidean_phi(std::span<const double> a, std::span<const double> b);
double squared_euclidean(std::span<const double> a, std::span<const double> b);

/// Naive-Bayes aggregation: L_j = sum_n x[n*J + j] = log P(x | C_j).
std::vector<double> class_log_likelihoods(std::span<const double> x, std::size_t num_classes);

/// log P(x) = log sum_j P(C_j) exp(L_j).
double log_evidence(std::span<const double> x, std::span<const double> priors);

/// log P(C_j | x) under the naive-Bayes formula.
std::vector<double> log_posteriors(std::span<const double> x, std::span<const double> priors);

/// sum_j |L_j(a) - L_j(b)|. The per-class term is a scalar, so every
/// Minkowski order p >= 1 reduces to the absolute difference; p is validated.
double dist_B_p(std::span<const double> a, std::span<const double> b, std::size_t num_classes, double p);

/// sum_j |log P(C_j|a) - log P(C_j|b)|, same scalar reading as dist_B_p.
double delta_p(std::span<const double> a, std::span<const double> b, std::span<const double> priors, double p);

enum class InitMethod { KppR, KmeansPP };

std::string_view to_string(InitMethod method) noexcept;
InitMethod parse_init_method(std::string_view text);

struct Centers {
    Matrix vectors;  // K rows
    InitMethod provenance = InitMethod::KmeansPP;

    std::size_t size() const noexcept { return vectors.rows(); }

    friend bool operator==(const Centers&, const Centers&) = default;
};

/// One center per class at the class mean, then K - J more centers by
/// D^2 sampling against the centers already placed. Deterministic when K == J.
Centers kpp_r_init(const Matrix& data, std::span<const int> labels, std::size_t num_classes, std::size_t k,
                   std::mt19937_64& rng);
Centers kpp_r_init(const Matrix& data, std::span<const int> labels, std::size_t num_classes, std::size_t k,
                   std::uint64_t seed);

/// k-means++: first center uniform, then D^2 sampling.
Centers kmeans_pp_init(const Matrix& data, std::size_t k, std::mt19937_64& rng);
Centers kmeans_pp_init(const Matrix& data, std::size_t k, std::uint64_t seed);

struct LloydOptions {
    std::size_t max_iter = 100;
    double tol = 1e-6;  // on the largest center displacement
};

struct ClusterModel {
    Centers centers;
    std::vector<std::size_t> assignment;
    std::size_t iterations = 0;
    double inertia = 0.0;
    std::vector<double> inertia_history;  // after the initial assignment and after every iteration
    bool converged = false;
};

/// Nearest center by Euclidean distance; ties go to the lowest index.
std::size_t nearest_center(const Matrix& centers, std::span<const double> x);

/// Lloyd iteration from the given centers. An emptied cluster is re-seeded at
/// the point farthest from its former center (ties: lowest index).
ClusterModel fit_kmeans(const Matrix& data, Centers init, const LloydOptions& options = {});

/// sum_k sum_{x in B_k} ||x - mu_k||^2
double inertia(const Matrix& data, std::span<const std::size_t> assignment, const Matrix& centers);

/// Runs k-means++ followed by Lloyd `restarts` times and keeps the lowest
/// final inertia (ties: earliest run).
ClusterModel best_of_kmeans(const Matrix& data, std::size_t k, std::size_t restarts, std::mt19937_64& rng,
                            const LloydOptions& options = {});

}  // namespace pkm
