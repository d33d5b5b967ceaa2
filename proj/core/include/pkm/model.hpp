#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "pkm/baseline.hpp"
#include "pkm/clustering.hpp"
#include "pkm/dataset.hpp"
#include "pkm/encoding.hpp"
#include "pkm/local_models.hpp"

namespace pkm {

/// PkmMv / PkmSnb: supervised log-likelihood encoding, K++R initialization,
/// majority vote or local SNB per cluster. KmMv: unsupervised baseline
/// encoding, best of `restarts` k-means++ runs, majority vote.
enum class Variant { PkmMv, PkmSnb, KmMv };

std::string_view to_string(Variant v) noexcept;
Variant parse_variant(std::string_view text);

inline constexpr std::size_t kDefaultRestarts = 25;

struct FitConfig {
    Variant variant = Variant::PkmSnb;
    std::optional<std::size_t> k;  // defaults to the number of classes
    std::uint64_t seed = 0;
    LloydOptions lloyd;
    std::size_t restarts = kDefaultRestarts;  // KmMv only
    std::size_t rank_buckets = kDefaultRankBuckets;
    std::size_t basic_groups = kDefaultBasicGroups;

    friend bool operator==(const FitConfig& a, const FitConfig& b) {
        return a.variant == b.variant && a.k == b.k && a.seed == b.seed && a.lloyd.max_iter == b.lloyd.max_iter &&
               a.lloyd.tol == b.lloyd.tol && a.restarts == b.restarts && a.rank_buckets == b.rank_buckets &&
               a.basic_groups == b.basic_groups;
    }
};

using Encoder = std::variant<Codebook, BaselineEncoder>;

struct PkmModel {
    Schema schema;
    FitConfig config;  // k resolved
    Encoder encoder;
    Centers centers;
    std::vector<ClusterPredictor> predictors;
    std::size_t iterations = 0;
    double inertia = 0.0;

    std::size_t num_clusters() const noexcept { return predictors.size(); }
    std::size_t num_classes() const noexcept { return schema.num_classes(); }
    const Codebook* codebook() const noexcept { return std::get_if<Codebook>(&encoder); }

    friend bool operator==(const PkmModel&, const PkmModel&) = default;
};

struct Prediction {
    std::size_t cluster = 0;
    std::vector<double> probabilities;
    int label = 0;

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct FitResult {
    PkmModel model;
    std::vector<std::size_t> assignment;  // training cluster of every row
};

/// Algorithm steps 1-5 on a labeled dataset. Throws std::invalid_argument
/// when K < J for a supervised variant.
FitResult fit_predictive_kmeans(const Dataset& train, const FitConfig& config);

/// Encode, route to the nearest center, and let that cluster's predictor
/// emit class probabilities. Label ties go to the lowest class index.
Prediction predict(const PkmModel& model, const Instance& instance);
std::vector<Prediction> predict(const PkmModel& model, const Dataset& data);

}  // namespace pkm
