#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pkm/dataset.hpp"
#include "pkm/matrix.hpp"

// Unsupervised encodings used by the KM_MV baseline: rank normalization for
// numeric features and equal-frequency grouping with one-hot coding for
// categorical ones.

namespace pkm {

inline constexpr std::size_t kDefaultRankBuckets = 100;
inline constexpr std::size_t kDefaultBasicGroups = 10;

/// Value with (average) rank r among m training values maps to ceil(r*H/m)/H.
class RankNormalizer {
public:
    RankNormalizer() = default;
    RankNormalizer(std::span<const double> training_values, std::size_t buckets = kDefaultRankBuckets);

    /// Unseen values use count(< x) + (count(== x) + 1) / 2 as their rank,
    /// clipped to [1/H, 1]. Missing maps to 0.5.
    double transform(std::optional<double> value) const;

    std::size_t buckets() const noexcept { return buckets_; }
    const std::vector<double>& sorted_values() const noexcept { return sorted_; }

    friend bool operator==(const RankNormalizer&, const RankNormalizer&) = default;

private:
    std::vector<double> sorted_;
    std::size_t buckets_ = kDefaultRankBuckets;
};

std::vector<double> rank_normalize(std::span<const double> values, std::size_t buckets = kDefaultRankBuckets);

/// At most g groups of values with frequencies as equal as possible: values
/// are taken by decreasing frequency (ties by token) and each goes to the
/// currently lightest group (ties: lowest group index).
class BasicGrouping {
public:
    BasicGrouping() = default;
    BasicGrouping(std::span<const std::optional<std::string>> training_values,
                  std::size_t max_groups = kDefaultBasicGroups);
    BasicGrouping(std::map<std::string, std::size_t> group_of, std::optional<std::size_t> missing_group,
                  std::size_t num_groups);

    std::size_t num_groups() const noexcept { return num_groups_; }
    /// nullopt for tokens never seen in training.
    std::optional<std::size_t> group(const std::optional<std::string>& token) const;
    /// One-hot vector over groups; all zeros for unseen tokens.
    std::vector<double> one_hot(const std::optional<std::string>& token) const;

    const std::map<std::string, std::size_t>& group_of() const noexcept { return group_of_; }
    std::optional<std::size_t> missing_group() const noexcept { return missing_group_; }

    friend bool operator==(const BasicGrouping&, const BasicGrouping&) = default;

private:
    std::map<std::string, std::size_t> group_of_;
    std::optional<std::size_t> missing_group_;
    std::size_t num_groups_ = 0;
};

std::vector<std::vector<double>> bgb_encode(std::span<const std::optional<std::string>> values,
                                            std::size_t max_groups = kDefaultBasicGroups);

using BaselineTransform = std::variant<RankNormalizer, BasicGrouping>;

/// Per-feature unsupervised encoding of a whole instance.
class BaselineEncoder {
public:
    BaselineEncoder() = default;
    BaselineEncoder(Schema schema, std::vector<BaselineTransform> transforms);

    const Schema& schema() const noexcept { return schema_; }
    const std::vector<BaselineTransform>& transforms() const noexcept { return transforms_; }
    std::size_t encoded_size() const noexcept { return encoded_size_; }

    std::vector<double> encode(const Instance& instance) const;

    friend bool operator==(const BaselineEncoder&, const BaselineEncoder&) = default;

private:
    Schema schema_;
    std::vector<BaselineTransform> transforms_;
    std::size_t encoded_size_ = 0;
};

BaselineEncoder fit_baseline_encoder(const Dataset& data, std::size_t buckets = kDefaultRankBuckets,
                                     std::size_t max_groups = kDefaultBasicGroups);

Matrix encode_dataset(const BaselineEncoder& encoder, const Dataset& data);

}  // namespace pkm
