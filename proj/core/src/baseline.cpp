#include "pkm/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pkm/error.hpp"

namespace pkm {

RankNormalizer::RankNormalizer(std::span<const double> training_values, std::size_t buckets)
    : sorted_(training_values.begin(), training_values.end()), buckets_(buckets) {
    if (buckets_ == 0) throw std::invalid_argument("rank normalization needs H >= 1");
    std::sort(sorted_.begin(), sorted_.end());
}

double RankNormalizer::transform(std::optional<double> value) const {
    if (!value || sorted_.empty()) return 0.5;
    const auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), *value);
    const auto hi = std::upper_bound(lo, sorted_.end(), *value);
    const double less = static_cast<double>(lo - sorted_.begin());
    const double equal = static_cast<double>(hi - lo);
    const double rank = less + (equal + 1.0) / 2.0;
    const double h = static_cast<double>(buckets_);
    const double bucket = std::ceil(rank * h / static_cast<double>(sorted_.size()));
    return std::clamp(bucket, 1.0, h) / h;
}

std::vector<double> rank_normalize(std::span<const double> values, std::size_t buckets) {
    if (values.empty()) throw std::invalid_argument("rank_normalize: empty input");
    const RankNormalizer normalizer(values, buckets);
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(normalizer.transform(v));
    return out;
}

BasicGrouping::BasicGrouping(std::span<const std::optional<std::string>> training_values, std::size_t max_groups) {
    if (max_groups == 0) throw std::invalid_argument("basic grouping needs g >= 1");
    if (training_values.empty()) throw std::invalid_argument("basic grouping: empty input");
    std::map<std::optional<std::string>, std::size_t> freq;
    for (const auto& v : training_values) ++freq[v];

    std::vector<std::pair<std::optional<std::string>, std::size_t>> order(freq.begin(), freq.end());
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

    num_groups_ = std::min(max_groups, order.size());
    std::vector<std::size_t> load(num_groups_, 0);
    for (const auto& [token, count] : order) {
        const auto g = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
        load[g] += count;
        if (token) {
            group_of_.emplace(*token, g);
        } else {
            missing_group_ = g;
        }
    }
}

BasicGrouping::BasicGrouping(std::map<std::string, std::size_t> group_of, std::optional<std::size_t> missing_group,
                             std::size_t num_groups)
    : group_of_(std::move(group_of)), missing_group_(missing_group), num_groups_(num_groups) {
    for (const auto& [token, g] : group_of_) {
        if (g >= num_groups_) throw std::invalid_argument("basic grouping: group index out of range");
    }
    if (missing_group_ && *missing_group_ >= num_groups_) {
        throw std::invalid_argument("basic grouping: group index out of range");
    }
}

std::optional<std::size_t> BasicGrouping::group(const std::optional<std::string>& token) const {
    if (!token) return missing_group_;
    auto it = group_of_.find(*token);
    if (it == group_of_.end()) return std::nullopt;
    return it->second;
}

std::vector<double> BasicGrouping::one_hot(const std::optional<std::string>& token) const {
    std::vector<double> out(num_groups_, 0.0);
    if (auto g = group(token)) out[*g] = 1.0;
    return out;
}

std::vector<std::vector<double>> bgb_encode(std::span<const std::optional<std::string>> values,
                                            std::size_t max_groups) {
    const BasicGrouping grouping(values, max_groups);
    std::vector<std::vector<double>> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(grouping.one_hot(v));
    return out;
}

BaselineEncoder::BaselineEncoder(Schema schema, std::vector<BaselineTransform> transforms)
    : schema_(std::move(schema)), transforms_(std::move(transforms)) {
    if (transforms_.size() != schema_.num_features()) {
        throw std::invalid_argument("baseline encoder: one transform per feature required");
    }
    for (std::size_t n = 0; n < transforms_.size(); ++n) {
        const bool numeric = std::holds_alternative<RankNormalizer>(transforms_[n]);
        if (numeric != (schema_.feature(n).kind == FeatureKind::Numeric)) {
            throw std::invalid_argument("baseline encoder: transform does not match feature kind");
        }
        encoded_size_ += numeric ? 1 : std::get<BasicGrouping>(transforms_[n]).num_groups();
    }
}

std::vector<double> BaselineEncoder::encode(const Instance& instance) const {
    if (instance.size() != transforms_.size()) throw SchemaMismatch("instance does not match baseline encoder");
    std::vector<double> out;
    out.reserve(encoded_size_);
    for (std::size_t n = 0; n < instance.size(); ++n) {
        const auto& v = instance[n];
        if (const auto* rank = std::get_if<RankNormalizer>(&transforms_[n])) {
            if (is_missing(v)) {
                out.push_back(rank->transform(std::nullopt));
            } else if (const auto* x = std::get_if<double>(&v)) {
                out.push_back(rank->transform(*x));
            } else {
                throw SchemaMismatch("feature '" + schema_.feature(n).name + "' expects a numeric value");
            }
        } else {
            const auto& grouping = std::get<BasicGrouping>(transforms_[n]);
            std::optional<std::string> token;
            if (const auto* s = std::get_if<std::string>(&v)) {
                token = *s;
            } else if (!is_missing(v)) {
                throw SchemaMismatch("feature '" + schema_.feature(n).name + "' expects a categorical token");
            }
            const auto hot = grouping.one_hot(token);
            out.insert(out.end(), hot.begin(), hot.end());
        }
    }
    return out;
}

BaselineEncoder fit_baseline_encoder(const Dataset& data, std::size_t buckets, std::size_t max_groups) {
    std::vector<BaselineTransform> transforms;
    for (std::size_t n = 0; n < data.num_features(); ++n) {
        if (data.schema().feature(n).kind == FeatureKind::Numeric) {
            std::vector<double> present;
            for (const auto& v : data.numeric(n)) {
                if (v) present.push_back(*v);
            }
            transforms.emplace_back(RankNormalizer(present, buckets));
        } else {
            transforms.emplace_back(BasicGrouping(data.categorical(n), max_groups));
        }
    }
    return BaselineEncoder(data.schema(), std::move(transforms));
}

Matrix encode_dataset(const BaselineEncoder& encoder, const Dataset& data) {
    if (!encoder.schema().same_features(data.schema())) throw SchemaMismatch("dataset schema differs from encoder");
    Matrix out(data.size(), encoder.encoded_size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto row = encoder.encode(data.instance(i));
        std::copy(row.begin(), row.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace pkm
