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
#include "pkm/modl.hpp"

namespace pkm {

/// Cell index of a value inside a feature partition; nullopt means the value
/// has no fitted cell (Missing never seen in training, or an unseen token).
using CellIndex = std::optional<std::size_t>;

/// Right-closed intervals (-inf, c1], (c1, c2], ..., (c_{I-1}, +inf) with an
/// optional trailing cell for Missing values.
struct IntervalPartition {
    std::vector<double> cuts;
    modl::CountTable counts;  // one row per cell, intervals first then Missing
    bool has_missing_cell = false;

    std::size_t num_intervals() const noexcept { return cuts.size() + 1; }
    std::size_t num_cells() const noexcept { return counts.size(); }
    CellIndex cell_of(std::optional<double> value) const;

    friend bool operator==(const IntervalPartition&, const IntervalPartition&) = default;
};

/// Groups of categorical tokens. Missing is treated as a token of its own and
/// may share a group with regular tokens.
struct ValueGrouping {
    std::map<std::string, std::size_t> group_of;
    std::optional<std::size_t> missing_group;
    modl::CountTable counts;  // one row per group

    std::size_t num_groups() const noexcept { return counts.size(); }
    std::size_t num_cells() const noexcept { return counts.size(); }
    CellIndex cell_of(const std::optional<std::string>& token) const;

    friend bool operator==(const ValueGrouping&, const ValueGrouping&) = default;
};

/// Supervised discretization minimizing the MODL interval cost. Missing
/// values get a dedicated trailing cell. Elementary intervals are the distinct
/// values, pre-binned to at most `max_elementary` equal-frequency bins.
IntervalPartition discretize_numeric(std::span<const std::optional<double>> values, std::span<const int> labels,
                                     std::size_t num_classes, std::size_t max_elementary = 1000);

/// Supervised value grouping minimizing the MODL grouping cost.
ValueGrouping group_categorical(std::span<const std::optional<std::string>> values, std::span<const int> labels,
                                std::size_t num_classes);

double partition_cost(const IntervalPartition& p);
double partition_cost(const ValueGrouping& g);

using FeaturePartition = std::variant<IntervalPartition, ValueGrouping>;

struct FeatureCoding {
    Feature feature;
    FeaturePartition partition;
    double cost = 0.0;       // MODL cost of the fitted partition
    double null_cost = 0.0;  // MODL cost of the single-cell model
    double level = 0.0;      // compression_level(cost, null_cost)

    std::size_t num_cells() const;
    const modl::CountTable& counts() const;

    friend bool operator==(const FeatureCoding&, const FeatureCoding&) = default;
};

/// Per-feature supervised partitions plus class priors. Defines the
/// redescription of an instance into d*J log-likelihood components, laid out
/// feature-major: component n*J + j = log P(X^(n) = x | C_j).
class Codebook {
public:
    Codebook() = default;
    Codebook(Schema schema, std::vector<FeatureCoding> features, std::vector<std::size_t> class_counts,
             double smoothing = 1.0);

    const Schema& schema() const noexcept { return schema_; }
    std::size_t num_features() const noexcept { return features_.size(); }
    std::size_t num_classes() const noexcept { return class_counts_.size(); }
    std::size_t encoded_size() const noexcept { return num_features() * num_classes(); }
    double smoothing() const noexcept { return smoothing_; }

    const std::vector<FeatureCoding>& features() const noexcept { return features_; }
    const FeatureCoding& feature(std::size_t n) const { return features_.at(n); }
    const std::vector<std::size_t>& class_counts() const noexcept { return class_counts_; }
    const std::vector<double>& priors() const noexcept { return priors_; }

    /// Smoothed log P(cell | C_j) = log((m_cell,j + lambda) / (m_j + lambda * #cells)).
    /// An unfitted cell (nullopt) yields the uniform value log(1 / #cells).
    double log_conditional(std::size_t feature, CellIndex cell, std::size_t j) const;

    CellIndex cell(std::size_t feature, const Value& value) const;
    std::vector<CellIndex> cells(const Instance& instance) const;

    std::vector<double> encode(const Instance& instance) const;
    std::vector<double> encode_cells(std::span<const CellIndex> cells) const;

    friend bool operator==(const Codebook& a, const Codebook& b) {
        return a.schema_ == b.schema_ && a.features_ == b.features_ && a.class_counts_ == b.class_counts_ &&
               a.smoothing_ == b.smoothing_;
    }

private:
    Schema schema_;
    std::vector<FeatureCoding> features_;
    std::vector<std::size_t> class_counts_;
    std::vector<double> priors_;
    double smoothing_ = 1.0;
    // log_table_[n][cell * J + j]; the extra trailing J entries hold the uniform value.
    std::vector<std::vector<double>> log_table_;
};

/// Fits one partition per feature on a labeled dataset.
Codebook build_codebook(const Dataset& data);

/// Cell index of every (row, feature) of `data`.
std::vector<std::vector<CellIndex>> cell_rows(const Codebook& codebook, const Dataset& data);

/// Encoded m x (d*J) matrix.
Matrix encode_dataset(const Codebook& codebook, const Dataset& data);

}  // namespace pkm
