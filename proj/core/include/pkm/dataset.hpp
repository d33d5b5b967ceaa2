#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pkm {

enum class FeatureKind { Numeric, Categorical };

std::string_view to_string(FeatureKind kind) noexcept;
FeatureKind parse_feature_kind(std::string_view text);

struct Feature {
    std::string name;
    FeatureKind kind = FeatureKind::Numeric;

    friend bool operator==(const Feature&, const Feature&) = default;
};

/// Feature list, target name and the class label set. Class labels are
/// mapped to indices 0..J-1 in first-appearance order.
class Schema {
public:
    Schema() = default;
    Schema(std::vector<Feature> features, std::string target,
           std::vector<std::string> class_labels = {});

    const std::vector<Feature>& features() const noexcept { return features_; }
    const Feature& feature(std::size_t n) const { return features_.at(n); }
    std::size_t num_features() const noexcept { return features_.size(); }
    std::optional<std::size_t> feature_index(std::string_view name) const;

    const std::string& target() const noexcept { return target_; }

    const std::vector<std::string>& class_labels() const noexcept { return class_labels_; }
    std::size_t num_classes() const noexcept { return class_labels_.size(); }
    std::optional<int> class_index(std::string_view label) const;

    /// Same features and target; class labels are not compared.
    bool same_features(const Schema& other) const noexcept;

    friend bool operator==(const Schema&, const Schema&) = default;

private:
    friend class Dataset;
    friend Schema with_class_labels(Schema schema, std::vector<std::string> labels);

    std::vector<Feature> features_;
    std::string target_;
    std::vector<std::string> class_labels_;
};

Schema with_class_labels(Schema schema, std::vector<std::string> labels);

/// One cell: Missing, a numeric value, or a categorical token.
using Value = std::variant<std::monostate, double, std::string>;
using Instance = std::vector<Value>;

inline bool is_missing(const Value& v) noexcept { return std::holds_alternative<std::monostate>(v); }

using NumericColumn = std::vector<std::optional<double>>;
using CategoricalColumn = std::vector<std::optional<std::string>>;
using Column = std::variant<NumericColumn, CategoricalColumn>;

/// Immutable labeled table, stored column-wise. Labels are class indices
/// into schema().class_labels(). A dataset read for prediction may carry no
/// labels at all (has_labels() == false).
class Dataset {
public:
    Dataset(Schema schema, std::vector<Column> columns, std::vector<int> labels);

    static Dataset from_rows(Schema schema, std::span<const Instance> rows, std::vector<int> labels);

    const Schema& schema() const noexcept { return schema_; }
    std::size_t size() const noexcept { return rows_; }
    std::size_t num_features() const noexcept { return schema_.num_features(); }
    std::size_t num_classes() const noexcept { return schema_.num_classes(); }

    bool has_labels() const noexcept { return labels_.size() == rows_; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    int label(std::size_t i) const { return labels_.at(i); }

    const Column& column(std::size_t n) const { return columns_.at(n); }
    const NumericColumn& numeric(std::size_t n) const;
    const CategoricalColumn& categorical(std::size_t n) const;

    Value value(std::size_t row, std::size_t n) const;
    Instance instance(std::size_t row) const;

    /// Rows in the given order; schema (including class labels) is kept.
    Dataset subset(std::span<const std::size_t> rows) const;

    std::vector<std::size_t> class_counts() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    Schema schema_;
    std::vector<Column> columns_;
    std::vector<int> labels_;
    std::size_t rows_ = 0;
};

enum class LabelMode { Required, Optional };

/// Reads a headed CSV. When `declared` is given, every feature and the
/// target must appear in the header (any order); feature kinds come from it.
/// If `declared` already carries class labels, an unseen label is an error;
/// otherwise labels are collected in first-appearance order. Without a
/// declaration the last column is the target and a column whose non-empty
/// cells all parse as numbers is Numeric.
Dataset load_csv(const std::filesystem::path& path, const std::optional<Schema>& declared = std::nullopt,
                 LabelMode mode = LabelMode::Required);
Dataset read_csv(std::istream& in, const std::optional<Schema>& declared = std::nullopt,
                 LabelMode mode = LabelMode::Required);

void write_csv(const Dataset& data, std::ostream& out);
void save_csv(const Dataset& data, const std::filesystem::path& path);

/// Schema sidecar: one `name,kind` line per feature, final line `target,<name>`.
Schema load_schema(const std::filesystem::path& path);
Schema read_schema(std::istream& in);
void write_schema(const Schema& schema, std::ostream& out);

std::string format_number(double value);

struct FoldPlan {
    std::uint64_t seed = 0;
    std::size_t k = 0;
    std::vector<std::vector<std::size_t>> folds;

    std::vector<std::size_t> test_indices(std::size_t fold) const { return folds.at(fold); }
    std::vector<std::size_t> train_indices(std::size_t fold) const;

    friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

/// Stratified k-fold assignment. Fold sizes differ by at most one, and the
/// number of class-c rows in fold f is floor or ceil of |f| * n_c / m. Rows of
/// each class are shuffled with `seed` before being dealt out.
FoldPlan stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed);

}  // namespace pkm
