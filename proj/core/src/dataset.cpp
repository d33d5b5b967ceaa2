#include "pkm/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "pkm/csv.hpp"
#include "pkm/error.hpp"

namespace pkm {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace

std::string_view to_string(FeatureKind kind) noexcept {
    return kind == FeatureKind::Numeric ? "numeric" : "categorical";
}

FeatureKind parse_feature_kind(std::string_view text) {
    std::string lower;
    for (char c : trim(text)) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "numeric" || lower == "numerical" || lower == "continuous") return FeatureKind::Numeric;
    if (lower == "categorical" || lower == "nominal" || lower == "symbolic") return FeatureKind::Categorical;
    throw DataError("unknown feature kind '" + std::string(text) + "'");
}

Schema::Schema(std::vector<Feature> features, std::string target, std::vector<std::string> class_labels)
    : features_(std::move(features)), target_(std::move(target)), class_labels_(std::move(class_labels)) {
    std::set<std::string_view> names;
    for (const auto& f : features_) {
        if (f.name.empty()) throw DataError("feature with empty name");
        if (!names.insert(f.name).second) throw DataError("duplicate feature name '" + f.name + "'");
    }
    if (target_.empty()) throw DataError("schema has no target");
    if (names.contains(target_)) throw DataError("target '" + target_ + "' is also declared as a feature");
    std::set<std::string_view> labels;
    for (const auto& l : class_labels_) {
        if (!labels.insert(l).second) throw DataError("duplicate class label '" + l + "'");
    }
}

std::optional<std::size_t> Schema::feature_index(std::string_view name) const {
    for (std::size_t n = 0; n < features_.size(); ++n) {
        if (features_[n].name == name) return n;
    }
    return std::nullopt;
}

std::optional<int> Schema::class_index(std::string_view label) const {
    for (std::size_t j = 0; j < class_labels_.size(); ++j) {
        if (class_labels_[j] == label) return static_cast<int>(j);
    }
    return std::nullopt;
}

bool Schema::same_features(const Schema& other) const noexcept {
    return features_ == other.features_ && target_ == other.target_;
}

Schema with_class_labels(Schema schema, std::vector<std::string> labels) {
    return Schema(std::move(schema.features_), std::move(schema.target_), std::move(labels));
}

Dataset::Dataset(Schema schema, std::vector<Column> columns, std::vector<int> labels)
    : schema_(std::move(schema)), columns_(std::move(columns)), labels_(std::move(labels)) {
    if (columns_.size() != schema_.num_features()) {
        throw DataError("column count " + std::to_string(columns_.size()) + " does not match schema (" +
                        std::to_string(schema_.num_features()) + " features)");
    }
    rows_ = columns_.empty() ? labels_.size()
                             : std::visit([](const auto& c) { return c.size(); }, columns_.front());
    for (std::size_t n = 0; n < columns_.size(); ++n) {
        const bool numeric = std::holds_alternative<NumericColumn>(columns_[n]);
        if (numeric != (schema_.feature(n).kind == FeatureKind::Numeric)) {
            throw DataError("column '" + schema_.feature(n).name + "' does not match its declared kind");
        }
        const auto len = std::visit([](const auto& c) { return c.size(); }, columns_[n]);
        if (len != rows_) throw DataError("ragged columns");
    }
    if (!labels_.empty()) {
        if (labels_.size() != rows_) throw DataError("label count does not match row count");
        if (schema_.num_classes() < 2) throw DataError("a labeled dataset needs at least 2 classes");
        for (int c : labels_) {
            if (c < 0 || static_cast<std::size_t>(c) >= schema_.num_classes()) {
                throw DataError("label index out of range");
            }
        }
    }
}

Dataset Dataset::from_rows(Schema schema, std::span<const Instance> rows, std::vector<int> labels) {
    std::vector<Column> columns;
    columns.reserve(schema.num_features());
    for (std::size_t n = 0; n < schema.num_features(); ++n) {
        if (schema.feature(n).kind == FeatureKind::Numeric) {
            NumericColumn col;
            col.reserve(rows.size());
            for (const auto& row : rows) {
                if (row.size() != schema.num_features()) throw DataError("row arity does not match schema");
                if (is_missing(row[n])) {
                    col.emplace_back();
                } else if (const auto* x = std::get_if<double>(&row[n])) {
                    col.emplace_back(*x);
                } else {
                    throw DataError("categorical value in numeric feature '" + schema.feature(n).name + "'");
                }
            }
            columns.emplace_back(std::move(col));
        } else {
            CategoricalColumn col;
            col.reserve(rows.size());
            for (const auto& row : rows) {
                if (row.size() != schema.num_features()) throw DataError("row arity does not match schema");
                if (is_missing(row[n])) {
                    col.emplace_back();
                } else if (const auto* s = std::get_if<std::string>(&row[n])) {
                    col.emplace_back(*s);
                } else {
                    throw DataError("numeric value in categorical feature '" + schema.feature(n).name + "'");
                }
            }
            columns.emplace_back(std::move(col));
        }
    }
    if (schema.num_features() == 0 && labels.size() != rows.size()) {
        throw DataError("label count does not match row count");
    }
    return Dataset(std::move(schema), std::move(columns), std::move(labels));
}

const NumericColumn& Dataset::numeric(std::size_t n) const {
    const auto* col = std::get_if<NumericColumn>(&columns_.at(n));
    if (!col) throw DataError("feature '" + schema_.feature(n).name + "' is not numeric");
    return *col;
}

const CategoricalColumn& Dataset::categorical(std::size_t n) const {
    const auto* col = std::get_if<CategoricalColumn>(&columns_.at(n));
    if (!col) throw DataError("feature '" + schema_.feature(n).name + "' is not categorical");
    return *col;
}

Value Dataset::value(std::size_t row, std::size_t n) const {
    return std::visit(
        [row](const auto& col) -> Value {
            const auto& cell = col.at(row);
            if (!cell) return std::monostate{};
            return *cell;
        },
        columns_.at(n));
}

Instance Dataset::instance(std::size_t row) const {
    Instance out;
    out.reserve(columns_.size());
    for (std::size_t n = 0; n < columns_.size(); ++n) out.push_back(value(row, n));
    return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    std::vector<Column> columns;
    columns.reserve(columns_.size());
    for (const auto& column : columns_) {
        columns.push_back(std::visit(
            [&](const auto& col) -> Column {
                std::remove_cvref_t<decltype(col)> out;
                out.reserve(rows.size());
                for (auto r : rows) out.push_back(col.at(r));
                return out;
            },
            column));
    }
    std::vector<int> labels;
    if (has_labels()) {
        labels.reserve(rows.size());
        for (auto r : rows) labels.push_back(labels_.at(r));
    }
    Dataset out(schema_, std::move(columns), std::move(labels));
    out.rows_ = rows.size();
    return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(schema_.num_classes(), 0);
    for (int c : labels_) ++counts[static_cast<std::size_t>(c)];
    return counts;
}

Dataset read_csv(std::istream& in, const std::optional<Schema>& declared, LabelMode mode) {
    auto records = csv::read_records(in);
    if (records.empty()) throw DataError("empty file");
    const auto header = records.front();
    const std::size_t width = header.size();
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != width) {
            throw DataError("row " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                            " fields, header has " + std::to_string(width));
        }
    }
    const std::size_t m = records.size() - 1;
    if (m == 0) throw DataError("file has a header but no rows");

    std::vector<std::string> names;
    for (const auto& h : header) names.emplace_back(trim(h));

    auto column_of = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t c = 0; c < names.size(); ++c) {
            if (names[c] == name) return c;
        }
        return std::nullopt;
    };

    Schema schema;
    std::vector<std::size_t> feature_columns;
    std::optional<std::size_t> target_column;
    if (declared) {
        schema = *declared;
        for (const auto& f : schema.features()) {
            auto c = column_of(f.name);
            if (!c) throw SchemaMismatch("header lacks declared feature '" + f.name + "'");
            feature_columns.push_back(*c);
        }
        target_column = column_of(schema.target());
        if (!target_column && mode == LabelMode::Required) {
            throw SchemaMismatch("header lacks target column '" + schema.target() + "'");
        }
        const std::size_t expected = schema.num_features() + (target_column ? 1 : 0);
        if (width != expected) {
            throw SchemaMismatch("header has " + std::to_string(width) + " columns, schema declares " +
                                 std::to_string(expected));
        }
    } else {
        if (width < 2) throw DataError("need at least one feature column and a target column");
        std::vector<Feature> features;
        for (std::size_t c = 0; c + 1 < width; ++c) {
            bool numeric = true;
            for (std::size_t r = 1; r <= m && numeric; ++r) {
                const auto cell = trim(records[r][c]);
                if (!cell.empty() && !parse_number(cell)) numeric = false;
            }
            features.push_back({names[c], numeric ? FeatureKind::Numeric : FeatureKind::Categorical});
            feature_columns.push_back(c);
        }
        target_column = width - 1;
        schema = Schema(std::move(features), names.back());
    }

    std::vector<Column> columns;
    for (std::size_t n = 0; n < schema.num_features(); ++n) {
        const std::size_t c = feature_columns[n];
        if (schema.feature(n).kind == FeatureKind::Numeric) {
            NumericColumn col;
            col.reserve(m);
            for (std::size_t r = 1; r <= m; ++r) {
                const auto cell = trim(records[r][c]);
                if (cell.empty()) {
                    col.emplace_back();
                    continue;
                }
                auto x = parse_number(cell);
                if (!x) {
                    throw DataError("row " + std::to_string(r + 1) + ": cannot parse '" + std::string(cell) +
                                    "' as a number for feature '" + schema.feature(n).name + "'");
                }
                col.emplace_back(*x);
            }
            columns.emplace_back(std::move(col));
        } else {
            CategoricalColumn col;
            col.reserve(m);
            for (std::size_t r = 1; r <= m; ++r) {
                const auto cell = trim(records[r][c]);
                if (cell.empty()) {
                    col.emplace_back();
                } else {
                    col.emplace_back(std::string(cell));
                }
            }
            columns.emplace_back(std::move(col));
        }
    }

    std::vector<int> labels;
    if (target_column) {
        const bool fixed = schema.num_classes() > 0;
        std::vector<std::string> classes = schema.class_labels();
        labels.reserve(m);
        for (std::size_t r = 1; r <= m; ++r) {
            const std::string label(trim(records[r][*target_column]));
            if (label.empty()) throw DataError("row " + std::to_string(r + 1) + ": missing class label");
            auto it = std::find(classes.begin(), classes.end(), label);
            if (it == classes.end()) {
                if (fixed) throw DataError("row " + std::to_string(r + 1) + ": unknown class label '" + label + "'");
                classes.push_back(label);
                it = classes.end() - 1;
            }
            labels.push_back(static_cast<int>(it - classes.begin()));
        }
        if (!fixed) schema = with_class_labels(std::move(schema), std::move(classes));
    }
    return Dataset(std::move(schema), std::move(columns), std::move(labels));
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<Schema>& declared, LabelMode mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return read_csv(in, declared, mode);
}

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_csv(const Dataset& data, std::ostream& out) {
    const auto& schema = data.schema();
    csv::Record header;
    for (const auto& f : schema.features()) header.push_back(f.name);
    if (data.has_labels()) header.push_back(schema.target());
    out << csv::join(header) << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        csv::Record row;
        for (std::size_t n = 0; n < data.num_features(); ++n) {
            const Value v = data.value(i, n);
            if (const auto* x = std::get_if<double>(&v)) {
                row.push_back(format_number(*x));
            } else if (const auto* s = std::get_if<std::string>(&v)) {
                row.push_back(*s);
            } else {
                row.emplace_back();
            }
        }
        if (data.has_labels()) row.push_back(schema.class_labels()[static_cast<std::size_t>(data.label(i))]);
        out << csv::join(row) << '\n';
    }
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    write_csv(data, out);
}

Schema read_schema(std::istream& in) {
    const auto records = csv::read_records(in);
    std::vector<Feature> features;
    std::optional<std::string> target;
    for (const auto& rec : records) {
        if (rec.size() != 2) throw DataError("schema lines must be `name,kind` or `target,<name>`");
        const std::string key(trim(rec[0]));
        const std::string val(trim(rec[1]));
        if (target) throw DataError("`target,<name>` must be the final schema line");
        if (key == "target") {
            target = val;
        } else {
            features.push_back({key, parse_feature_kind(val)});
        }
    }
    if (!target) throw DataError("schema has no `target,<name>` line");
    return Schema(std::move(features), *target);
}

Schema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open schema '" + path.string() + "'");
    return read_schema(in);
}

void write_schema(const Schema& schema, std::ostream& out) {
    for (const auto& f : schema.features()) {
        out << csv::join({f.name, std::string(to_string(f.kind))}) << '\n';
    }
    out << csv::join({"target", schema.target()}) << '\n';
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        if (f == fold) continue;
        out.insert(out.end(), folds[f].begin(), folds[f].end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Integer fold-by-class count matrix whose entries are the floor or ceiling
// of size_f * n_c / m and whose margins are the fold sizes and class counts.
// The 0/1 residual is found by augmenting paths on the folds x classes graph.
std::vector<std::vector<std::size_t>> rounded_counts(std::span<const std::size_t> fold_sizes,
                                                     std::span<const std::size_t> class_sizes, std::size_t m) {
    const std::size_t k = fold_sizes.size();
    const std::size_t J = class_sizes.size();
    std::vector<std::vector<std::size_t>> counts(k, std::vector<std::size_t>(J));
    std::vector<std::vector<bool>> fractional(k, std::vector<bool>(J));
    std::vector<std::size_t> row_need(k), col_need(J);
    for (std::size_t f = 0; f < k; ++f) {
        for (std::size_t c = 0; c < J; ++c) {
            const std::size_t num = fold_sizes[f] * class_sizes[c];
            counts[f][c] = num / m;
            fractional[f][c] = num % m != 0;
        }
    }
    for (std::size_t f = 0; f < k; ++f) {
        std::size_t s = 0;
        for (std::size_t c = 0; c < J; ++c) s += counts[f][c];
        row_need[f] = fold_sizes[f] - s;
    }
    for (std::size_t c = 0; c < J; ++c) {
        std::size_t s = 0;
        for (std::size_t f = 0; f < k; ++f) s += counts[f][c];
        col_need[c] = class_sizes[c] - s;
    }

    // extra[f][c] == true when the entry is rounded up.
    std::vector<std::vector<bool>> extra(k, std::vector<bool>(J, false));
    std::vector<std::size_t> col_used(J, 0);
    std::vector<bool> seen(J);

    // Kuhn-style augmentation: each fold needs row_need[f] unit edges to
    // classes, each class accepts col_need[c] units.
    auto augment = [&](auto&& self, std::size_t f) -> bool {
        for (std::size_t c = 0; c < J; ++c) {
            if (!fractional[f][c] || extra[f][c] || seen[c]) continue;
            seen[c] = true;
            if (col_used[c] < col_need[c]) {
                extra[f][c] = true;
                ++col_used[c];
                return true;
            }
            for (std::size_t g = 0; g < k; ++g) {
                if (g == f || !extra[g][c]) continue;
                // Move class c's unit from fold g to f if g can be re-routed.
                extra[g][c] = false;
                extra[f][c] = true;
                if (self(self, g)) return true;
                extra[f][c] = false;
                extra[g][c] = true;
            }
        }
        return false;
    };
    for (std::size_t f = 0; f < k; ++f) {
        for (std::size_t u = 0; u < row_need[f]; ++u) {
            std::fill(seen.begin(), seen.end(), false);
            if (!augment(augment, f)) throw std::logic_error("stratified_kfold: rounding failed");
        }
    }
    for (std::size_t f = 0; f < k; ++f) {
        for (std::size_t c = 0; c < J; ++c) counts[f][c] += extra[f][c] ? 1 : 0;
    }
    return counts;
}

}  // namespace

FoldPlan stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("stratified_kfold: k must be at least 2");
    if (k > labels.size()) throw std::invalid_argument("stratified_kfold: k exceeds the number of rows");

    int max_label = -1;
    for (int c : labels) {
        if (c < 0) throw std::invalid_argument("stratified_kfold: negative label");
        max_label = std::max(max_label, c);
    }
    const std::size_t m = labels.size();
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(max_label + 1));
    for (std::size_t i = 0; i < m; ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);

    std::mt19937_64 rng(seed);

    // Balanced fold sizes; which folds take the remainder is seeded.
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> fold_sizes(k, m / k);
    for (std::size_t r = 0; r < m % k; ++r) ++fold_sizes[order[r]];

    std::vector<std::size_t> class_sizes;
    for (const auto& members : by_class) class_sizes.push_back(members.size());
    const auto counts = rounded_counts(fold_sizes, class_sizes, m);

    FoldPlan plan{seed, k, std::vector<std::vector<std::size_t>>(k)};
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& members = by_class[c];
        std::shuffle(members.begin(), members.end(), rng);
        std::size_t pos = 0;
        for (std::size_t f = 0; f < k; ++f) {
            for (std::size_t u = 0; u < counts[f][c]; ++u) plan.folds[f].push_back(members[pos++]);
        }
    }
    for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
    return plan;
}

}  // namespace pkm
