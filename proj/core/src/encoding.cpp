#include "pkm/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pkm/error.hpp"

namespace pkm {

namespace {

void check_inputs(std::size_t values, std::span<const int> labels, std::size_t num_classes) {
    if (values == 0) throw std::invalid_argument("cannot fit a partition on an empty feature");
    if (labels.size() != values) throw std::invalid_argument("values and labels differ in length");
    if (num_classes == 0) throw std::invalid_argument("num_classes must be positive");
    for (int c : labels) {
        if (c < 0 || static_cast<std::size_t>(c) >= num_classes) throw std::invalid_argument("label out of range");
    }
}

std::vector<std::size_t> column_sums(const modl::CountTable& table, std::size_t J) {
    std::vector<std::size_t> sums(J, 0);
    for (const auto& row : table) {
        for (std::size_t j = 0; j < J; ++j) sums[j] += row[j];
    }
    return sums;
}

}  // namespace

CellIndex IntervalPartition::cell_of(std::optional<double> value) const {
    if (!value) {
        if (has_missing_cell) return num_cells() - 1;
        return std::nullopt;
    }
    return static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), *value) - cuts.begin());
}

CellIndex ValueGrouping::cell_of(const std::optional<std::string>& token) const {
    if (!token) return missing_group;
    auto it = group_of.find(*token);
    if (it == group_of.end()) return std::nullopt;
    return it->second;
}

IntervalPartition discretize_numeric(std::span<const std::optional<double>> values, std::span<const int> labels,
                                     std::size_t num_classes, std::size_t max_elementary) {
    check_inputs(values.size(), labels, num_classes);
    if (max_elementary == 0) throw std::invalid_argument("max_elementary must be positive");

    std::vector<std::pair<double, int>> present;
    std::vector<std::size_t> missing(num_classes, 0);
    bool any_missing = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i]) {
            present.emplace_back(*values[i], labels[i]);
        } else {
            ++missing[static_cast<std::size_t>(labels[i])];
            any_missing = true;
        }
    }

    IntervalPartition out;
    if (present.empty()) {
        out.counts.assign(1, std::vector<std::size_t>(num_classes, 0));
    } else {
        std::sort(present.begin(), present.end());

        // Distinct values with their class counts.
        std::vector<double> first_value, last_value;
        modl::CountTable elementary;
        for (const auto& [x, c] : present) {
            if (elementary.empty() || x != last_value.back()) {
                first_value.push_back(x);
                last_value.push_back(x);
                elementary.emplace_back(num_classes, 0);
            }
            ++elementary.back()[static_cast<std::size_t>(c)];
        }

        // Equal-frequency pre-binning; a distinct value is never split.
        if (elementary.size() > max_elementary) {
            const double target = static_cast<double>(present.size()) / static_cast<double>(max_elementary);
            modl::CountTable binned;
            std::vector<double> bin_first, bin_last;
            std::size_t cumulative = 0;
            std::size_t bin = 0;
            for (std::size_t v = 0; v < elementary.size(); ++v) {
                if (binned.size() == bin) {
                    binned.emplace_back(num_classes, 0);
                    bin_first.push_back(first_value[v]);
                    bin_last.push_back(last_value[v]);
                }
                for (std::size_t j = 0; j < num_classes; ++j) binned.back()[j] += elementary[v][j];
                bin_last.back() = last_value[v];
                cumulative += std::accumulate(elementary[v].begin(), elementary[v].end(), std::size_t{0});
                while (static_cast<double>(cumulative) >= target * static_cast<double>(bin + 1)) ++bin;
            }
            elementary = std::move(binned);
            first_value = std::move(bin_first);
            last_value = std::move(bin_last);
        }

        const auto search = modl::merge_intervals(elementary);
        std::size_t begin = 0;
        for (std::size_t k = 0; k < search.ends.size(); ++k) {
            const std::size_t end = search.ends[k];
            std::vector<std::size_t> row(num_classes, 0);
            for (std::size_t v = begin; v < end; ++v) {
                for (std::size_t j = 0; j < num_classes; ++j) row[j] += elementary[v][j];
            }
            out.counts.push_back(std::move(row));
            if (end < elementary.size()) {
                const double lo = last_value[end - 1];
                const double hi = first_value[end];
                double cut = lo + (hi - lo) / 2.0;
                if (!(cut >= lo && cut < hi)) cut = lo;
                out.cuts.push_back(cut);
            }
            begin = end;
        }
    }
    if (any_missing) {
        out.counts.push_back(std::move(missing));
        out.has_missing_cell = true;
    }
    return out;
}

ValueGrouping group_categorical(std::span<const std::optional<std::string>> values, std::span<const int> labels,
                                std::size_t num_classes) {
    check_inputs(values.size(), labels, num_classes);

    // Missing (nullopt) sorts before every token.
    std::map<std::optional<std::string>, std::vector<std::size_t>> table;
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto& row = table[values[i]];
        if (row.empty()) row.assign(num_classes, 0);
        ++row[static_cast<std::size_t>(labels[i])];
    }
    modl::CountTable rows;
    for (const auto& [token, row] : table) rows.push_back(row);

    const auto search = modl::merge_groups(rows);

    ValueGrouping out;
    out.counts.assign(search.num_groups, std::vector<std::size_t>(num_classes, 0));
    std::size_t v = 0;
    for (const auto& [token, row] : table) {
        const std::size_t g = search.group_of[v++];
        if (token) {
            out.group_of.emplace(*token, g);
        } else {
            out.missing_group = g;
        }
        for (std::size_t j = 0; j < num_classes; ++j) out.counts[g][j] += row[j];
    }
    return out;
}

double partition_cost(const IntervalPartition& p) {
    modl::CountTable intervals(p.counts.begin(), p.counts.begin() + static_cast<std::ptrdiff_t>(p.num_intervals()));
    const auto total = column_sums(intervals, intervals.front().size());
    if (std::accumulate(total.begin(), total.end(), std::size_t{0}) == 0) return 0.0;
    return modl::interval_cost(intervals);
}

double partition_cost(const ValueGrouping& g) {
    const std::size_t values = g.group_of.size() + (g.missing_group ? 1 : 0);
    return modl::grouping_cost(g.counts, values);
}

std::size_t FeatureCoding::num_cells() const {
    return std::visit([](const auto& p) { return p.num_cells(); }, partition);
}

const modl::CountTable& FeatureCoding::counts() const {
    return std::visit([](const auto& p) -> const modl::CountTable& { return p.counts; }, partition);
}

Codebook::Codebook(Schema schema, std::vector<FeatureCoding> features, std::vector<std::size_t> class_counts,
                   double smoothing)
    : schema_(std::move(schema)),
      features_(std::move(features)),
      class_counts_(std::move(class_counts)),
      smoothing_(smoothing) {
    const std::size_t J = class_counts_.size();
    if (J == 0) throw std::invalid_argument("codebook needs at least one class");
    if (!(smoothing_ > 0.0)) throw std::invalid_argument("smoothing must be positive");
    if (features_.size() != schema_.num_features()) {
        throw std::invalid_argument("codebook feature count does not match schema");
    }
    const std::size_t m = std::accumulate(class_counts_.begin(), class_counts_.end(), std::size_t{0});
    if (m == 0) throw std::invalid_argument("codebook class counts are all zero");
    priors_.resize(J);
    for (std::size_t j = 0; j < J; ++j) priors_[j] = static_cast<double>(class_counts_[j]) / static_cast<double>(m);

    log_table_.reserve(features_.size());
    for (std::size_t n = 0; n < features_.size(); ++n) {
        const auto& coding = features_[n];
        if (coding.feature != schema_.feature(n)) throw std::invalid_argument("codebook feature does not match schema");
        const bool numeric = std::holds_alternative<IntervalPartition>(coding.partition);
        if (numeric != (coding.feature.kind == FeatureKind::Numeric)) {
            throw std::invalid_argument("partition type does not match feature kind");
        }
        const auto& counts = coding.counts();
        const std::size_t cells = counts.size();
        if (cells == 0) throw std::invalid_argument("partition without cells");
        for (const auto& row : counts) {
            if (row.size() != J) throw std::invalid_argument("partition counts have wrong class count");
        }
        const auto per_class = column_sums(counts, J);
        std::vector<double> table((cells + 1) * J);
        for (std::size_t c = 0; c < cells; ++c) {
            for (std::size_t j = 0; j < J; ++j) {
                table[c * J + j] = std::log((static_cast<double>(counts[c][j]) + smoothing_) /
                                            (static_cast<double>(per_class[j]) + smoothing_ * static_cast<double>(cells)));
            }
        }
        for (std::size_t j = 0; j < J; ++j) table[cells * J + j] = -std::log(static_cast<double>(cells));
        log_table_.push_back(std::move(table));
    }
}

double Codebook::log_conditional(std::size_t feature, CellIndex cell, std::size_t j) const {
    const auto& table = log_table_.at(feature);
    const std::size_t J = num_classes();
    const std::size_t cells = table.size() / J - 1;
    const std::size_t c = cell.value_or(cells);
    if (c > cells || j >= J) throw std::out_of_range("log_conditional: index out of range");
    return table[c * J + j];
}

CellIndex Codebook::cell(std::size_t feature, const Value& value) const {
    const auto& coding = features_.at(feature);
    if (const auto* intervals = std::get_if<IntervalPartition>(&coding.partition)) {
        if (is_missing(value)) return intervals->cell_of(std::nullopt);
        if (const auto* x = std::get_if<double>(&value)) return intervals->cell_of(*x);
        throw SchemaMismatch("feature '" + coding.feature.name + "' expects a numeric value");
    }
    const auto& grouping = std::get<ValueGrouping>(coding.partition);
    if (is_missing(value)) return grouping.cell_of(std::nullopt);
    if (const auto* s = std::get_if<std::string>(&value)) return grouping.cell_of(*s);
    throw SchemaMismatch("feature '" + coding.feature.name + "' expects a categorical token");
}

std::vector<CellIndex> Codebook::cells(const Instance& instance) const {
    if (instance.size() != num_features()) {
        throw SchemaMismatch("instance has " + std::to_string(instance.size()) + " values, codebook expects " +
                             std::to_string(num_features()));
    }
    std::vector<CellIndex> out(instance.size());
    for (std::size_t n = 0; n < instance.size(); ++n) out[n] = cell(n, instance[n]);
    return out;
}

std::vector<double> Codebook::encode_cells(std::span<const CellIndex> cells) const {
    if (cells.size() != num_features()) throw SchemaMismatch("cell vector does not match codebook");
    const std::size_t J = num_classes();
    std::vector<double> out(num_features() * J);
    for (std::size_t n = 0; n < cells.size(); ++n) {
        for (std::size_t j = 0; j < J; ++j) out[n * J + j] = log_conditional(n, cells[n], j);
    }
    return out;
}

std::vector<double> Codebook::encode(const Instance& instance) const {
    const auto c = cells(instance);
    return encode_cells(c);
}

Codebook build_codebook(const Dataset& data) {
    if (!data.has_labels() || data.size() == 0) throw DataError("build_codebook needs a non-empty labeled dataset");
    const std::size_t J = data.num_classes();
    const auto& labels = data.labels();
    std::vector<FeatureCoding> features;
    features.reserve(data.num_features());
    for (std::size_t n = 0; n < data.num_features(); ++n) {
        FeatureCoding coding{data.schema().feature(n), IntervalPartition{}};
        if (coding.feature.kind == FeatureKind::Numeric) {
            auto p = discretize_numeric(data.numeric(n), labels, J);
            coding.cost = partition_cost(p);
            std::vector<std::size_t> present(J, 0);
            for (std::size_t c = 0; c < p.num_intervals(); ++c) {
                for (std::size_t j = 0; j < J; ++j) present[j] += p.counts[c][j];
            }
            const bool empty = std::accumulate(present.begin(), present.end(), std::size_t{0}) == 0;
            coding.null_cost = empty ? 0.0 : modl::null_interval_cost(present);
            coding.partition = std::move(p);
        } else {
            auto g = group_categorical(data.categorical(n), labels, J);
            const std::size_t values = g.group_of.size() + (g.missing_group ? 1 : 0);
            coding.cost = partition_cost(g);
            coding.null_cost = modl::null_grouping_cost(column_sums(g.counts, J), values);
            coding.partition = std::move(g);
        }
        coding.level = modl::compression_level(coding.cost, coding.null_cost);
        features.push_back(std::move(coding));
    }
    return Codebook(data.schema(), std::move(features), data.class_counts());
}

std::vector<std::vector<CellIndex>> cell_rows(const Codebook& codebook, const Dataset& data) {
    if (!codebook.schema().same_features(data.schema())) throw SchemaMismatch("dataset schema differs from codebook");
    std::vector<std::vector<CellIndex>> out(data.size(), std::vector<CellIndex>(data.num_features()));
    for (std::size_t n = 0; n < data.num_features(); ++n) {
        for (std::size_t i = 0; i < data.size(); ++i) out[i][n] = codebook.cell(n, data.value(i, n));
    }
    return out;
}

Matrix encode_dataset(const Codebook& codebook, const Dataset& data) {
    const auto cells = cell_rows(codebook, data);
    Matrix out(data.size(), codebook.encoded_size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto row = codebook.encode_cells(cells[i]);
        std::copy(row.begin(), row.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace pkm
