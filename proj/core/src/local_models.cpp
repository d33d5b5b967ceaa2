#include "pkm/local_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pkm {

namespace {

double log_sum_exp(std::span<const double> v) {
    const double top = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - top);
    return top + std::log(s);
}

std::vector<double> normalize_log(std::vector<double> scores) {
    const double z = log_sum_exp(scores);
    for (double& s : scores) s = std::exp(s - z);
    return scores;
}

void check_cluster(std::span<const CellRow> cells, std::span<const int> labels, const Codebook& codebook) {
    if (cells.size() != labels.size()) throw std::invalid_argument("cells and labels differ in length");
    for (const auto& row : cells) {
        if (row.size() != codebook.num_features()) throw std::invalid_argument("cell row does not match codebook");
    }
    for (int c : labels) {
        if (c < 0 || static_cast<std::size_t>(c) >= codebook.num_classes()) {
            throw std::invalid_argument("label out of range");
        }
    }
}

std::vector<double> local_log_priors(std::span<const int> labels, std::size_t J) {
    std::vector<std::size_t> counts(J, 0);
    for (int c : labels) ++counts[static_cast<std::size_t>(c)];
    std::vector<double> out(J);
    const double denom = static_cast<double>(labels.size() + J);
    for (std::size_t j = 0; j < J; ++j) out[j] = std::log((static_cast<double>(counts[j]) + 1.0) / denom);
    return out;
}

// Laplace-smoothed log P(cell | j) over the members of a cluster.
std::vector<double> local_log_conditionals(std::span<const CellRow> cells, std::span<const int> labels,
                                           const Codebook& codebook, std::size_t f) {
    const std::size_t J = codebook.num_classes();
    const std::size_t n_cells = codebook.feature(f).num_cells();
    std::vector<std::size_t> counts(n_cells * J, 0);
    std::vector<std::size_t> per_class(J, 0);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto cell = cells[i][f];
        if (!cell) continue;
        const auto j = static_cast<std::size_t>(labels[i]);
        ++counts[*cell * J + j];
        ++per_class[j];
    }
    std::vector<double> out(n_cells * J);
    for (std::size_t c = 0; c < n_cells; ++c) {
        for (std::size_t j = 0; j < J; ++j) {
            out[c * J + j] = std::log((static_cast<double>(counts[c * J + j]) + 1.0) /
                                      (static_cast<double>(per_class[j]) + static_cast<double>(n_cells)));
        }
    }
    return out;
}

double selection_penalty(std::size_t selected, std::size_t d) {
    return static_cast<double>(selected) * std::log(static_cast<double>(d) + 1.0);
}

}  // namespace

int argmax_label(std::span<const double> probabilities) {
    if (probabilities.empty()) throw std::invalid_argument("argmax of an empty vector");
    return static_cast<int>(std::max_element(probabilities.begin(), probabilities.end()) - probabilities.begin());
}

int MajorityVote::label() const {
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

MajorityVote make_majority_vote(std::vector<std::size_t> counts) {
    if (counts.empty()) throw std::invalid_argument("majority vote needs at least one class");
    const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    const double denom = static_cast<double>(total + counts.size());
    MajorityVote mv{std::move(counts), {}};
    mv.probabilities.reserve(mv.counts.size());
    for (auto c : mv.counts) mv.probabilities.push_back((static_cast<double>(c) + 1.0) / denom);
    return mv;
}

MajorityVote fit_mv(std::span<const int> labels, std::size_t num_classes) {
    if (labels.empty()) throw std::invalid_argument("fit_mv: empty cluster");
    std::vector<std::size_t> counts(num_classes, 0);
    for (int c : labels) {
        if (c < 0 || static_cast<std::size_t>(c) >= num_classes) throw std::invalid_argument("fit_mv: bad label");
        ++counts[static_cast<std::size_t>(c)];
    }
    return make_majority_vote(std::move(counts));
}

std::vector<std::size_t> SnbModel::selected_features() const {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < weights.size(); ++f) {
        if (weights[f] > 0.0) out.push_back(f);
    }
    return out;
}

SnbModel estimate_snb(std::span<const CellRow> cells, std::span<const int> labels, const Codebook& codebook,
                      std::span<const double> weights) {
    check_cluster(cells, labels, codebook);
    if (weights.size() != codebook.num_features()) throw std::invalid_argument("one weight per feature required");
    SnbModel model;
    model.weights.assign(weights.begin(), weights.end());
    model.log_priors = local_log_priors(labels, codebook.num_classes());
    model.log_conditionals.resize(codebook.num_features());
    for (std::size_t f = 0; f < weights.size(); ++f) {
        if (weights[f] < 0.0 || weights[f] > 1.0) throw std::invalid_argument("weights must lie in [0, 1]");
        if (weights[f] > 0.0) model.log_conditionals[f] = local_log_conditionals(cells, labels, codebook, f);
    }
    return model;
}

namespace {

std::vector<double> snb_scores(const SnbModel& model, std::span<const CellIndex> cells) {
    const std::size_t J = model.num_classes();
    std::vector<double> scores = model.log_priors;
    for (std::size_t f = 0; f < model.weights.size(); ++f) {
        const double w = model.weights[f];
        if (w <= 0.0 || !cells[f]) continue;
        const auto& table = model.log_conditionals[f];
        const std::size_t c = *cells[f];
        if ((c + 1) * J > table.size()) throw std::out_of_range("snb: cell index out of range");
        for (std::size_t j = 0; j < J; ++j) scores[j] += w * table[c * J + j];
    }
    return scores;
}

double training_log_loss(const SnbModel& model, std::span<const CellRow> cells, std::span<const int> labels) {
    double loss = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto scores = snb_scores(model, cells[i]);
        loss += log_sum_exp(scores) - scores[static_cast<std::size_t>(labels[i])];
    }
    return loss;
}

}  // namespace

double snb_selection_cost(std::span<const CellRow> cells, std::span<const int> labels, const Codebook& codebook,
                          std::span<const double> weights) {
    const auto model = estimate_snb(cells, labels, codebook, weights);
    const auto selected = model.selected_features().size();
    return training_log_loss(model, cells, labels) + selection_penalty(selected, codebook.num_features());
}

std::optional<SnbModel> fit_snb(std::span<const CellRow> cells, std::span<const int> labels,
                                const Codebook& codebook) {
    check_cluster(cells, labels, codebook);
    const std::size_t J = codebook.num_classes();
    const std::size_t d = codebook.num_features();
    const std::size_t m = labels.size();

    std::vector<bool> present(J, false);
    for (int c : labels) present[static_cast<std::size_t>(c)] = true;
    if (std::count(present.begin(), present.end(), true) < 2) return std::nullopt;

    std::vector<std::size_t> order;
    for (std::size_t f = 0; f < d; ++f) {
        if (codebook.feature(f).num_cells() > 1) order.push_back(f);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return codebook.feature(a).level > codebook.feature(b).level;
    });

    // Per-instance class scores of the current selection.
    const auto priors = local_log_priors(labels, J);
    std::vector<double> scores(m * J);
    for (std::size_t i = 0; i < m; ++i) std::copy(priors.begin(), priors.end(), scores.begin() + static_cast<std::ptrdiff_t>(i * J));

    auto loss_of = [&](const std::vector<double>& s) {
        double loss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const std::span<const double> row(s.data() + i * J, J);
            loss += log_sum_exp(row) - row[static_cast<std::size_t>(labels[i])];
        }
        return loss;
    };

    std::vector<double> weights(d, 0.0);
    std::size_t selected = 0;
    double current = loss_of(scores);
    for (auto f : order) {
        const auto table = local_log_conditionals(cells, labels, codebook, f);
        auto candidate = scores;
        for (std::size_t i = 0; i < m; ++i) {
            const auto cell = cells[i][f];
            if (!cell) continue;
            for (std::size_t j = 0; j < J; ++j) candidate[i * J + j] += table[*cell * J + j];
        }
        const double cost = loss_of(candidate) + selection_penalty(selected + 1, d);
        if (cost < current) {
            current = cost;
            scores = std::move(candidate);
            weights[f] = 1.0;
            ++selected;
        }
    }
    if (selected == 0) return std::nullopt;

    auto model = estimate_snb(cells, labels, codebook, weights);
    model.selection_cost = training_log_loss(model, cells, labels) + selection_penalty(selected, d);
    const std::vector<double> none(d, 0.0);
    model.null_cost = training_log_loss(estimate_snb(cells, labels, codebook, none), cells, labels);
    if (!(model.selection_cost < model.null_cost)) return std::nullopt;
    return model;
}

std::vector<double> snb_predict(const SnbModel& model, std::span<const CellIndex> cells) {
    if (cells.size() != model.weights.size()) throw std::invalid_argument("snb_predict: cell vector size mismatch");
    return normalize_log(snb_scores(model, cells));
}

std::size_t ClusterPredictor::size() const {
    return std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
}

std::vector<double> ClusterPredictor::predict_proba(std::span<const CellIndex> cells) const {
    if (const auto* mv = std::get_if<MajorityVote>(&model)) return mv->probabilities;
    return snb_predict(std::get<SnbModel>(model), cells);
}

double hoeffding_bound(double cluster_size, double epsilon) {
    if (!(cluster_size >= 1.0)) throw std::invalid_argument("hoeffding_bound: m_k must be >= 1");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("hoeffding_bound: epsilon must be >= 0");
    return 2.0 * std::exp(-2.0 * cluster_size * epsilon * epsilon);
}

}  // namespace pkm
