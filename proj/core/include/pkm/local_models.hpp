#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "pkm/encoding.hpp"

namespace pkm {

/// Laplace-smoothed class frequencies of a cluster: (count_j + 1) / (m_k + J).
struct MajorityVote {
    std::vector<std::size_t> counts;
    std::vector<double> probabilities;

    /// Most frequent class, ties to the lowest index.
    int label() const;

    friend bool operator==(const MajorityVote&, const MajorityVote&) = default;
};

MajorityVote make_majority_vote(std::vector<std::size_t> counts);

/// Throws std::invalid_argument for an empty cluster.
MajorityVote fit_mv(std::span<const int> labels, std::size_t num_classes);

/// Naive Bayes restricted to features with nonzero weight, estimated on the
/// cluster's members over the global codebook cells:
///   P(j | x) ~ P(j) * prod_f P(cell_f | j)^{W_f}
struct SnbModel {
    std::vector<double> weights;                       // W_f per feature
    std::vector<double> log_priors;                    // log((n_j + 1) / (m_k + J))
    std::vector<std::vector<double>> log_conditionals;  // [f][cell * J + j], empty when W_f == 0
    double selection_cost = 0.0;  // cost of the stored selection on its training cluster
    double null_cost = 0.0;       // cost of the empty selection

    std::size_t num_classes() const noexcept { return log_priors.size(); }
    std::vector<std::size_t> selected_features() const;

    friend bool operator==(const SnbModel&, const SnbModel&) = default;
};

using CellRow = std::vector<CellIndex>;

/// Local estimates for an explicit weight vector (selection costs are left 0).
SnbModel estimate_snb(std::span<const CellRow> cells, std::span<const int> labels, const Codebook& codebook,
                      std::span<const double> weights);

/// Penalized training log-loss of a weighted naive Bayes on the cluster:
///   sum_i -log P_S(c_i | x_i) + |S| * log(d + 1)
double snb_selection_cost(std::span<const CellRow> cells, std::span<const int> labels, const Codebook& codebook,
                          std::span<const double> weights);

/// Greedy forward selection over features ordered by decreasing codebook
/// level; a feature is kept iff it strictly lowers the selection cost.
/// Returns nullopt when fewer than two classes are present or when no
/// feature is kept.
std::optional<SnbModel> fit_snb(std::span<const CellRow> cells, std::span<const int> labels,
                                const Codebook& codebook);

std::vector<double> snb_predict(const SnbModel& model, std::span<const CellIndex> cells);

struct ClusterPredictor {
    std::variant<MajorityVote, SnbModel> model;
    bool pure = false;
    std::vector<std::size_t> class_counts;  // training members per class

    bool has_local_model() const noexcept { return std::holds_alternative<SnbModel>(model); }
    std::size_t size() const;
    std::vector<double> predict_proba(std::span<const CellIndex> cells) const;

    friend bool operator==(const ClusterPredictor&, const ClusterPredictor&) = default;
};

/// Index of the largest probability, ties to the lowest index.
int argmax_label(std::span<const double> probabilities);

/// 2 exp(-2 m_k eps^2), the two-sided Hoeffding bound on the deviation of the
/// majority frequency from its true value.
double hoeffding_bound(double cluster_size, double epsilon);

}  // namespace pkm
