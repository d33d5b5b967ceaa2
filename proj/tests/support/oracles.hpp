#pragma once

// Reference implementations used only by tests. They are written
// independently of core/ (direct formulas, brute force) so that agreement is
// meaningful.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pkm/dataset.hpp"

namespace oracle {

using Table = std::vector<std::vector<std::size_t>>;

/// log n! as a plain sum of logs.
double log_fact(std::size_t n);

/// MODL interval cost of a partition given as per-interval class counts.
double interval_cost(const Table& intervals);

/// MODL grouping cost over V categories.
double grouping_cost(const Table& groups, std::size_t num_values);

/// Per-distinct-value class counts of a numeric sample, in increasing value order.
Table elementary_table(std::span<const double> values, std::span<const int> labels, std::size_t J);

/// Minimum interval cost over every contiguous partition of the rows of `elementary`.
double best_interval_cost(const Table& elementary);

/// Minimum grouping cost over every set partition of the rows of `values`.
double best_grouping_cost(const Table& values);

/// Fraction of (positive, negative) pairs ranked correctly, ties counting 1/2.
double auc_all_pairs(std::span<const double> scores, std::span<const bool> positive);

/// sum over points of the squared distance to the assigned center, two nested loops.
double inertia(const std::vector<std::vector<double>>& points, std::span<const std::size_t> assignment,
               const std::vector<std::vector<double>>& centers);

/// Plain naive Bayes posterior from raw counts with Laplace smoothing:
/// prior (n_j+1)/(m+J), conditional (n_cj+1)/(n_j+cells_f). cells[i][f] may be
/// nullopt (ignored). Returns P(j | query).
std::vector<double> naive_bayes(const std::vector<std::vector<std::optional<std::size_t>>>& cells,
                                std::span<const int> labels, std::size_t J, std::span<const std::size_t> cells_per_feature,
                                const std::vector<std::optional<std::size_t>>& query);

/// Isotropic Gaussian blobs: class c centered at c * separation on every axis.
pkm::Dataset blobs(std::size_t m, std::size_t d, std::size_t J, double separation, std::uint64_t seed);

}  // namespace oracle
