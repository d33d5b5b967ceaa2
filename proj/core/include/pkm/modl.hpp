#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pkm::modl {

/// Rows are cells (intervals or groups), columns are classes.
using CountTable = std::vector<std::vector<std::size_t>>;

double log_factorial(std::size_t n);
double log_binomial(std::size_t n, std::size_t k);

/// Per-cell part of the criterion:
/// log C(n+J-1, J-1) + log(n! / (n_1! ... n_J!)).
double cell_cost(std::span<const std::size_t> class_counts);

/// Bayes cost of a contiguous partition of a numeric feature:
///   log m + log C(m+I-1, I-1) + sum_i cell_cost(interval i)
double interval_cost(const CountTable& intervals);

/// Cost of a grouping of V category values into G groups:
///   log V + log C(V+G-1, G-1) + log G! + sum_g cell_cost(group g)
double grouping_cost(const CountTable& groups, std::size_t num_values);

/// Cost of the single-cell model for the given class counts.
double null_interval_cost(std::span<const std::size_t> class_counts);
double null_grouping_cost(std::span<const std::size_t> class_counts, std::size_t num_values);

struct IntervalSearch {
    /// Exclusive end index (into the elementary intervals) of each merged interval.
    std::vector<std::size_t> ends;
    double cost = 0.0;
};

/// Bottom-up merging of adjacent elementary intervals. Every step applies the
/// cheapest adjacent merge (ties: leftmost); the sequence is followed down to
/// a single interval and the cheapest partition seen is returned.
IntervalSearch merge_intervals(const CountTable& elementary);

struct GroupSearch {
    /// Group index per input value, groups numbered by first member.
    std::vector<std::size_t> group_of;
    std::size_t num_groups = 0;
    double cost = 0.0;
};

/// Bottom-up merging of category values, analogous to merge_intervals but any
/// two groups may merge (ties: lowest index pair).
GroupSearch merge_groups(const CountTable& values);

/// 1 - cost(partition) / cost(null), clipped to [0, 1].
double compression_level(double partition_cost, double null_cost);

}  // namespace pkm::modl
