#include "pkm/modl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

namespace pkm::modl {

double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double log_binomial(std::size_t n, std::size_t k) {
    if (k > n) return -std::numeric_limits<double>::infinity();
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double cell_cost(std::span<const std::size_t> class_counts) {
    const std::size_t J = class_counts.size();
    const std::size_t n = std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
    double cost = log_binomial(n + J - 1, J - 1) + log_factorial(n);
    for (auto c : class_counts) cost -= log_factorial(c);
    return cost;
}

namespace {

std::size_t table_total(const CountTable& table) {
    std::size_t m = 0;
    for (const auto& row : table) m = std::accumulate(row.begin(), row.end(), m);
    return m;
}

double interval_prior(std::size_t m, std::size_t intervals) {
    return std::log(static_cast<double>(m)) + log_binomial(m + intervals - 1, intervals - 1);
}

double grouping_prior(std::size_t values, std::size_t groups) {
    return std::log(static_cast<double>(values)) + log_binomial(values + groups - 1, groups - 1) +
           log_factorial(groups);
}

std::vector<std::size_t> add(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::vector<std::size_t> out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + b[j];
    return out;
}

void check_table(const CountTable& table) {
    if (table.empty()) throw std::invalid_argument("modl: empty count table");
    const std::size_t J = table.front().size();
    if (J == 0) throw std::invalid_argument("modl: count table has no classes");
    for (const auto& row : table) {
        if (row.size() != J) throw std::invalid_argument("modl: ragged count table");
    }
    if (table_total(table) == 0) throw std::invalid_argument("modl: count table is all zeros");
}

}  // namespace

double interval_cost(const CountTable& intervals) {
    check_table(intervals);
    double cost = interval_prior(table_total(intervals), intervals.size());
    for (const auto& row : intervals) cost += cell_cost(row);
    return cost;
}

double grouping_cost(const CountTable& groups, std::size_t num_values) {
    check_table(groups);
    if (num_values < groups.size()) throw std::invalid_argument("modl: more groups than values");
    double cost = grouping_prior(num_values, groups.size());
    for (const auto& row : groups) cost += cell_cost(row);
    return cost;
}

double null_interval_cost(std::span<const std::size_t> class_counts) {
    const std::size_t m = std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
    return interval_prior(m, 1) + cell_cost(class_counts);
}

double null_grouping_cost(std::span<const std::size_t> class_counts, std::size_t num_values) {
    return grouping_prior(num_values, 1) + cell_cost(class_counts);
}

IntervalSearch merge_intervals(const CountTable& elementary) {
    check_table(elementary);
    const std::size_t n = elementary.size();
    const std::size_t m = table_total(elementary);
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

    std::vector<std::vector<std::size_t>> counts = elementary;
    std::vector<double> cost(n);
    std::vector<std::size_t> next(n), prev(n);
    for (std::size_t i = 0; i < n; ++i) {
        cost[i] = cell_cost(counts[i]);
        next[i] = i + 1 < n ? i + 1 : none;
        prev[i] = i > 0 ? i - 1 : none;
    }
    double cell_sum = std::accumulate(cost.begin(), cost.end(), 0.0);

    // Candidate merges keyed by (delta, left index); the left index identifies
    // the pair (left, next[left]) because intervals are merged into the left one.
    std::vector<double> delta(n, 0.0);
    std::set<std::pair<double, std::size_t>> queue;
    auto push = [&](std::size_t left) {
        const std::size_t right = next[left];
        if (right == none) return;
        delta[left] = cell_cost(add(counts[left], counts[right])) - cost[left] - cost[right];
        queue.emplace(delta[left], left);
    };
    auto drop = [&](std::size_t left) {
        if (left != none && next[left] != none) queue.erase({delta[left], left});
    };
    for (std::size_t i = 0; i + 1 < n; ++i) push(i);

    double best_cost = interval_prior(m, n) + cell_sum;
    std::size_t best_step = 0;
    std::vector<std::size_t> merges;  // left index of each applied merge
    merges.reserve(n);

    for (std::size_t live = n; live > 1; --live) {
        const auto [d, left] = *queue.begin();
        const std::size_t right = next[left];
        drop(prev[left]);
        drop(left);
        drop(right);

        counts[left] = add(counts[left], counts[right]);
        cell_sum += d;
        cost[left] = cost[left] + cost[right] + d;
        next[left] = next[right];
        if (next[right] != none) prev[next[right]] = left;
        merges.push_back(left);

        if (prev[left] != none) push(prev[left]);
        push(left);

        const double total = interval_prior(m, live - 1) + cell_sum;
        if (total < best_cost) {
            best_cost = total;
            best_step = merges.size();
        }
    }

    // Replay the best prefix of the merge sequence.
    std::vector<std::size_t> end(n);
    std::vector<std::size_t> nxt(n);
    for (std::size_t i = 0; i < n; ++i) {
        end[i] = i + 1;
        nxt[i] = i + 1 < n ? i + 1 : none;
    }
    for (std::size_t s = 0; s < best_step; ++s) {
        const std::size_t left = merges[s];
        const std::size_t right = nxt[left];
        end[left] = end[right];
        nxt[left] = nxt[right];
    }
    IntervalSearch result;
    for (std::size_t i = 0; i != none; i = nxt[i]) result.ends.push_back(end[i]);

    CountTable merged;
    std::size_t begin = 0;
    for (auto e : result.ends) {
        std::vector<std::size_t> row(elementary.front().size(), 0);
        for (std::size_t i = begin; i < e; ++i) row = add(row, elementary[i]);
        merged.push_back(std::move(row));
        begin = e;
    }
    result.cost = interval_cost(merged);
    return result;
}

GroupSearch merge_groups(const CountTable& values) {
    check_table(values);
    const std::size_t V = values.size();

    std::vector<std::vector<std::size_t>> counts = values;
    std::vector<double> cost(V);
    std::vector<bool> live(V, true);
    for (std::size_t i = 0; i < V; ++i) cost[i] = cell_cost(counts[i]);
    double cell_sum = std::accumulate(cost.begin(), cost.end(), 0.0);

    // delta[a][b] for a < b.
    std::vector<std::vector<double>> delta(V, std::vector<double>(V, 0.0));
    auto refresh = [&](std::size_t a, std::size_t b) {
        if (a > b) std::swap(a, b);
        delta[a][b] = cell_cost(add(counts[a], counts[b])) - cost[a] - cost[b];
    };
    for (std::size_t a = 0; a < V; ++a) {
        for (std::size_t b = a + 1; b < V; ++b) refresh(a, b);
    }

    double best_cost = grouping_prior(V, V) + cell_sum;
    std::size_t best_step = 0;
    std::vector<std::pair<std::size_t, std::size_t>> merges;

    for (std::size_t groups = V; groups > 1; --groups) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t ba = 0, bb = 0;
        for (std::size_t a = 0; a < V; ++a) {
            if (!live[a]) continue;
            for (std::size_t b = a + 1; b < V; ++b) {
                if (live[b] && delta[a][b] < best) {
                    best = delta[a][b];
                    ba = a;
                    bb = b;
                }
            }
        }
        counts[ba] = add(counts[ba], counts[bb]);
        cost[ba] = cost[ba] + cost[bb] + best;
        cell_sum += best;
        live[bb] = false;
        merges.emplace_back(ba, bb);
        for (std::size_t c = 0; c < V; ++c) {
            if (live[c] && c != ba) refresh(ba, c);
        }
        const double total = grouping_prior(V, groups - 1) + cell_sum;
        if (total < best_cost) {
            best_cost = total;
            best_step = merges.size();
        }
    }

    std::vector<std::size_t> root(V);
    std::iota(root.begin(), root.end(), 0);
    for (std::size_t s = 0; s < best_step; ++s) {
        const auto [a, b] = merges[s];
        for (auto& r : root) {
            if (r == b) r = a;
        }
    }
    GroupSearch result;
    result.group_of.assign(V, 0);
    std::vector<std::size_t> id_of_root(V, std::numeric_limits<std::size_t>::max());
    for (std::size_t v = 0; v < V; ++v) {
        auto& id = id_of_root[root[v]];
        if (id == std::numeric_limits<std::size_t>::max()) id = result.num_groups++;
        result.group_of[v] = id;
    }
    CountTable merged(result.num_groups, std::vector<std::size_t>(values.front().size(), 0));
    for (std::size_t v = 0; v < V; ++v) merged[result.group_of[v]] = add(merged[result.group_of[v]], values[v]);
    result.cost = grouping_cost(merged, V);
    return result;
}

double compression_level(double partition_cost, double null_cost) {
    if (!(null_cost > 0.0)) return 0.0;
    return std::clamp(1.0 - partition_cost / null_cost, 0.0, 1.0);
}

}  // namespace pkm::modl
