#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pkm/clustering.hpp"
#include "pkm/encoding.hpp"
#include "pkm/evaluation.hpp"
#include "pkm/local_models.hpp"
#include "pkm/model.hpp"

namespace props {
namespace {

using pkm::Dataset;

void fail(Outcome& out, std::string what) {
    if (out.failures++ == 0) out.first_failure = std::move(what);
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

struct RandomTask {
    Dataset train;
    Dataset fresh;
    std::size_t J;
};

// Mixed numeric / categorical data with a random amount of class signal.
Dataset random_rows(const pkm::Schema& schema, std::size_t m, std::size_t J, double signal, std::mt19937_64& rng,
                    bool allow_unseen) {
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<pkm::Instance> rows(m);
    std::vector<int> labels(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t c = i < J ? i : uniform(rng, 0, J - 1);
        labels[i] = static_cast<int>(c);
        for (const auto& f : schema.features()) {
            if (unit(rng) < 0.08) {
                rows[i].emplace_back();
            } else if (f.kind == pkm::FeatureKind::Numeric) {
                rows[i].emplace_back(std::round((signal * static_cast<double>(c) + noise(rng)) * 4.0) / 4.0);
            } else if (allow_unseen && unit(rng) < 0.05) {
                rows[i].emplace_back(std::string("unseen"));
            } else {
                const std::size_t token = unit(rng) < signal / 3.0 ? c : uniform(rng, 0, 4);
                rows[i].emplace_back("t" + std::to_string(token));
            }
        }
    }
    return Dataset::from_rows(schema, rows, labels);
}

RandomTask random_task(std::mt19937_64& rng) {
    const std::size_t J = uniform(rng, 2, 3);
    const std::size_t numeric = uniform(rng, 1, 3);
    const std::size_t categorical = uniform(rng, 0, 2);
    std::vector<pkm::Feature> features;
    for (std::size_t n = 0; n < numeric; ++n) features.push_back({"x" + std::to_string(n), pkm::FeatureKind::Numeric});
    for (std::size_t n = 0; n < categorical; ++n) {
        features.push_back({"t" + std::to_string(n), pkm::FeatureKind::Categorical});
    }
    std::vector<std::string> classes;
    for (std::size_t j = 0; j < J; ++j) classes.push_back("c" + std::to_string(j));
    const pkm::Schema schema(features, "class", classes);
    const double signal = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    auto train = random_rows(schema, uniform(rng, 12, 60), J, signal, rng, false);
    auto fresh = random_rows(schema, 8, J, signal, rng, true);
    return {std::move(train), std::move(fresh), J};
}

pkm::FitConfig random_config(std::mt19937_64& rng, std::size_t J, std::size_t m, pkm::Variant variant) {
    pkm::FitConfig config;
    config.variant = variant;
    const std::size_t lo = variant == pkm::Variant::KmMv ? 1 : J;
    config.k = std::min(uniform(rng, lo, J + 2), m);
    config.seed = rng();
    config.restarts = 3;
    return config;
}

pkm::Variant random_variant(std::mt19937_64& rng) {
    static constexpr pkm::Variant all[] = {pkm::Variant::PkmMv, pkm::Variant::PkmSnb, pkm::Variant::KmMv};
    return all[uniform(rng, 0, 2)];
}

std::string describe(std::size_t case_index, const std::string& what) {
    return "case " + std::to_string(case_index) + ": " + what;
}

}  // namespace

Outcome posterior_distance_bound(std::size_t cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> component(-12.0, 0.0);
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    static constexpr std::size_t class_counts[] = {2, 3, 5};
    static constexpr double orders[] = {1.0, 2.0};
    Outcome out;
    for (std::size_t t = 0; t < cases; ++t) {
        const std::size_t J = class_counts[t % 3];
        const double p = orders[(t / 3) % 2];
        const std::size_t d = uniform(rng, 1, 8);
        std::vector<double> a(d * J), b(d * J), priors(J);
        for (auto& v : a) v = component(rng);
        for (auto& v : b) v = component(rng);
        double total = 0.0;
        for (auto& v : priors) total += v = weight(rng);
        for (auto& v : priors) v /= total;

        const double lhs = pkm::delta_p(a, b, priors, p);
        const double rhs = pkm::dist_B_p(a, b, J, p) +
                           static_cast<double>(J) * std::abs(pkm::log_evidence(b, priors) - pkm::log_evidence(a, priors));
        ++out.cases;
        if (!(lhs <= rhs + 1e-9 * (1.0 + std::abs(rhs)))) {
            fail(out, describe(t, "delta " + std::to_string(lhs) + " > bound " + std::to_string(rhs)));
        }
    }
    return out;
}

Outcome fold_stratification(std::size_t cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Outcome out;
    for (std::size_t t = 0; t < cases; ++t) {
        const std::size_t J = uniform(rng, 2, 5);
        const std::size_t m = uniform(rng, J, 300);
        const std::size_t k = uniform(rng, 2, std::min<std::size_t>(10, m));
        std::vector<int> labels(m);
        std::vector<double> class_total(J, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            labels[i] = static_cast<int>(i < J ? i : uniform(rng, 0, J - 1));
            class_total[static_cast<std::size_t>(labels[i])] += 1.0;
        }
        const auto plan = pkm::stratified_kfold(labels, k, rng());
        ++out.cases;

        std::vector<int> seen(m, 0);
        std::size_t smallest = m, largest = 0;
        bool ok = plan.folds.size() == k;
        for (const auto& fold : plan.folds) {
            smallest = std::min(smallest, fold.size());
            largest = std::max(largest, fold.size());
            std::vector<double> in_fold(J, 0.0);
            for (auto i : fold) {
                if (i >= m) {
                    ok = false;
                    continue;
                }
                ++seen[i];
                in_fold[static_cast<std::size_t>(labels[i])] += 1.0;
            }
            for (std::size_t c = 0; c < J; ++c) {
                const double proportional = static_cast<double>(fold.size()) * class_total[c] / static_cast<double>(m);
                if (std::abs(in_fold[c] - proportional) > 1.0 + 1e-9) ok = false;
            }
        }
        ok = ok && largest - smallest <= 1 && std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
        if (!ok) fail(out, describe(t, "m=" + std::to_string(m) + " k=" + std::to_string(k)));
    }
    return out;
}

Outcome inertia_monotonicity(std::size_t cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    Outcome out;
    for (std::size_t t = 0; t < cases; ++t) {
        const std::size_t m = uniform(rng, 2, 80);
        const std::size_t dim = uniform(rng, 1, 4);
        const std::size_t k = uniform(rng, 1, std::min<std::size_t>(6, m));
        const bool coarse = t % 4 == 0;  // duplicated points exercise ties and empty clusters
        pkm::Matrix data(m, dim);
        std::vector<std::vector<double>> points(m, std::vector<double>(dim));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                double v = noise(rng) + static_cast<double>(i % 3) * 2.0;
                if (coarse) v = std::round(v);
                data(i, j) = points[i][j] = v;
            }
        }
        auto init = t % 2 == 0 ? pkm::kmeans_pp_init(data, k, rng) : [&] {
            pkm::Centers c;
            c.vectors = pkm::Matrix(k, dim);
            for (std::size_t r = 0; r < k; ++r) {
                for (std::size_t j = 0; j < dim; ++j) c.vectors(r, j) = 4.0 * noise(rng);
            }
            return c;
        }();
        const auto model = pkm::fit_kmeans(data, std::move(init), {.max_iter = 50, .tol = 0.0});
        ++out.cases;

        bool ok = !model.inertia_history.empty();
        for (std::size_t s = 1; s < model.inertia_history.size(); ++s) {
            const double prev = model.inertia_history[s - 1];
            if (model.inertia_history[s] > prev + 1e-9 * (1.0 + prev)) ok = false;
        }
        std::vector<std::vector<double>> centers(k, std::vector<double>(dim));
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t j = 0; j < dim; ++j) centers[r][j] = model.centers.vectors(r, j);
        }
        const double direct = oracle::inertia(points, model.assignment, centers);
        if (std::abs(direct - model.inertia) > 1e-9 * (1.0 + direct)) ok = false;
        if (!ok) fail(out, describe(t, "m=" + std::to_string(m) + " k=" + std::to_string(k)));
    }
    return out;
}

Outcome probability_normalization(std::size_t cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Outcome out;
    for (std::size_t t = 0; t < cases; ++t) {
        const auto task = random_task(rng);
        const auto config = random_config(rng, task.J, task.train.size(), random_variant(rng));
        const auto model = pkm::fit_predictive_kmeans(task.train, config).model;
        ++out.cases;
        bool ok = true;
        for (const auto* data : {&task.train, &task.fresh}) {
            for (const auto& p : pkm::predict(model, *data)) {
                double sum = 0.0;
                for (double v : p.probabilities) {
                    if (!(v >= 0.0) || !std::isfinite(v)) ok = false;
                    sum += v;
                }
                if (p.probabilities.size() != task.J || std::abs(sum - 1.0) > 1e-12) ok = false;
            }
        }
        if (!ok) fail(out, describe(t, std::string(pkm::to_string(config.variant))));
    }
    return out;
}

Outcome pure_cluster_majority_vote(std::size_t cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Outcome out;
    std::size_t pure_seen = 0;
    for (std::size_t t = 0; t < cases; ++t) {
        const auto task = random_task(rng);
        const auto config = random_config(rng, task.J, task.train.size(), random_variant(rng));
        const auto fit = pkm::fit_predictive_kmeans(task.train, config);
        ++out.cases;
        std::vector<std::map<int, std::size_t>> members(fit.model.num_clusters());
        for (std::size_t i = 0; i < fit.assignment.size(); ++i) ++members[fit.assignment[i]][task.train.label(i)];
        bool ok = true;
        for (std::size_t k = 0; k < members.size(); ++k) {
            const bool pure = members[k].size() == 1;
            const auto& predictor = fit.model.predictors[k];
            if (pure != predictor.pure) ok = false;
            if (pure) {
                ++pure_seen;
                if (predictor.has_local_model()) ok = false;
            }
        }
        if (!ok) fail(out, describe(t, std::string(pkm::to_string(config.variant))));
    }
    if (pure_seen == 0) fail(out, "no pure cluster was generated");
    return out;
}

Outcome local_model_beats_null(std::size_t cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Outcome out;
    std::size_t local_seen = 0;
    for (std::size_t t = 0; t < cases; ++t) {
        const auto task = random_task(rng);
        const auto config = random_config(rng, task.J, task.train.size(), pkm::Variant::PkmSnb);
        const auto fit = pkm::fit_predictive_kmeans(task.train, config);
        const auto& codebook = *fit.model.codebook();
        const auto cells = pkm::cell_rows(codebook, task.train);
        ++out.cases;
        bool ok = true;
        for (std::size_t k = 0; k < fit.model.num_clusters(); ++k) {
            const auto* snb = std::get_if<pkm::SnbModel>(&fit.model.predictors[k].model);
            if (snb == nullptr) continue;
            ++local_seen;
            std::vector<pkm::CellRow> local;
            std::vector<int> labels;
            for (std::size_t i = 0; i < fit.assignment.size(); ++i) {
                if (fit.assignment[i] != k) continue;
                local.push_back(cells[i]);
                labels.push_back(task.train.label(i));
            }
            const std::vector<double> none(snb->weights.size(), 0.0);
            const double selected = pkm::snb_selection_cost(local, labels, codebook, snb->weights);
            const double empty = pkm::snb_selection_cost(local, labels, codebook, none);
            if (snb->selected_features().empty() || !(selected < empty)) ok = false;
            if (std::abs(selected - snb->selection_cost) > 1e-9 || std::abs(empty - snb->null_cost) > 1e-9) ok = false;
        }
        if (!ok) fail(out, describe(t, "local model does not beat the empty selection"));
    }
    if (local_seen == 0) fail(out, "no local model was generated");
    return out;
}

SearchComparison discretization_vs_exhaustive(std::size_t cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SearchComparison out;
    for (std::size_t t = 0; t < cases; ++t) {
        const std::size_t J = uniform(rng, 2, 3);
        const std::size_t m = uniform(rng, 2, 30);
        const std::size_t distinct = uniform(rng, 1, 12);
        const double skew = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        std::vector<std::optional<double>> values(m);
        std::vector<double> plain(m);
        std::vector<int> labels(m);
        for (std::size_t i = 0; i < m; ++i) {
            const auto v = uniform(rng, 0, distinct - 1);
            plain[i] = static_cast<double>(v) * 0.5;
            values[i] = plain[i];
            // labels follow the value with probability `skew`
            labels[i] = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < skew
                            ? static_cast<int>(v * J / distinct)
                            : static_cast<int>(uniform(rng, 0, J - 1));
        }
        const double greedy = pkm::partition_cost(pkm::discretize_numeric(values, labels, J));
        const double best = oracle::best_interval_cost(oracle::elementary_table(plain, labels, J));
        ++out.cases;
        if (std::abs(greedy - best) <= 1e-9) ++out.optimal;
        if (greedy < best - 1e-9) ++out.below_optimum;
        out.worst_gap = std::max(out.worst_gap, greedy - best);
    }
    return out;
}

SearchComparison grouping_vs_exhaustive(std::size_t cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SearchComparison out;
    for (std::size_t t = 0; t < cases; ++t) {
        const std::size_t J = uniform(rng, 2, 3);
        const std::size_t m = uniform(rng, 2, 30);
        const std::size_t categories = uniform(rng, 1, 6);
        const double skew = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        std::vector<std::optional<std::string>> values(m);
        std::vector<int> labels(m);
        std::map<std::string, std::vector<std::size_t>> table;
        for (std::size_t i = 0; i < m; ++i) {
            const auto v = uniform(rng, 0, categories - 1);
            values[i] = "v" + std::to_string(v);
            labels[i] = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < skew
                            ? static_cast<int>(v % J)
                            : static_cast<int>(uniform(rng, 0, J - 1));
            auto& row = table[*values[i]];
            row.resize(J, 0);
            ++row[static_cast<std::size_t>(labels[i])];
        }
        oracle::Table rows;
        for (auto& [token, counts] : table) rows.push_back(counts);
        const double greedy = pkm::partition_cost(pkm::group_categorical(values, labels, J));
        const double best = oracle::best_grouping_cost(rows);
        ++out.cases;
        if (std::abs(greedy - best) <= 1e-9) ++out.optimal;
        if (greedy < best - 1e-9) ++out.below_optimum;
        out.worst_gap = std::max(out.worst_gap, greedy - best);
    }
    return out;
}

double auc_max_deviation(std::size_t cases, std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (std::size_t t = 0; t < cases; ++t) {
        std::vector<double> scores(m);
        std::unique_ptr<bool[]> positive(new bool[m]);
        const std::size_t levels = uniform(rng, 2, 20);  // few levels -> many ties
        for (std::size_t i = 0; i < m; ++i) {
            scores[i] = static_cast<double>(uniform(rng, 0, levels - 1)) / static_cast<double>(levels);
            positive[i] = i < 2 ? i == 0 : uniform(rng, 0, 2) == 0;
        }
        const std::span<const bool> flags(positive.get(), m);
        worst = std::max(worst, std::abs(pkm::auc_binary(scores, flags) - oracle::auc_all_pairs(scores, flags)));
    }
    return worst;
}

}  // namespace props
