#include "pkm/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iterator>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace pkm {

MetricResult summarize(std::string name, std::vector<double> values) {
    MetricResult r{std::move(name), std::move(values), 0.0, 0.0};
    const auto n = r.values.size();
    if (n == 0) return r;
    r.mean = std::accumulate(r.values.begin(), r.values.end(), 0.0) / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double v : r.values) ss += (v - r.mean) * (v - r.mean);
        r.stddev = std::sqrt(ss / static_cast<double>(n - 1));
    }
    return r;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) throw std::invalid_argument("accuracy: length mismatch");
    if (truth.empty()) throw std::invalid_argument("accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double auc_binary(std::span<const double> scores, std::span<const bool> positive) {
    if (scores.size() != positive.size()) throw std::invalid_argument("auc_binary: length mismatch");
    const std::size_t n = scores.size();
    const auto n_pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc_binary: both classes must be present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of (1-based, tie-averaged) ranks of the positives.
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) {
            if (positive[order[t]]) rank_sum += avg_rank;
        }
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    const double u = rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

double auc_multiclass_weighted(std::span<const std::vector<double>> probabilities, std::span<const int> labels,
                               std::size_t num_classes) {
    if (probabilities.size() != labels.size()) throw std::invalid_argument("auc_multiclass: length mismatch");
    if (labels.empty()) throw std::invalid_argument("auc_multiclass: empty input");
    std::vector<std::size_t> counts(num_classes, 0);
    for (int c : labels) {
        if (c < 0 || static_cast<std::size_t>(c) >= num_classes) throw std::invalid_argument("auc_multiclass: bad label");
        ++counts[static_cast<std::size_t>(c)];
    }
    for (const auto& p : probabilities) {
        if (p.size() != num_classes) throw std::invalid_argument("auc_multiclass: probability vector of wrong length");
    }
    if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) < 2) {
        throw std::invalid_argument("auc_multiclass: fewer than two classes present");
    }

    double weighted = 0.0;
    double weight_sum = 0.0;
    std::vector<double> scores(labels.size());
    auto positive = std::make_unique<bool[]>(labels.size());
    for (std::size_t j = 0; j < num_classes; ++j) {
        if (counts[j] == 0) continue;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            scores[i] = probabilities[i][j];
            positive[i] = labels[i] == static_cast<int>(j);
        }
        const double prior = static_cast<double>(counts[j]);
        weighted += prior * auc_binary(scores, std::span<const bool>(positive.get(), labels.size()));
        weight_sum += prior;
    }
    return weighted / weight_sum;
}

ClusterStats cluster_stats(std::span<const PkmModel> models) {
    ClusterStats s;
    std::size_t pure = 0, local = 0, without = 0;
    for (const auto& m : models) {
        for (const auto& p : m.predictors) {
            if (p.pure) {
                ++pure;
            } else if (p.has_local_model()) {
                ++local;
            } else {
                ++without;
            }
        }
    }
    s.clusters = pure + local + without;
    if (s.clusters == 0) return s;
    const double total = static_cast<double>(s.clusters);
    s.pct_pure = 100.0 * static_cast<double>(pure) / total;
    s.pct_local_model = 100.0 * static_cast<double>(local) / total;
    s.pct_without = 100.0 * static_cast<double>(without) / total;
    return s;
}

std::uint64_t derive_seed(std::uint64_t base, std::size_t repeat, std::size_t fold) {
    // splitmix64 finalizer over (base, repeat, fold)
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(repeat) * 1000003ULL + fold + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

struct Job {
    std::size_t algorithm;
    std::size_t repeat;
    std::size_t fold;
};

struct JobResult {
    RunRecord record;
    PkmModel model;
};

std::pair<double, double> score_split(const PkmModel& model, const Dataset& split) {
    const auto predictions = predict(model, split);
    std::vector<int> labels;
    std::vector<std::vector<double>> probs;
    labels.reserve(predictions.size());
    probs.reserve(predictions.size());
    for (const auto& p : predictions) {
        labels.push_back(p.label);
        probs.push_back(p.probabilities);
    }
    const double acc = accuracy(labels, split.labels());
    const double auc = auc_multiclass_weighted(probs, split.labels(), split.num_classes());
    return {acc, auc};
}

}  // namespace

EvaluationReport cross_validate(const Dataset& data, std::span<const FitConfig> algorithms, const CvOptions& options,
                                std::string dataset_name) {
    if (options.folds < 2) throw std::invalid_argument("cross_validate: folds must be >= 2");
    if (options.repeats < 1) throw std::invalid_argument("cross_validate: repeats must be >= 1");
    if (algorithms.empty()) throw std::invalid_argument("cross_validate: no algorithm to evaluate");
    if (!data.has_labels()) throw std::invalid_argument("cross_validate: dataset has no labels");

    std::vector<FoldPlan> plans;
    plans.reserve(options.repeats);
    for (std::size_t r = 0; r < options.repeats; ++r) {
        plans.push_back(stratified_kfold(data.labels(), options.folds, options.seed + r));
    }

    // Split once per (repeat, fold); all algorithms reuse the same rows.
    std::vector<std::pair<Dataset, Dataset>> splits;
    splits.reserve(options.repeats * options.folds);
    for (std::size_t r = 0; r < options.repeats; ++r) {
        for (std::size_t f = 0; f < options.folds; ++f) {
            const auto train_rows = plans[r].train_indices(f);
            const auto test_rows = plans[r].test_indices(f);
            auto a = train_rows, b = test_rows;
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            std::vector<std::size_t> both;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
            if (!both.empty()) throw std::logic_error("cross_validate: test rows leaked into training");
            splits.emplace_back(data.subset(train_rows), data.subset(test_rows));
        }
    }

    std::vector<Job> jobs;
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
        for (std::size_t r = 0; r < options.repeats; ++r) {
            for (std::size_t f = 0; f < options.folds; ++f) jobs.push_back({a, r, f});
        }
    }
    std::vector<std::optional<JobResult>> results(jobs.size());

    auto run = [&](std::size_t index) {
        const auto& job = jobs[index];
        const auto& [train, test] = splits[job.repeat * options.folds + job.fold];
        FitConfig config = algorithms[job.algorithm];
        config.seed = derive_seed(config.seed, job.repeat, job.fold);

        const auto start = std::chrono::steady_clock::now();
        auto fitted = fit_predictive_kmeans(train, config);
        const auto stop = std::chrono::steady_clock::now();

        RunRecord rec;
        rec.repeat = job.repeat;
        rec.fold = job.fold;
        rec.train_seconds = std::chrono::duration<double>(stop - start).count();
        std::tie(rec.acc_train, rec.auc_train) = score_split(fitted.model, train);
        std::tie(rec.acc_test, rec.auc_test) = score_split(fitted.model, test);
        rec.clusters = fitted.model.num_clusters();
        for (const auto& p : fitted.model.predictors) {
            rec.pure += p.pure ? 1 : 0;
            rec.local_models += p.has_local_model() ? 1 : 0;
        }
        results[index] = JobResult{rec, std::move(fitted.model)};
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, jobs.size()));
    if (threads == 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) run(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> workers;
        for (std::size_t t = 0; t < threads; ++t) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < jobs.size(); i = next++) {
                    try {
                        run(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& w : workers) w.join();
        if (failure) std::rethrow_exception(failure);
    }

    EvaluationReport report;
    report.dataset = std::move(dataset_name);
    report.instances = data.size();
    report.repeats = options.repeats;
    report.folds = options.folds;
    report.seed = options.seed;
    const std::size_t per_algorithm = options.repeats * options.folds;
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
        AlgorithmReport ar;
        ar.config = algorithms[a];
        std::vector<double> acc_train, acc_test, auc_train, auc_test, seconds;
        std::vector<PkmModel> models;
        for (std::size_t i = a * per_algorithm; i < (a + 1) * per_algorithm; ++i) {
            auto& res = *results[i];
            ar.runs.push_back(res.record);
            acc_train.push_back(res.record.acc_train);
            acc_test.push_back(res.record.acc_test);
            auc_train.push_back(res.record.auc_train);
            auc_test.push_back(res.record.auc_test);
            seconds.push_back(res.record.train_seconds);
            models.push_back(std::move(res.model));
        }
        ar.acc_train = summarize("acc_train", std::move(acc_train));
        ar.acc_test = summarize("acc_test", std::move(acc_test));
        ar.auc_train = summarize("auc_train", std::move(auc_train));
        ar.auc_test = summarize("auc_test", std::move(auc_test));
        ar.robustness_acc = ar.acc_test.mean / ar.acc_train.mean;
        ar.robustness_auc = ar.auc_test.mean / ar.auc_train.mean;
        ar.stats = cluster_stats(models);
        ar.mean_train_seconds = summarize("train_seconds", std::move(seconds)).mean;
        report.algorithms.push_back(std::move(ar));
    }
    return report;
}

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pm(const MetricResult& m) { return fixed(100.0 * m.mean, 2) + " +- " + fixed(100.0 * m.stddev, 2); }

}  // namespace

std::string format_report(const EvaluationReport& report) {
    std::ostringstream out;
    const std::string title = report.dataset.empty() ? std::string("dataset") : report.dataset;
    out << title << " (" << report.instances << " instances), " << report.repeats << "x" << report.folds
        << " stratified cross-validation, seed " << report.seed << "\n\n";

    const std::size_t w0 = 10, w = 18;
    out << pad("variant", w0) << pad("test ACC", w) << pad("test AUC", w) << pad("train ACC", w)
        << pad("train AUC", w) << "\n";
    for (const auto& a : report.algorithms) {
        out << pad(std::string(to_string(a.config.variant)), w0) << pad(pm(a.acc_test), w) << pad(pm(a.auc_test), w)
            << pad(pm(a.acc_train), w) << pad(pm(a.auc_train), w) << "\n";
    }
    out << "\n";
    out << pad("variant", w0) << pad("robust ACC", 12) << pad("robust AUC", 12) << pad("time (s)", 12)
        << pad("% pure", 10) << pad("% local", 10) << pad("% without", 11) << "\n";
    for (const auto& a : report.algorithms) {
        out << pad(std::string(to_string(a.config.variant)), w0) << pad(fixed(a.robustness_acc, 2), 12)
            << pad(fixed(a.robustness_auc, 2), 12) << pad(fixed(a.mean_train_seconds, 4), 12)
            << pad(fixed(a.stats.pct_pure, 2), 10) << pad(fixed(a.stats.pct_local_model, 2), 10)
            << pad(fixed(a.stats.pct_without, 2), 11) << "\n";
    }
    return out.str();
}

std::string report_runs_csv(const EvaluationReport& report) {
    std::ostringstream out;
    out << "variant,repeat,fold,acc_train,acc_test,auc_train,auc_test,train_seconds,clusters,pure,local_models\n";
    for (const auto& a : report.algorithms) {
        for (const auto& r : a.runs) {
            out << to_string(a.config.variant) << ',' << r.repeat << ',' << r.fold << ','
                << format_number(r.acc_train) << ',' << format_number(r.acc_test) << ','
                << format_number(r.auc_train) << ',' << format_number(r.auc_test) << ','
                << format_number(r.train_seconds) << ',' << r.clusters << ',' << r.pure << ',' << r.local_models
                << '\n';
        }
    }
    return out.str();
}

}  // namespace pkm
