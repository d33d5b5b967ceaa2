#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pkm/dataset.hpp"
#include "pkm/model.hpp"

namespace pkm {

struct MetricResult {
    std::string name;
    std::vector<double> values;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation (n - 1)
};

MetricResult summarize(std::string name, std::vector<double> values);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// Mann-Whitney formulation of the ROC area; tied scores count 1/2.
/// Throws std::invalid_argument unless both classes are present.
double auc_binary(std::span<const double> scores, std::span<const bool> positive);

/// sum_i P(C_i) AUC(C_i vs rest), scoring with P(C_i | x). Priors are the class
/// frequencies of `labels`. A class absent from `labels` is skipped and the
/// remaining weights renormalized; fewer than two present classes is an error.
double auc_multiclass_weighted(std::span<const std::vector<double>> probabilities, std::span<const int> labels,
                               std::size_t num_classes);

struct ClusterStats {
    std::size_t clusters = 0;
    double pct_pure = 0.0;
    double pct_local_model = 0.0;  // non-pure with a local model
    double pct_without = 0.0;      // non-pure with majority vote
};

ClusterStats cluster_stats(std::span<const PkmModel> models);

struct RunRecord {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    double acc_train = 0.0;
    double acc_test = 0.0;
    double auc_train = 0.0;
    double auc_test = 0.0;
    double train_seconds = 0.0;
    std::size_t clusters = 0;
    std::size_t pure = 0;
    std::size_t local_models = 0;
};

struct AlgorithmReport {
    FitConfig config;
    MetricResult acc_train, acc_test, auc_train, auc_test;
    double robustness_acc = 0.0;  // mean test / mean train
    double robustness_auc = 0.0;
    ClusterStats stats;
    double mean_train_seconds = 0.0;
    std::vector<RunRecord> runs;
};

struct EvaluationReport {
    std::string dataset;
    std::size_t instances = 0;
    std::size_t repeats = 0;
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    std::vector<AlgorithmReport> algorithms;
};

struct CvOptions {
    std::size_t repeats = 10;
    std::size_t folds = 10;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

/// Seed handed to the model fitted on (repeat, fold).
std::uint64_t derive_seed(std::uint64_t base, std::size_t repeat, std::size_t fold);

/// Repeated stratified k-fold evaluation. Repeat r uses stratified_kfold with
/// seed + r, and every algorithm sees the same fold plans. Train metrics are
/// computed on the training split with the same predictor as test metrics.
EvaluationReport cross_validate(const Dataset& data, std::span<const FitConfig> algorithms,
                                const CvOptions& options, std::string dataset_name = {});

/// Aligned text tables: mean +- std of ACC and AUC (as percentages) and the
/// robustness / timing / cluster-kind columns.
std::string format_report(const EvaluationReport& report);

/// One row per (algorithm, repeat, fold).
std::string report_runs_csv(const EvaluationReport& report);

}  // namespace pkm
