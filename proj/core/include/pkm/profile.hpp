#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pkm/dataset.hpp"
#include "pkm/encoding.hpp"
#include "pkm/model.hpp"

namespace pkm {

/// Cell-frequency histograms of one feature: over the whole training set and
/// over the members of one cluster. Both sum to 1 (the cluster one is all
/// zeros for an empty cluster).
struct FeatureProfile {
    std::string feature;
    std::vector<std::string> cells;
    std::vector<double> population;
    std::vector<double> cluster;
    double weight = 0.0;  // local SNB weight W_f, 0 under majority vote
};

struct ClusterProfile {
    std::size_t cluster = 0;
    std::size_t size = 0;
    std::vector<std::size_t> class_counts;
    bool pure = false;
    std::string predictor;  // "mv" or "snb"
    std::vector<FeatureProfile> features;
    std::vector<std::pair<std::string, double>> local_weights;  // nonzero W_f only
};

struct ProfileReport {
    std::vector<std::string> class_labels;
    std::size_t instances = 0;
    std::vector<ClusterProfile> clusters;
};

/// Human-readable names of the cells of a feature partition, e.g. "]-inf;2.5]",
/// "]2.5;+inf[", "Missing", "{a,b}".
std::vector<std::string> cell_labels(const FeatureCoding& coding);

/// Profiles of every cluster, routing the rows of `train` through the model.
/// Histograms are taken over the cells of `codebook`; values with no fitted
/// cell fall into an extra "(unseen)" cell when any occur.
ProfileReport cluster_profiles(const PkmModel& model, const Codebook& codebook, const Dataset& train);

/// Uses the model's own codebook, or fits one on `train` for a baseline model.
ProfileReport cluster_profiles(const PkmModel& model, const Dataset& train);

std::string format_profiles(const ProfileReport& report);

}  // namespace pkm
