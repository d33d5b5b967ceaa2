#include "pkm/profile.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "pkm/error.hpp"

namespace pkm {

namespace {

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%6.2f%%", 100.0 * v);
    return buf;
}

std::string bar(double fraction, std::size_t width) {
    const auto n = static_cast<std::size_t>(fraction * static_cast<double>(width) + 0.5);
    return std::string(std::min(n, width), '#') + std::string(width - std::min(n, width), ' ');
}

void normalize(std::vector<double>& h) {
    double total = 0.0;
    for (double v : h) total += v;
    if (total > 0.0) {
        for (double& v : h) v /= total;
    }
}

}  // namespace

std::vector<std::string> cell_labels(const FeatureCoding& coding) {
    std::vector<std::string> out;
    if (const auto* p = std::get_if<IntervalPartition>(&coding.partition)) {
        std::string lo = "-inf";
        for (double c : p->cuts) {
            out.push_back("]" + lo + ";" + short_number(c) + "]");
            lo = short_number(c);
        }
        out.push_back("]" + lo + ";+inf[");
        if (p->has_missing_cell) out.emplace_back("Missing");
        return out;
    }
    const auto& g = std::get<ValueGrouping>(coding.partition);
    std::vector<std::vector<std::string>> members(g.num_groups());
    if (g.missing_group) members[*g.missing_group].emplace_back("Missing");
    for (const auto& [token, group] : g.group_of) members[group].push_back(token);
    for (const auto& m : members) {
        std::string s = "{";
        for (std::size_t i = 0; i < m.size(); ++i) s += (i ? "," : "") + m[i];
        out.push_back(s + "}");
    }
    return out;
}

ProfileReport cluster_profiles(const PkmModel& model, const Codebook& codebook, const Dataset& train) {
    if (!model.schema.same_features(train.schema()) || !codebook.schema().same_features(train.schema())) {
        throw SchemaMismatch("training data does not match the model schema");
    }
    const std::size_t d = codebook.num_features();
    const std::size_t K = model.num_clusters();
    const auto predictions = predict(model, train);
    const auto cells = cell_rows(codebook, train);

    // Extra trailing bucket per feature for values without a fitted cell.
    std::vector<std::size_t> width(d);
    std::vector<bool> has_unseen(d, false);
    for (std::size_t n = 0; n < d; ++n) width[n] = codebook.feature(n).num_cells();
    for (const auto& row : cells) {
        for (std::size_t n = 0; n < d; ++n) has_unseen[n] = has_unseen[n] || !row[n];
    }

    std::vector<std::vector<double>> population(d);
    std::vector<std::vector<std::vector<double>>> per_cluster(K, std::vector<std::vector<double>>(d));
    for (std::size_t n = 0; n < d; ++n) {
        population[n].assign(width[n] + (has_unseen[n] ? 1 : 0), 0.0);
        for (auto& c : per_cluster) c[n].assign(population[n].size(), 0.0);
    }
    std::vector<std::size_t> sizes(K, 0);
    std::vector<std::vector<std::size_t>> class_counts(K, std::vector<std::size_t>(model.num_classes(), 0));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto k = predictions[i].cluster;
        ++sizes[k];
        if (train.has_labels()) ++class_counts[k].at(static_cast<std::size_t>(train.label(i)));
        for (std::size_t n = 0; n < d; ++n) {
            const std::size_t b = cells[i][n] ? *cells[i][n] : width[n];
            population[n][b] += 1.0;
            per_cluster[k][n][b] += 1.0;
        }
    }
    for (auto& h : population) normalize(h);
    for (auto& c : per_cluster) {
        for (auto& h : c) normalize(h);
    }

    ProfileReport report;
    report.class_labels = model.schema.class_labels();
    report.instances = train.size();
    for (std::size_t k = 0; k < K; ++k) {
        const auto& predictor = model.predictors[k];
        ClusterProfile cp;
        cp.cluster = k;
        cp.size = sizes[k];
        cp.class_counts = train.has_labels() ? class_counts[k] : predictor.class_counts;
        cp.pure = predictor.pure;
        const auto* snb = std::get_if<SnbModel>(&predictor.model);
        cp.predictor = snb ? "snb" : "mv";
        for (std::size_t n = 0; n < d; ++n) {
            FeatureProfile fp;
            fp.feature = codebook.feature(n).feature.name;
            fp.cells = cell_labels(codebook.feature(n));
            if (has_unseen[n]) fp.cells.emplace_back("(unseen)");
            fp.population = population[n];
            fp.cluster = per_cluster[k][n];
            fp.weight = snb ? snb->weights.at(n) : 0.0;
            if (fp.weight != 0.0) cp.local_weights.emplace_back(fp.feature, fp.weight);
            cp.features.push_back(std::move(fp));
        }
        report.clusters.push_back(std::move(cp));
    }
    return report;
}

ProfileReport cluster_profiles(const PkmModel& model, const Dataset& train) {
    if (const auto* codebook = model.codebook()) return cluster_profiles(model, *codebook, train);
    if (!train.has_labels()) throw DataError("profiling a baseline model needs labeled training data");
    return cluster_profiles(model, build_codebook(train), train);
}

std::string format_profiles(const ProfileReport& report) {
    constexpr std::size_t bar_width = 20;
    std::ostringstream out;
    out << report.clusters.size() << " clusters over " << report.instances << " instances\n";
    for (const auto& c : report.clusters) {
        out << "\n== cluster " << c.cluster << ": " << c.size << " instances, "
            << (c.pure ? "pure, " : "") << (c.predictor == "snb" ? "local SNB" : "majority vote") << "\n";
        out << "   labels:";
        for (std::size_t j = 0; j < c.class_counts.size(); ++j) {
            out << ' ' << (j < report.class_labels.size() ? report.class_labels[j] : std::to_string(j)) << '='
                << c.class_counts[j];
        }
        out << "\n";
        if (!c.local_weights.empty()) {
            out << "   local weights:";
            for (const auto& [name, w] : c.local_weights) out << ' ' << name << '=' << short_number(w);
            out << "\n";
        }
        for (const auto& f : c.features) {
            out << "   " << f.feature;
            if (f.weight != 0.0) out << "  (W=" << short_number(f.weight) << ")";
            out << "\n";
            std::size_t label_width = 4;
            for (const auto& l : f.cells) label_width = std::max(label_width, l.size());
            for (std::size_t b = 0; b < f.cells.size(); ++b) {
                out << "     " << f.cells[b] << std::string(label_width - f.cells[b].size(), ' ') << "  pop |"
                    << bar(f.population[b], bar_width) << "| " << percent(f.population[b]) << "   cluster |"
                    << bar(f.cluster[b], bar_width) << "| " << percent(f.cluster[b]) << "\n";
            }
        }
    }
    return out.str();
}

}  // namespace pkm
