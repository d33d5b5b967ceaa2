#include "pkm/model.hpp"

#include <cctype>
#include <random>
#include <stdexcept>
#include <string>

#include "pkm/error.hpp"

namespace pkm {

std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::PkmMv: return "pkm-mv";
        case Variant::PkmSnb: return "pkm-snb";
        case Variant::KmMv: return "km-mv";
    }
    return "?";
}

Variant parse_variant(std::string_view text) {
    std::string t;
    for (char c : text) t.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "pkm-mv") return Variant::PkmMv;
    if (t == "pkm-snb") return Variant::PkmSnb;
    if (t == "km-mv") return Variant::KmMv;
    throw std::invalid_argument("unknown variant '" + std::string(text) + "' (expected pkm-mv, pkm-snb or km-mv)");
}

FitResult fit_predictive_kmeans(const Dataset& train, const FitConfig& config) {
    if (!train.has_labels() || train.size() == 0) throw DataError("training needs a non-empty labeled dataset");
    const std::size_t J = train.num_classes();
    const std::size_t K = config.k.value_or(J);
    const bool supervised = config.variant != Variant::KmMv;
    if (K == 0) throw std::invalid_argument("K must be >= 1");
    if (supervised && K < J) {
        throw std::invalid_argument("K=" + std::to_string(K) + " is below the number of classes J=" +
                                    std::to_string(J));
    }

    PkmModel model;
    model.schema = train.schema();
    model.config = config;
    model.config.k = K;

    std::mt19937_64 rng(config.seed);
    std::vector<CellRow> cells;
    ClusterModel clusters;
    if (supervised) {
        auto codebook = build_codebook(train);
        cells = cell_rows(codebook, train);
        Matrix encoded(train.size(), codebook.encoded_size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto row = codebook.encode_cells(cells[i]);
            std::copy(row.begin(), row.end(), encoded.row(i).begin());
        }
        clusters = fit_kmeans(encoded, kpp_r_init(encoded, train.labels(), J, K, rng), config.lloyd);
        model.encoder = std::move(codebook);
    } else {
        auto encoder = fit_baseline_encoder(train, config.rank_buckets, config.basic_groups);
        const Matrix encoded = encode_dataset(encoder, train);
        if (K > train.size()) throw std::invalid_argument("K exceeds the number of training instances");
        clusters = best_of_kmeans(encoded, K, config.restarts, rng, config.lloyd);
        model.encoder = std::move(encoder);
    }

    std::vector<std::vector<std::size_t>> members(K);
    for (std::size_t i = 0; i < clusters.assignment.size(); ++i) members[clusters.assignment[i]].push_back(i);

    model.predictors.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<int> labels;
        labels.reserve(members[k].size());
        for (auto i : members[k]) labels.push_back(train.label(i));

        ClusterPredictor predictor;
        predictor.class_counts.assign(J, 0);
        for (int c : labels) ++predictor.class_counts[static_cast<std::size_t>(c)];
        std::size_t present = 0;
        for (auto c : predictor.class_counts) present += c > 0 ? 1 : 0;
        predictor.pure = present == 1;
        predictor.model = make_majority_vote(predictor.class_counts);

        if (config.variant == Variant::PkmSnb && present >= 2) {
            std::vector<CellRow> local;
            local.reserve(members[k].size());
            for (auto i : members[k]) local.push_back(cells[i]);
            if (auto snb = fit_snb(local, labels, *model.codebook())) predictor.model = std::move(*snb);
        }
        model.predictors.push_back(std::move(predictor));
    }
    model.centers = std::move(clusters.centers);
    model.iterations = clusters.iterations;
    model.inertia = clusters.inertia;
    return FitResult{std::move(model), std::move(clusters.assignment)};
}

Prediction predict(const PkmModel& model, const Instance& instance) {
    if (instance.size() != model.schema.num_features()) {
        throw SchemaMismatch("instance has " + std::to_string(instance.size()) + " values, model expects " +
                             std::to_string(model.schema.num_features()));
    }
    Prediction out;
    if (const auto* codebook = model.codebook()) {
        const auto cells = codebook->cells(instance);
        const auto x = codebook->encode_cells(cells);
        out.cluster = nearest_center(model.centers.vectors, x);
        out.probabilities = model.predictors.at(out.cluster).predict_proba(cells);
    } else {
        const auto& encoder = std::get<BaselineEncoder>(model.encoder);
        const auto x = encoder.encode(instance);
        out.cluster = nearest_center(model.centers.vectors, x);
        out.probabilities = model.predictors.at(out.cluster).predict_proba({});
    }
    out.label = argmax_label(out.probabilities);
    return out;
}

std::vector<Prediction> predict(const PkmModel& model, const Dataset& data) {
    if (!model.schema.same_features(data.schema())) throw SchemaMismatch("dataset schema differs from model schema");
    std::vector<Prediction> out;
    out.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out.push_back(predict(model, data.instance(i)));
    return out;
}

}  // namespace pkm
