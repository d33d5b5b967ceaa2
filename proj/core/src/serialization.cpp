#include "pkm/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pkm/error.hpp"

namespace pkm {

using nlohmann::json;

namespace {

// nlohmann prints the shortest round-trip form; numbers here are always
// printed with %.17g instead.
void dump(const json& j, std::string& out, int indent, int depth) {
    const auto newline = [&](int level) {
        if (indent < 0) return;
        out.push_back('\n');
        out.append(static_cast<std::size_t>(indent * level), ' ');
    };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out.push_back('{');
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out.push_back(',');
                first = false;
                newline(depth + 1);
                out += json(it.key()).dump();
                out += indent < 0 ? ":" : ": ";
                dump(it.value(), out, indent, depth + 1);
            }
            newline(depth);
            out.push_back('}');
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
            out.push_back('[');
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += flat && indent >= 0 ? ", " : ",";
                if (!flat) newline(depth + 1);
                dump(j[i], out, indent, depth + 1);
            }
            if (!flat) newline(depth);
            out.push_back(']');
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) throw DataError("cannot serialize a non-finite number");
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
            return;
        }
        default:
            out += j.dump();
    }
}

std::string to_text(const json& j) {
    std::string out;
    dump(j, out, 2, 0);
    out.push_back('\n');
    return out;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    Matrix m;
    for (const auto& row : j) m.append_row(row.get<std::vector<double>>());
    return m;
}

json schema_to_json(const Schema& s) {
    json features = json::array();
    for (const auto& f : s.features()) features.push_back({{"name", f.name}, {"kind", to_string(f.kind)}});
    return {{"features", features}, {"target", s.target()}, {"class_labels", s.class_labels()}};
}

Schema schema_from_json(const json& j) {
    std::vector<Feature> features;
    for (const auto& f : j.at("features")) {
        features.push_back({f.at("name").get<std::string>(), parse_feature_kind(f.at("kind").get<std::string>())});
    }
    return Schema(std::move(features), j.at("target").get<std::string>(),
                  j.at("class_labels").get<std::vector<std::string>>());
}

json config_to_json(const FitConfig& c) {
    json j = {{"variant", to_string(c.variant)},
              {"seed", c.seed},
              {"max_iter", c.lloyd.max_iter},
              {"tol", c.lloyd.tol},
              {"restarts", c.restarts},
              {"rank_buckets", c.rank_buckets},
              {"basic_groups", c.basic_groups}};
    j["k"] = c.k ? json(*c.k) : json(nullptr);
    return j;
}

FitConfig config_from_json(const json& j) {
    FitConfig c;
    c.variant = parse_variant(j.at("variant").get<std::string>());
    if (!j.at("k").is_null()) c.k = j.at("k").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.lloyd.max_iter = j.at("max_iter").get<std::size_t>();
    c.lloyd.tol = j.at("tol").get<double>();
    c.restarts = j.at("restarts").get<std::size_t>();
    c.rank_buckets = j.at("rank_buckets").get<std::size_t>();
    c.basic_groups = j.at("basic_groups").get<std::size_t>();
    return c;
}

json coding_to_json(const FeatureCoding& f) {
    json j = {{"name", f.feature.name}, {"cost", f.cost}, {"null_cost", f.null_cost}, {"level", f.level}};
    if (const auto* p = std::get_if<IntervalPartition>(&f.partition)) {
        j["type"] = "intervals";
        j["cuts"] = p->cuts;
        j["missing_cell"] = p->has_missing_cell;
        j["counts"] = p->counts;
    } else {
        const auto& g = std::get<ValueGrouping>(f.partition);
        std::vector<std::vector<std::string>> groups(g.num_groups());
        for (const auto& [token, group] : g.group_of) groups.at(group).push_back(token);
        j["type"] = "groups";
        j["groups"] = groups;
        j["missing_group"] = g.missing_group ? json(*g.missing_group) : json(nullptr);
        j["counts"] = g.counts;
    }
    return j;
}

FeatureCoding coding_from_json(const json& j, const Feature& feature) {
    if (j.at("name").get<std::string>() != feature.name) throw DataError("codebook feature order differs from schema");
    FeatureCoding f;
    f.feature = feature;
    f.cost = j.at("cost").get<double>();
    f.null_cost = j.at("null_cost").get<double>();
    f.level = j.at("level").get<double>();
    const auto type = j.at("type").get<std::string>();
    if (type == "intervals") {
        IntervalPartition p;
        p.cuts = j.at("cuts").get<std::vector<double>>();
        p.has_missing_cell = j.at("missing_cell").get<bool>();
        p.counts = j.at("counts").get<modl::CountTable>();
        if (p.counts.size() != p.num_intervals() + (p.has_missing_cell ? 1 : 0)) {
            throw DataError("interval partition of '" + feature.name + "' has inconsistent counts");
        }
        f.partition = std::move(p);
    } else if (type == "groups") {
        ValueGrouping g;
        g.counts = j.at("counts").get<modl::CountTable>();
        const auto groups = j.at("groups").get<std::vector<std::vector<std::string>>>();
        if (groups.size() != g.counts.size()) throw DataError("grouping of '" + feature.name + "' is inconsistent");
        for (std::size_t i = 0; i < groups.size(); ++i) {
            for (const auto& token : groups[i]) g.group_of[token] = i;
        }
        if (!j.at("missing_group").is_null()) g.missing_group = j.at("missing_group").get<std::size_t>();
        f.partition = std::move(g);
    } else {
        throw DataError("unknown partition type '" + type + "'");
    }
    return f;
}

json encoder_to_json(const Encoder& encoder) {
    if (const auto* cb = std::get_if<Codebook>(&encoder)) {
        json features = json::array();
        for (const auto& f : cb->features()) features.push_back(coding_to_json(f));
        return {{"type", "codebook"},
                {"lambda", cb->smoothing()},
                {"class_counts", cb->class_counts()},
                {"priors", cb->priors()},
                {"features", features}};
    }
    const auto& be = std::get<BaselineEncoder>(encoder);
    json transforms = json::array();
    for (const auto& t : be.transforms()) {
        if (const auto* rn = std::get_if<RankNormalizer>(&t)) {
            transforms.push_back({{"type", "rank"}, {"buckets", rn->buckets()}, {"values", rn->sorted_values()}});
        } else {
            const auto& bg = std::get<BasicGrouping>(t);
            std::vector<std::vector<std::string>> groups(bg.num_groups());
            for (const auto& [token, group] : bg.group_of()) groups.at(group).push_back(token);
            transforms.push_back({{"type", "basic_grouping"},
                                  {"groups", groups},
                                  {"missing_group", bg.missing_group() ? json(*bg.missing_group()) : json(nullptr)}});
        }
    }
    return {{"type", "baseline"}, {"transforms", transforms}};
}

Encoder encoder_from_json(const json& j, const Schema& schema) {
    const auto type = j.at("type").get<std::string>();
    if (type == "codebook") {
        const auto& features = j.at("features");
        if (features.size() != schema.num_features()) throw DataError("codebook and schema differ in feature count");
        std::vector<FeatureCoding> codings;
        for (std::size_t n = 0; n < features.size(); ++n) codings.push_back(coding_from_json(features[n], schema.feature(n)));
        auto counts = j.at("class_counts").get<std::vector<std::size_t>>();
        if (counts.size() != schema.num_classes()) throw DataError("codebook class counts differ from schema");
        return Codebook(schema, std::move(codings), std::move(counts), j.at("lambda").get<double>());
    }
    if (type == "baseline") {
        const auto& list = j.at("transforms");
        if (list.size() != schema.num_features()) throw DataError("baseline encoder and schema differ in feature count");
        std::vector<BaselineTransform> transforms;
        for (const auto& t : list) {
            const auto kind = t.at("type").get<std::string>();
            if (kind == "rank") {
                const auto values = t.at("values").get<std::vector<double>>();
                transforms.emplace_back(RankNormalizer(values, t.at("buckets").get<std::size_t>()));
            } else if (kind == "basic_grouping") {
                const auto groups = t.at("groups").get<std::vector<std::vector<std::string>>>();
                std::map<std::string, std::size_t> group_of;
                for (std::size_t i = 0; i < groups.size(); ++i) {
                    for (const auto& token : groups[i]) group_of[token] = i;
                }
                std::optional<std::size_t> missing;
                if (!t.at("missing_group").is_null()) missing = t.at("missing_group").get<std::size_t>();
                transforms.emplace_back(BasicGrouping(std::move(group_of), missing, groups.size()));
            } else {
                throw DataError("unknown baseline transform '" + kind + "'");
            }
        }
        return BaselineEncoder(schema, std::move(transforms));
    }
    throw DataError("unknown encoder type '" + type + "'");
}

json predictor_to_json(const ClusterPredictor& p) {
    json j = {{"pure", p.pure}, {"class_counts", p.class_counts}};
    if (const auto* mv = std::get_if<MajorityVote>(&p.model)) {
        j["predictor"] = {{"type", "mv"}, {"probabilities", mv->probabilities}};
    } else {
        const auto& snb = std::get<SnbModel>(p.model);
        j["predictor"] = {{"type", "snb"},
                          {"weights", snb.weights},
                          {"log_priors", snb.log_priors},
                          {"log_conditionals", snb.log_conditionals},
                          {"selection_cost", snb.selection_cost},
                          {"null_cost", snb.null_cost}};
    }
    return j;
}

ClusterPredictor predictor_from_json(const json& j, std::size_t num_classes) {
    ClusterPredictor p;
    p.pure = j.at("pure").get<bool>();
    p.class_counts = j.at("class_counts").get<std::vector<std::size_t>>();
    if (p.class_counts.size() != num_classes) throw DataError("cluster class counts differ from schema");
    const auto& pj = j.at("predictor");
    const auto type = pj.at("type").get<std::string>();
    if (type == "mv") {
        auto mv = make_majority_vote(p.class_counts);
        mv.probabilities = pj.at("probabilities").get<std::vector<double>>();
        if (mv.probabilities.size() != num_classes) throw DataError("majority vote has the wrong class count");
        p.model = std::move(mv);
    } else if (type == "snb") {
        SnbModel snb;
        snb.weights = pj.at("weights").get<std::vector<double>>();
        snb.log_priors = pj.at("log_priors").get<std::vector<double>>();
        snb.log_conditionals = pj.at("log_conditionals").get<std::vector<std::vector<double>>>();
        snb.selection_cost = pj.at("selection_cost").get<double>();
        snb.null_cost = pj.at("null_cost").get<double>();
        if (snb.log_priors.size() != num_classes || snb.log_conditionals.size() != snb.weights.size()) {
            throw DataError("local SNB model is inconsistent");
        }
        p.model = std::move(snb);
    } else {
        throw DataError("unknown predictor type '" + type + "'");
    }
    return p;
}

json metric_to_json(const MetricResult& m) {
    return {{"mean", m.mean}, {"std", m.stddev}, {"values", m.values}};
}

}  // namespace

std::string model_to_json(const PkmModel& model) {
    json clusters = json::array();
    for (const auto& p : model.predictors) clusters.push_back(predictor_to_json(p));
    json j = {{"format", kModelFormat},
              {"version", kModelFormatVersion},
              {"schema", schema_to_json(model.schema)},
              {"config", config_to_json(model.config)},
              {"iterations", model.iterations},
              {"inertia", model.inertia},
              {"encoder", encoder_to_json(model.encoder)},
              {"centers", {{"init", to_string(model.centers.provenance)}, {"vectors", matrix_to_json(model.centers.vectors)}}},
              {"clusters", clusters}};
    return to_text(j);
}

PkmModel model_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        if (j.at("format").get<std::string>() != kModelFormat) throw DataError("not a model file");
        if (j.at("version").get<int>() != kModelFormatVersion) {
            throw DataError("unsupported model format version " + j.at("version").dump());
        }
        PkmModel model;
        model.schema = schema_from_json(j.at("schema"));
        model.config = config_from_json(j.at("config"));
        model.iterations = j.at("iterations").get<std::size_t>();
        model.inertia = j.at("inertia").get<double>();
        model.encoder = encoder_from_json(j.at("encoder"), model.schema);
        model.centers.provenance = parse_init_method(j.at("centers").at("init").get<std::string>());
        model.centers.vectors = matrix_from_json(j.at("centers").at("vectors"));
        for (const auto& c : j.at("clusters")) model.predictors.push_back(predictor_from_json(c, model.num_classes()));
        if (model.predictors.size() != model.centers.size()) throw DataError("model has mismatched centers and clusters");
        return model;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const PkmModel& model, const std::filesystem::path& path) {
    const auto text = model_to_json(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("failed writing " + path.string());
}

PkmModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

std::string report_to_json(const EvaluationReport& report) {
    json algorithms = json::array();
    for (const auto& a : report.algorithms) {
        json runs = json::array();
        for (const auto& r : a.runs) {
            runs.push_back({{"repeat", r.repeat},
                            {"fold", r.fold},
                            {"acc_train", r.acc_train},
                            {"acc_test", r.acc_test},
                            {"auc_train", r.auc_train},
                            {"auc_test", r.auc_test},
                            {"train_seconds", r.train_seconds},
                            {"clusters", r.clusters},
                            {"pure", r.pure},
                            {"local_models", r.local_models}});
        }
        algorithms.push_back({{"variant", to_string(a.config.variant)},
                              {"config", config_to_json(a.config)},
                              {"acc_train", metric_to_json(a.acc_train)},
                              {"acc_test", metric_to_json(a.acc_test)},
                              {"auc_train", metric_to_json(a.auc_train)},
                              {"auc_test", metric_to_json(a.auc_test)},
                              {"robustness_acc", a.robustness_acc},
                              {"robustness_auc", a.robustness_auc},
                              {"clusters", a.stats.clusters},
                              {"pct_pure", a.stats.pct_pure},
                              {"pct_local_model", a.stats.pct_local_model},
                              {"pct_without", a.stats.pct_without},
                              {"mean_train_seconds", a.mean_train_seconds},
                              {"runs", runs}});
    }
    return to_text({{"dataset", report.dataset},
                    {"instances", report.instances},
                    {"repeats", report.repeats},
                    {"folds", report.folds},
                    {"seed", report.seed},
                    {"algorithms", algorithms}});
}

std::string profiles_to_json(const ProfileReport& report) {
    json clusters = json::array();
    for (const auto& c : report.clusters) {
        json features = json::array();
        for (const auto& f : c.features) {
            features.push_back({{"feature", f.feature},
                                {"cells", f.cells},
                                {"population", f.population},
                                {"cluster", f.cluster},
                                {"weight", f.weight}});
        }
        json weights = json::object();
        for (const auto& [name, w] : c.local_weights) weights[name] = w;
        clusters.push_back({{"cluster", c.cluster},
                            {"size", c.size},
                            {"class_counts", c.class_counts},
                            {"pure", c.pure},
                            {"predictor", c.predictor},
                            {"local_weights", weights},
                            {"features", features}});
    }
    return to_text({{"class_labels", report.class_labels}, {"instances", report.instances}, {"clusters", clusters}});
}

}  // namespace pkm
