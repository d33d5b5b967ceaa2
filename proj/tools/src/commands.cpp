#include "pkm/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "pkm/csv.hpp"
#include "pkm/error.hpp"
#include "pkm/evaluation.hpp"
#include "pkm/profile.hpp"
#include "pkm/serialization.hpp"

namespace pkm::cli {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("failed writing " + path.string());
}

std::filesystem::path with_suffix(const std::filesystem::path& base, const std::string& suffix) {
    return std::filesystem::path(base.string() + suffix);
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::vector<Variant> parse_variants(const std::vector<std::string>& names) {
    std::vector<Variant> out;
    for (const auto& n : names) {
        if (n == "all") {
            out.insert(out.end(), {Variant::PkmSnb, Variant::PkmMv, Variant::KmMv});
        } else {
            out.push_back(parse_variant(n));
        }
    }
    return out;
}

}  // namespace

void validate(const RunConfig& config) {
    if (config.repeats < 1) throw std::invalid_argument("--repeats must be >= 1");
    if (config.folds < 2) throw std::invalid_argument("--folds must be >= 2");
    if (config.k && *config.k == 0) throw std::invalid_argument("--k must be >= 1");
    if (config.max_iter < 1) throw std::invalid_argument("--max-iter must be >= 1");
    if (!(config.tol >= 0.0)) throw std::invalid_argument("--tol must be >= 0");
    if (config.threads < 1) throw std::invalid_argument("--threads must be >= 1");
}

FitConfig fit_config(const RunConfig& config, Variant variant) {
    FitConfig fc;
    fc.variant = variant;
    fc.k = config.k;
    fc.seed = config.seed;
    fc.lloyd.max_iter = config.max_iter;
    fc.lloyd.tol = config.tol;
    return fc;
}

Dataset load_input(const std::filesystem::path& data, const std::optional<std::filesystem::path>& schema) {
    if (data.empty()) throw std::invalid_argument("--data is required");
    std::optional<Schema> declared;
    if (schema) declared = load_schema(*schema);
    return load_csv(data, declared);
}

std::filesystem::path cmd_train(const RunConfig& config, std::ostream& log) {
    validate(config);
    if (config.variants.size() > 1) throw std::invalid_argument("train takes a single --variant");
    const Variant variant = config.variants.empty() ? Variant::PkmSnb : config.variants.front();
    const auto data = load_input(config.data, config.schema);

    const auto start = std::chrono::steady_clock::now();
    const auto fitted = fit_predictive_kmeans(data, fit_config(config, variant));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const auto path = config.out.empty() ? std::filesystem::path("model.json") : config.out;
    write_file(path, model_to_json(fitted.model));

    const auto& model = fitted.model;
    std::size_t pure = 0, snb = 0;
    for (const auto& p : model.predictors) {
        pure += p.pure ? 1 : 0;
        snb += p.has_local_model() ? 1 : 0;
    }
    log << "variant     " << to_string(variant) << "\n"
        << "instances   " << data.size() << " (" << data.num_features() << " features, " << data.num_classes()
        << " classes)\n"
        << "K           " << model.num_clusters() << "\n"
        << "iterations  " << model.iterations << "\n"
        << "inertia     " << format_number(model.inertia) << "\n"
        << "clusters    " << pure << " pure, " << snb << " local SNB, " << model.num_clusters() - pure - snb
        << " majority vote (non-pure)\n"
        << "train time  " << fixed(seconds, 4) << " s\n"
        << "model       " << path.string() << "\n";
    for (std::size_t k = 0; k < model.num_clusters(); ++k) {
        const auto& p = model.predictors[k];
        log << "  cluster " << k << ": size " << p.size() << (p.pure ? ", pure" : "")
            << (p.has_local_model() ? ", snb" : ", mv") << "\n";
    }
    return path;
}

void cmd_predict(const RunConfig& config, std::ostream& log) {
    if (config.model.empty()) throw std::invalid_argument("--model is required");
    if (config.data.empty()) throw std::invalid_argument("--data is required");
    const auto model = load_model(config.model);
    if (config.schema) {
        const auto declared = load_schema(*config.schema);
        if (!declared.same_features(model.schema)) throw SchemaMismatch("--schema differs from the model schema");
    }
    const auto data = load_csv(config.data, model.schema, LabelMode::Optional);
    const auto predictions = predict(model, data);

    std::ostringstream out;
    std::vector<std::string> header{"id", "cluster"};
    for (const auto& l : model.schema.class_labels()) header.push_back("p_" + l);
    header.emplace_back("predicted");
    out << csv::join(header) << '\n';
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto& p = predictions[i];
        std::vector<std::string> row{std::to_string(i), std::to_string(p.cluster)};
        for (double v : p.probabilities) row.push_back(format_number(v));
        row.push_back(model.schema.class_labels().at(static_cast<std::size_t>(p.label)));
        out << csv::join(row) << '\n';
    }
    if (config.out.empty()) {
        log << out.str();
    } else {
        write_file(config.out, out.str());
        log << "wrote " << predictions.size() << " predictions to " << config.out.string() << "\n";
    }
}

void cmd_evaluate(const RunConfig& config, std::ostream& log) {
    validate(config);
    const auto data = load_input(config.data, config.schema);
    const auto variants = config.variants.empty()
                              ? std::vector<Variant>{Variant::PkmSnb, Variant::PkmMv, Variant::KmMv}
                              : config.variants;
    std::vector<FitConfig> algorithms;
    for (auto v : variants) algorithms.push_back(fit_config(config, v));

    CvOptions options;
    options.repeats = config.repeats;
    options.folds = config.folds;
    options.seed = config.seed;
    options.threads = config.threads;
    const auto report = cross_validate(data, algorithms, options, config.data.stem().string());

    const auto base = config.out.empty() ? std::filesystem::path("report") : config.out;
    const auto text = format_report(report);
    write_file(with_suffix(base, ".json"), report_to_json(report));
    write_file(with_suffix(base, ".txt"), text);
    if (config.runs_csv) write_file(with_suffix(base, "_runs.csv"), report_runs_csv(report));
    log << text;
}

void cmd_report(const RunConfig& config, std::ostream& log) {
    if (config.model.empty()) throw std::invalid_argument("--model is required");
    const auto model = load_model(config.model);
    if (config.data.empty()) throw std::invalid_argument("--data is required");
    const auto data = load_csv(config.data, model.schema, LabelMode::Required);
    const auto profiles = cluster_profiles(model, data);

    const auto base = config.out.empty() ? std::filesystem::path("profile") : config.out;
    const auto text = format_profiles(profiles);
    write_file(with_suffix(base, ".json"), profiles_to_json(profiles));
    write_file(with_suffix(base, ".txt"), text);
    log << text;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Predictive k-means: supervised clustering that doubles as a classifier"};
    app.require_subcommand(1);

    RunConfig config;
    std::vector<std::string> variant_names;
    std::string data, schema, output, model;

    auto add_data = [&](CLI::App* cmd) {
        cmd->add_option("--data", data, "Input CSV (with header)")->required();
        cmd->add_option("--schema", schema, "Schema sidecar (name,kind lines; final target,<name>)");
    };
    auto add_fit = [&](CLI::App* cmd) {
        cmd->add_option("--variant", variant_names, "pkm-snb, pkm-mv, km-mv or all");
        cmd->add_option("--k", config.k, "Number of clusters (default: number of classes)");
        cmd->add_option("--seed", config.seed, "Random seed")->capture_default_str();
        cmd->add_option("--max-iter", config.max_iter, "Lloyd iteration cap")->capture_default_str();
        cmd->add_option("--tol", config.tol, "Center displacement tolerance")->capture_default_str();
    };

    auto* train = app.add_subcommand("train", "Fit a model and write it as JSON");
    add_data(train);
    add_fit(train);
    train->add_option("--out", output, "Model file (default model.json)");

    auto* pred = app.add_subcommand("predict", "Predict clusters and class probabilities");
    pred->add_option("--model", model, "Model file")->required();
    add_data(pred);
    pred->add_option("--out", output, "Predictions CSV (default: stdout)");

    auto* eval = app.add_subcommand("evaluate", "Repeated stratified cross-validation");
    add_data(eval);
    add_fit(eval);
    eval->add_option("--repeats", config.repeats, "Cross-validation repeats")->capture_default_str();
    eval->add_option("--folds", config.folds, "Folds per repeat")->capture_default_str();
    eval->add_option("--threads", config.threads, "Worker threads")->capture_default_str();
    eval->add_option("--out", output, "Output prefix for .json/.txt (default report)");
    eval->add_flag("--csv", config.runs_csv, "Also write per-fold rows to <out>_runs.csv");

    auto* rep = app.add_subcommand("report", "Cluster profiles of a model on its training data");
    rep->add_option("--model", model, "Model file")->required();
    add_data(rep);
    rep->add_option("--out", output, "Output prefix for .json/.txt (default profile)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        config.data = data;
        if (!schema.empty()) config.schema = schema;
        config.out = output;
        config.model = model;
        config.variants = parse_variants(variant_names);
        if (*train) {
            cmd_train(config, out);
        } else if (*pred) {
            cmd_predict(config, out);
        } else if (*eval) {
            cmd_evaluate(config, out);
        } else {
            cmd_report(config, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace pkm::cli
