#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pkm/dataset.hpp"
#include "pkm/model.hpp"

namespace pkm::cli {

struct RunConfig {
    std::filesystem::path data;
    std::optional<std::filesystem::path> schema;
    std::vector<Variant> variants;  // empty: command default
    std::optional<std::size_t> k;
    std::uint64_t seed = 0;
    std::size_t repeats = 10;
    std::size_t folds = 10;
    std::size_t max_iter = LloydOptions{}.max_iter;
    double tol = LloydOptions{}.tol;
    std::filesystem::path out;  // empty: command default
    std::filesystem::path model;
    std::size_t threads = 1;
    bool runs_csv = false;
};

/// Validates the invariants shared by all commands; throws std::invalid_argument.
void validate(const RunConfig& config);

FitConfig fit_config(const RunConfig& config, Variant variant);

Dataset load_input(const std::filesystem::path& data, const std::optional<std::filesystem::path>& schema);

/// Writes the model file and prints a summary. Returns the model path.
std::filesystem::path cmd_train(const RunConfig& config, std::ostream& log);

/// Writes `id,cluster,p_<label>...,predicted`; to `log` when no --out is given.
void cmd_predict(const RunConfig& config, std::ostream& log);

/// Writes <out>.json, <out>.txt and, with runs_csv, <out>_runs.csv.
void cmd_evaluate(const RunConfig& config, std::ostream& log);

/// Writes <out>.json and <out>.txt with per-cluster profiles.
void cmd_report(const RunConfig& config, std::ostream& log);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pkm::cli
