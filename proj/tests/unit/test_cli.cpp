#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "pkm/commands.hpp"
#include "pkm/csv.hpp"
#include "pkm/serialization.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("pkm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        const auto data = oracle::blobs(120, 2, 3, 4.0, 5);
        pkm::save_csv(data, path("blobs.csv"));
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(std::vector<std::string> args) {
        out_.str({});
        err_.str({});
        args.insert(args.begin(), "pkm");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        return pkm::cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    static std::vector<pkm::csv::Record> parse_csv(const std::string& text) {
        std::istringstream in(text);
        return pkm::csv::read_records(in);
    }

    static std::string slurp(const std::string& file) {
        std::ifstream in(file);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

}  // namespace

TEST_F(Cli, TrainThenPredictReproducesTrainingAssignment) {
    ASSERT_EQ(run({"train", "--data", path("blobs.csv"), "--variant", "pkm-mv", "--out", path("m.json")}), 0)
        << err_.str();
    EXPECT_NE(out_.str().find("K           3"), std::string::npos);
    ASSERT_EQ(run({"predict", "--model", path("m.json"), "--data", path("blobs.csv"), "--out", path("p.csv")}), 0)
        << err_.str();

    const auto table = parse_csv(slurp(path("p.csv")));
    ASSERT_EQ(table.size(), 121u);
    EXPECT_EQ(table[0], (std::vector<std::string>{"id", "cluster", "p_c0", "p_c1", "p_c2", "predicted"}));

    const auto data = pkm::load_csv(path("blobs.csv"));
    const auto model = pkm::load_model(path("m.json"));
    pkm::FitConfig config;
    config.variant = pkm::Variant::PkmMv;
    const auto fit = pkm::fit_predictive_kmeans(data, config);
    EXPECT_EQ(fit.model, model);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& row = table[i + 1];
        EXPECT_EQ(row[0], std::to_string(i));
        EXPECT_EQ(std::stoul(row[1]), fit.assignment[i]);
        const double sum = std::stod(row[2]) + std::stod(row[3]) + std::stod(row[4]);
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST_F(Cli, PredictWithoutLabelsWritesToStdout) {
    ASSERT_EQ(run({"train", "--data", path("blobs.csv"), "--out", path("m.json")}), 0) << err_.str();
    std::ofstream(path("unlabeled.csv")) << "x0,x1\n0.1,0.2\n8,8\n";
    ASSERT_EQ(run({"predict", "--model", path("m.json"), "--data", path("unlabeled.csv")}), 0) << err_.str();
    const auto table = parse_csv(out_.str());
    ASSERT_EQ(table.size(), 3u);
    EXPECT_EQ(table[1].back(), "c0");
    EXPECT_EQ(table[2].back(), "c2");
}

TEST_F(Cli, EvaluateAllVariants) {
    ASSERT_EQ(run({"evaluate", "--data", path("blobs.csv"), "--variant", "all", "--repeats", "2", "--folds", "3",
                   "--out", path("r"), "--csv"}),
              0)
        << err_.str();
    const auto report = nlohmann::json::parse(slurp(path("r.json")));
    ASSERT_EQ(report.at("algorithms").size(), 3u);
    for (const auto& a : report.at("algorithms")) {
        EXPECT_EQ(a.at("runs").size(), 6u);
        EXPECT_TRUE(a.contains("robustness_acc"));
    }
    const auto text = slurp(path("r.txt"));
    EXPECT_NE(text.find("pkm-snb"), std::string::npos);
    EXPECT_NE(text.find("km-mv"), std::string::npos);
    EXPECT_EQ(parse_csv(slurp(path("r_runs.csv"))).size(), 1u + 3u * 6u);
    EXPECT_EQ(text, out_.str());
}

TEST_F(Cli, ReportWritesProfiles) {
    ASSERT_EQ(run({"train", "--data", path("blobs.csv"), "--out", path("m.json")}), 0) << err_.str();
    ASSERT_EQ(run({"report", "--model", path("m.json"), "--data", path("blobs.csv"), "--out", path("prof")}), 0)
        << err_.str();
    const auto profiles = nlohmann::json::parse(slurp(path("prof.json")));
    EXPECT_EQ(profiles.at("clusters").size(), 3u);
    EXPECT_TRUE(fs::exists(path("prof.txt")));
}

TEST_F(Cli, SameSeedSameModelFile) {
    ASSERT_EQ(run({"train", "--data", path("blobs.csv"), "--variant", "km-mv", "--seed", "4", "--out", path("a.json")}),
              0);
    ASSERT_EQ(run({"train", "--data", path("blobs.csv"), "--variant", "km-mv", "--seed", "4", "--out", path("b.json")}),
              0);
    EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(Cli, Errors) {
    EXPECT_EQ(run({"train", "--data", path("blobs.csv"), "--variant", "nope"}), 1);
    EXPECT_NE(err_.str().find("error:"), std::string::npos);
    EXPECT_EQ(run({"train", "--data", path("missing.csv")}), 1);
    EXPECT_EQ(run({"train", "--data", path("blobs.csv"), "--variant", "pkm-mv", "--k", "2"}), 1);
    EXPECT_NE(err_.str().find("J=3"), std::string::npos);
    EXPECT_EQ(run({"evaluate", "--data", path("blobs.csv"), "--folds", "1"}), 1);
    EXPECT_EQ(run({"predict", "--model", path("missing.json"), "--data", path("blobs.csv")}), 1);
    EXPECT_NE(run({}), 0);
}
