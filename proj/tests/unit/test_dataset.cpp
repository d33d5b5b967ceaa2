#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "pkm/csv.hpp"
#include "pkm/dataset.hpp"
#include "pkm/error.hpp"

using namespace pkm;

namespace {

Dataset parse(const std::string& text, const std::optional<Schema>& schema = std::nullopt,
              LabelMode mode = LabelMode::Required) {
    std::istringstream in(text);
    return read_csv(in, schema, mode);
}

Schema two_numeric() {
    return Schema({{"x", FeatureKind::Numeric}, {"y", FeatureKind::Numeric}}, "label");
}

}  // namespace

TEST(Csv, QuotedFieldsAndCrlf) {
    std::istringstream in("a,\"b,c\",\"say \"\"hi\"\"\"\r\n\r\n1,2,3\r\n");
    const auto rows = csv::read_records(in);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0][1], "b,c");
    EXPECT_EQ(rows[0][2], "say \"hi\"");
    EXPECT_EQ(rows[1][2], "3");
}

TEST(Csv, UnterminatedQuoteIsAnError) {
    std::istringstream in("a,\"b\n");
    EXPECT_THROW(csv::read_records(in), DataError);
}

TEST(Csv, EscapeRoundTrips) {
    const csv::Record rec{"plain", "with,comma", "with \"quote\"", "line\nbreak"};
    std::istringstream in(csv::join(rec) + "\n");
    const auto back = csv::read_records(in);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0], rec);
}

TEST(LoadCsv, SixRowsTwoFeaturesTwoClasses) {
    const auto data = parse("x,y,label\n1,2,A\n3,4,B\n5,6,A\n7,8,B\n9,10,A\n11,12,B\n", two_numeric());
    EXPECT_EQ(data.size(), 6u);
    EXPECT_EQ(data.num_features(), 2u);
    EXPECT_EQ(data.num_classes(), 2u);
    EXPECT_EQ(data.schema().class_labels(), (std::vector<std::string>{"A", "B"}));
    EXPECT_EQ(data.labels(), (std::vector<int>{0, 1, 0, 1, 0, 1}));
}

TEST(LoadCsv, EmptyNumericCellIsMissing) {
    const auto data = parse("x,y,label\n1,,A\n3,4,B\n", two_numeric());
    EXPECT_FALSE(data.numeric(1)[0].has_value());
    EXPECT_TRUE(is_missing(data.value(0, 1)));
    EXPECT_DOUBLE_EQ(*data.numeric(1)[1], 4.0);
}

TEST(LoadCsv, HeaderColumnsMayBeReordered) {
    const auto data = parse("label,y,x\nA,2,1\nB,4,3\n", two_numeric());
    EXPECT_DOUBLE_EQ(*data.numeric(0)[1], 3.0);
    EXPECT_DOUBLE_EQ(*data.numeric(1)[1], 4.0);
}

TEST(LoadCsv, Errors) {
    EXPECT_THROW(parse("x,y,label\n1,2\n", two_numeric()), DataError);          // arity
    EXPECT_THROW(parse("x,y,label\n1,abc,A\n3,4,B\n", two_numeric()), DataError);  // number
    EXPECT_THROW(parse("", two_numeric()), DataError);                          // empty
    EXPECT_THROW(parse("x,y,label\n1,2,\n3,4,B\n", two_numeric()), DataError);  // missing label
    EXPECT_THROW(parse("x,label\n1,A\n", two_numeric()), SchemaMismatch);       // missing column

    const auto fixed = with_class_labels(two_numeric(), {"A", "B"});
    EXPECT_THROW(parse("x,y,label\n1,2,A\n3,4,C\n", fixed), DataError);  // unknown label
}

TEST(LoadCsv, InfersKindsWithoutSchema) {
    const auto data = parse("a,b,c,class\n1,red,,yes\n2.5,blue,3,no\n");
    ASSERT_EQ(data.num_features(), 3u);
    EXPECT_EQ(data.schema().feature(0).kind, FeatureKind::Numeric);
    EXPECT_EQ(data.schema().feature(1).kind, FeatureKind::Categorical);
    EXPECT_EQ(data.schema().feature(2).kind, FeatureKind::Numeric);
    EXPECT_EQ(data.schema().target(), "class");
}

TEST(LoadCsv, OptionalLabelsForPrediction) {
    const auto schema = with_class_labels(two_numeric(), {"A", "B"});
    const auto data = parse("x,y\n1,2\n3,4\n", schema, LabelMode::Optional);
    EXPECT_EQ(data.size(), 2u);
    EXPECT_FALSE(data.has_labels());
}

TEST(LoadCsv, Pima) {
    const auto data = load_csv(PKM_DATA_DIR "/pima.csv", load_schema(PKM_DATA_DIR "/pima.schema"));
    EXPECT_EQ(data.size(), 768u);
    EXPECT_EQ(data.num_features(), 8u);
    EXPECT_EQ(data.num_classes(), 2u);
    const auto counts = data.class_counts();
    EXPECT_EQ(std::min(counts[0], counts[1]), 268u);
}

TEST(LoadCsv, Glass) {
    const auto data = load_csv(PKM_DATA_DIR "/glass.csv", load_schema(PKM_DATA_DIR "/glass.schema"));
    EXPECT_EQ(data.size(), 214u);
    EXPECT_EQ(data.num_features(), 10u);
    EXPECT_EQ(data.num_classes(), 6u);
}

TEST(Schema, Validation) {
    EXPECT_THROW(Schema({{"x", FeatureKind::Numeric}, {"x", FeatureKind::Numeric}}, "t"), DataError);
    EXPECT_THROW(Schema({{"t", FeatureKind::Numeric}}, "t"), DataError);
    EXPECT_THROW(Schema({{"x", FeatureKind::Numeric}}, ""), DataError);
}

TEST(Schema, SidecarRoundTrip) {
    const Schema s({{"x", FeatureKind::Numeric}, {"colour", FeatureKind::Categorical}}, "class");
    std::ostringstream out;
    write_schema(s, out);
    std::istringstream in(out.str());
    EXPECT_EQ(read_schema(in), s);
}

TEST(Schema, SidecarRequiresTargetLast) {
    std::istringstream in("x,numeric\ntarget,class\ny,numeric\n");
    EXPECT_THROW(read_schema(in), DataError);
}

TEST(Dataset, CsvRoundTripIsIdentical) {
    const auto data = parse("x,y,label\n1.5,,A\n0.1,-3e-7,B\n", two_numeric());
    std::ostringstream out;
    write_csv(data, out);
    EXPECT_EQ(parse(out.str(), data.schema()), data);
}

TEST(Dataset, LabeledDataNeedsTwoClasses) {
    const Schema s({{"x", FeatureKind::Numeric}}, "t", {"only"});
    EXPECT_THROW(Dataset(s, {NumericColumn{1.0, 2.0}}, {0, 0}), DataError);
}

TEST(Dataset, SubsetKeepsSchema) {
    const auto data = parse("x,y,label\n1,2,A\n3,4,B\n5,6,A\n", two_numeric());
    const std::vector<std::size_t> rows{2, 0};
    const auto sub = data.subset(rows);
    EXPECT_EQ(sub.size(), 2u);
    EXPECT_EQ(sub.schema(), data.schema());
    EXPECT_DOUBLE_EQ(*sub.numeric(0)[0], 5.0);
}

TEST(StratifiedKfold, PerfectlyDivisible) {
    std::vector<int> labels(100);
    for (std::size_t i = 50; i < 100; ++i) labels[i] = 1;
    const auto plan = stratified_kfold(labels, 10, 3);
    for (const auto& fold : plan.folds) {
        ASSERT_EQ(fold.size(), 10u);
        const auto b = std::count_if(fold.begin(), fold.end(), [&](std::size_t i) { return labels[i] == 1; });
        EXPECT_EQ(b, 5);
    }
}

TEST(StratifiedKfold, SevenThreeInTwoFolds) {
    const std::vector<int> labels{0, 0, 0, 0, 0, 0, 0, 1, 1, 1};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto plan = stratified_kfold(labels, 2, seed);
        for (const auto& fold : plan.folds) {
            EXPECT_EQ(fold.size(), 5u);
            const auto b = std::count_if(fold.begin(), fold.end(), [&](std::size_t i) { return labels[i] == 1; });
            EXPECT_TRUE(b == 1 || b == 2);
        }
    }
}

TEST(StratifiedKfold, DeterministicAndSeedSensitive) {
    std::vector<int> labels;
    for (int i = 0; i < 60; ++i) labels.push_back(i % 3);
    EXPECT_EQ(stratified_kfold(labels, 5, 11), stratified_kfold(labels, 5, 11));
    EXPECT_NE(stratified_kfold(labels, 5, 11).folds, stratified_kfold(labels, 5, 12).folds);
}

TEST(StratifiedKfold, Errors) {
    const std::vector<int> labels{0, 1, 0};
    EXPECT_THROW(stratified_kfold(labels, 4, 0), std::invalid_argument);
    EXPECT_THROW(stratified_kfold(labels, 1, 0), std::invalid_argument);
}

TEST(StratifiedKfold, TrainIsComplementOfTest) {
    std::vector<int> labels;
    for (int i = 0; i < 23; ++i) labels.push_back(i % 2);
    const auto plan = stratified_kfold(labels, 4, 5);
    for (std::size_t f = 0; f < 4; ++f) {
        auto all = plan.train_indices(f);
        const auto test = plan.test_indices(f);
        all.insert(all.end(), test.begin(), test.end());
        std::sort(all.begin(), all.end());
        ASSERT_EQ(all.size(), labels.size());
        for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
    }
}
