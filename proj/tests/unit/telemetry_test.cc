#include <set>

#include <gtest/gtest.h>

#include "opms/io.h"
#include "opms/telemetry/assembly.h"
#include "opms/telemetry/csv.h"
#include "opms/telemetry/dataset.h"
#include "opms/telemetry/schema.h"
#include "test_util.h"

namespace opms::telemetry {
namespace {

Dataset small_dataset(std::size_t normal, std::size_t attacks, std::uint64_t seed = 1) {
  const auto schema = build_default_schema();
  std::mt19937_64 rng(seed);
  RowMatrix x = testing::random_matrix(static_cast<Eigen::Index>(normal + attacks),
                                       static_cast<Eigen::Index>(schema.size()), rng);
  std::vector<Label> labels;
  for (std::size_t i = 0; i < normal; ++i) labels.push_back(Label::normal());
  const AttackType inbstr{AttackKind::kINB, Intensity::kSTR};
  for (std::size_t i = 0; i < attacks; ++i) labels.push_back(Label::attack(inbstr));
  return Dataset(schema, std::move(x), std::move(labels), "test");
}

TEST(SchemaTest, DefaultSchemaHasThirtySixColumns) {
  const auto schema = build_default_schema();
  ASSERT_EQ(schema.size(), 36u);
  std::size_t single = 0;
  for (const auto& e : schema.entries()) single += e.statistic == Statistic::kSingle;
  EXPECT_EQ(single, 3u);
  EXPECT_EQ(schema.groups().size(), 14u);
  const auto list = schema.names();
  const std::set<std::string> names(list.begin(), list.end());
  EXPECT_EQ(names.size(), 36u);
  EXPECT_TRUE(names.count("Q-factor-max"));
  EXPECT_TRUE(names.count("BER-POST-FEC-min"));
  EXPECT_TRUE(names.count("UBE-FEC"));
  EXPECT_FALSE(names.count("UBE-FEC-max"));
}

TEST(SchemaTest, FeatureNamesRoundTrip) {
  const auto schema = build_default_schema();
  for (const auto& e : schema.entries()) {
    const auto parsed = parse_feature_name(e.name);
    ASSERT_TRUE(parsed) << e.name;
    EXPECT_EQ(*parsed, e);
  }
  EXPECT_FALSE(parse_feature_name("OSNR-median"));
  EXPECT_FALSE(parse_feature_name("LOS-max"));
  EXPECT_EQ(feature_name(BaseParam::kQFactor, Statistic::kMin), "Q-factor-min");
}

TEST(SchemaTest, GroupsAndFingerprint) {
  const auto schema = build_default_schema();
  EXPECT_EQ(schema.group(BaseParam::kOSNR).size(), 3u);
  EXPECT_EQ(schema.group(BaseParam::kLOS).size(), 1u);
  const std::vector<std::string> some = {"OSNR", "OPR-min"};
  const auto sub = FeatureSchema::from_names(some);
  EXPECT_TRUE(sub.group(BaseParam::kCD).empty());
  EXPECT_NE(sub.fingerprint(), schema.fingerprint());
  EXPECT_EQ(schema.fingerprint(), build_default_schema().fingerprint());
  const std::vector<std::string> bad = {"OSNR", "bogus"};
  EXPECT_OPMS_ERROR(FeatureSchema::from_names(bad), ErrorCode::kUnknownFeature);
  const std::vector<std::string> dup = {"OSNR", "OSNR"};
  EXPECT_OPMS_ERROR(FeatureSchema::from_names(dup), ErrorCode::kSchemaMismatch);
}

TEST(DatasetTest, ConstructorValidates) {
  const auto schema = build_default_schema();
  EXPECT_OPMS_ERROR(Dataset(schema, RowMatrix::Zero(2, 5), {Label::normal(), Label::normal()}),
                    ErrorCode::kSchemaMismatch);
  EXPECT_OPMS_ERROR(Dataset(schema, RowMatrix::Zero(2, 36), {Label::normal()}),
                    ErrorCode::kLengthMismatch);
  RowMatrix x = RowMatrix::Zero(1, 36);
  x(0, 3) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_OPMS_ERROR(Dataset(schema, x, {Label::normal()}), ErrorCode::kNonFiniteValue);
}

TEST(DatasetTest, LabelsAndSubset) {
  const auto ds = small_dataset(6, 2);
  EXPECT_EQ(ds.class_ratio(), (std::pair<std::size_t, std::size_t>{6, 2}));
  const auto y = ds.binary_labels();
  EXPECT_EQ(std::count(y.begin(), y.end(), 1), 2);
  const std::vector<std::size_t> idx = {7, 0};
  const auto sub = ds.subset(idx);
  ASSERT_EQ(sub.size(), 2u);
  EXPECT_TRUE(sub.labels()[0].is_attack());
  EXPECT_EQ(sub.features().row(1), ds.features().row(0));
}

TEST(AttackTypeTest, NamesParse) {
  ASSERT_EQ(all_attack_types().size(), 6u);
  for (const auto& t : all_attack_types()) {
    const auto parsed = parse_attack_type(t.name());
    ASSERT_TRUE(parsed);
    EXPECT_EQ(*parsed, t);
  }
  EXPECT_FALSE(parse_attack_type("INBXXX"));
  EXPECT_EQ(all_attack_types()[0].name(), "INBLGT");
}

TEST(AssemblyTest, AttackCountIsFifteenPercentFloor) {
  for (std::size_t n : {1u, 6u, 7u, 20u, 99u, 100u, 133u, 400u}) {
    const auto normal = small_dataset(n, 0, n);
    const auto attacks = small_dataset(0, 70, n + 1);
    const auto ds = assemble_imbalanced(normal, attacks, 5);
    const auto [nn, na] = ds.class_ratio();
    EXPECT_EQ(nn, n);
    EXPECT_EQ(na, n * 15 / 100) << n;
    EXPECT_EQ(na, imbalanced_attack_count(n));
  }
}

TEST(AssemblyTest, DeterministicAndErrors) {
  const auto normal = small_dataset(40, 0, 1);
  const auto attacks = small_dataset(0, 10, 2);
  EXPECT_EQ(assemble_imbalanced(normal, attacks, 9), assemble_imbalanced(normal, attacks, 9));
  EXPECT_FALSE(assemble_imbalanced(normal, attacks, 9) == assemble_imbalanced(normal, attacks, 10));
  EXPECT_OPMS_ERROR(assemble_imbalanced(small_dataset(100, 0), attacks, 1),
                    ErrorCode::kInsufficientAttackRows);
}

TEST(AssemblyTest, StratifiedSplitKeepsClassShares) {
  const auto ds = small_dataset(100, 15);
  const auto [train, test] = stratified_split(ds, 0.3, 4);
  EXPECT_EQ(train.size() + test.size(), ds.size());
  EXPECT_EQ(test.class_ratio(), (std::pair<std::size_t, std::size_t>{30, 5}));
  EXPECT_EQ(train.class_ratio(), (std::pair<std::size_t, std::size_t>{70, 10}));
  EXPECT_OPMS_ERROR(stratified_split(small_dataset(10, 1), 0.3, 1), ErrorCode::kDegenerateClass);
  EXPECT_OPMS_ERROR(stratified_split(ds, 1.0, 1), ErrorCode::kInvalidArgument);
}

TEST(CsvTest, RoundTripIsBitExact) {
  auto ds = small_dataset(5, 3);
  RowMatrix x = ds.features();
  x(0, 0) = 1e-300;
  x(1, 1) = -0.1;
  x(2, 2) = 1.0 / 3.0;
  ds = ds.with_features(x);
  const auto text = to_csv(ds);
  const auto back = from_csv(text, ds.schema());
  EXPECT_EQ(back.features(), ds.features());
  EXPECT_EQ(back.labels(), ds.labels());
  EXPECT_EQ(to_csv(back), text);
}

TEST(CsvTest, FileRoundTripAndInferredSchema) {
  testing::TempDir dir("csv");
  const auto ds = small_dataset(4, 2);
  write_csv(ds, dir.path() / "a.csv");
  EXPECT_EQ(read_csv(dir.path() / "a.csv", ds.schema()).features(), ds.features());
  EXPECT_EQ(read_csv_infer_schema(dir.path() / "a.csv").schema(), ds.schema());
}

TEST(CsvTest, Errors) {
  const auto ds = small_dataset(2, 1);
  const auto schema = ds.schema();
  std::string text = to_csv(ds);

  std::string bad_header = text;
  bad_header.replace(0, 2, "XX");
  EXPECT_OPMS_ERROR(from_csv(bad_header, schema), ErrorCode::kHeaderMismatch);
  EXPECT_OPMS_ERROR(from_csv("", schema), ErrorCode::kHeaderMismatch);

  const auto header_end = text.find('\n') + 1;
  std::string short_row = text.substr(0, header_end) + "1,2,3,Normal,,\n";
  EXPECT_OPMS_ERROR(from_csv(short_row, schema), ErrorCode::kMalformedRow);

  std::string row = text.substr(header_end, text.find('\n', header_end) - header_end);
  std::string nan_row = "nan" + row.substr(row.find(','));
  EXPECT_OPMS_ERROR(from_csv(text.substr(0, header_end) + nan_row + "\n", schema),
                    ErrorCode::kNonFiniteValue);

  std::string word_row = "abc" + row.substr(row.find(','));
  EXPECT_OPMS_ERROR(from_csv(text.substr(0, header_end) + word_row + "\n", schema),
                    ErrorCode::kMalformedRow);

  std::string bad_label = row.substr(0, row.rfind("Normal")) + "Maybe,,";
  EXPECT_OPMS_ERROR(from_csv(text.substr(0, header_end) + bad_label + "\n", schema),
                    ErrorCode::kMalformedRow);
}

TEST(IoTest, AtomicJsonWriteAndVersionCheck) {
  testing::TempDir dir("io");
  const auto path = dir.path() / "sub" / "x.json";
  write_json_atomic(path, {{"format_version", kFormatVersion}, {"v", 0.1}});
  const auto doc = read_json(path);
  EXPECT_EQ(doc["v"].get<double>(), 0.1);
  check_format_version(doc, "x");
  EXPECT_OPMS_ERROR(check_format_version({{"format_version", 99}}, "x"), ErrorCode::kFormatError);
  EXPECT_OPMS_ERROR(read_json(dir.path() / "missing.json"), ErrorCode::kIoError);
}

}  // namespace
}  // namespace opms::telemetry
