#include <gtest/gtest.h>

#include "opms/selection/selection.h"
#include "opms/synthgen/generator.h"
#include "test_util.h"

namespace opms::selection {
namespace {

SelectionPolicy policy(int k) {
  SelectionPolicy p;
  p.k_per_attack = k;
  p.rankings = {
      {"INBLGT", {"OSNR", "Q-factor", "BER-FEC", "CD"}},
      {"OOBSTR", {"OPR", "OPR-min", "OSNR"}},
      {"POLSTR", {"BE-FEC"}},
  };
  return p;
}

TEST(SelectionTest, UnionOfTopKSortedAlphabetically) {
  EXPECT_EQ(select_features(policy(1)).names(), (std::vector<std::string>{"BE-FEC", "OPR", "OSNR"}));
  EXPECT_EQ(select_features(policy(2)).names(),
            (std::vector<std::string>{"BE-FEC", "OPR", "OPR-min", "OSNR", "Q-factor"}));
  // Overlap between rankings is counted once; short rankings contribute all they have.
  EXPECT_EQ(select_features(policy(3)).names(),
            (std::vector<std::string>{"BE-FEC", "BER-FEC", "OPR", "OPR-min", "OSNR", "Q-factor"}));
}

TEST(SelectionTest, PolicyErrors) {
  EXPECT_OPMS_ERROR(select_features(policy(0)), ErrorCode::kInvalidArgument);
  EXPECT_OPMS_ERROR(select_features(policy(4)), ErrorCode::kInvalidArgument);
  SelectionPolicy empty;
  EXPECT_OPMS_ERROR(select_features(empty), ErrorCode::kEmptyRanking);
  auto p = policy(2);
  p.rankings["POLLGT"] = {};
  EXPECT_OPMS_ERROR(select_features(p), ErrorCode::kEmptyRanking);
  EXPECT_OPMS_ERROR(FeatureSet::from_names({}), ErrorCode::kInvalidArgument);
  EXPECT_OPMS_ERROR(FeatureSet::from_names({"OPR", "OPR"}), ErrorCode::kInvalidArgument);
}

TEST(SelectionTest, ProjectionKeepsRowsAndLabels) {
  const auto ds = synthgen::generate_normal(synthgen::default_baseline(), 12, 1);
  const auto fs = FeatureSet::from_names({"OSNR", "BE-FEC", "OPR-min"});
  EXPECT_TRUE(fs.contains("OSNR"));
  EXPECT_FALSE(fs.contains("OPR"));
  const auto p = project_dataset(ds, fs);
  ASSERT_EQ(p.num_features(), 3u);
  EXPECT_EQ(p.schema().names(), fs.names());
  EXPECT_EQ(p.labels(), ds.labels());
  for (std::size_t j = 0; j < 3; ++j) {
    const auto src = static_cast<Eigen::Index>(*ds.schema().index_of(fs.names()[j]));
    EXPECT_EQ(p.features().col(static_cast<Eigen::Index>(j)), ds.features().col(src));
  }
  EXPECT_EQ(project_rows(ds.features(), ds.schema(), fs), p.features());
  EXPECT_NE(p.provenance().find("projected:3"), std::string::npos);
  EXPECT_OPMS_ERROR(project_dataset(p, FeatureSet::from_names({"CD"})), ErrorCode::kUnknownFeature);
}

TEST(SelectionTest, JsonRoundTrip) {
  const auto fs = select_features(policy(2));
  EXPECT_EQ(feature_set_from_json(to_json(fs)), fs);
  EXPECT_OPMS_ERROR(feature_set_from_json({{"format_version", 1}, {"features", {"OPR", "OPR"}}}),
                    ErrorCode::kInvalidArgument);
  EXPECT_OPMS_ERROR(feature_set_from_json({{"features", {"OPR"}}}), ErrorCode::kFormatError);
}

}  // namespace
}  // namespace opms::selection
