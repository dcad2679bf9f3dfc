#include <cmath>

#include <gtest/gtest.h>

#include "opms/synthgen/generator.h"
#include "opms/synthgen/pools.h"
#include "test_util.h"

namespace opms::synthgen {
namespace {

using telemetry::BaseParam;
using telemetry::Statistic;

double column_mean(const telemetry::Dataset& ds, const std::string& name) {
  const auto j = static_cast<Eigen::Index>(*ds.schema().index_of(name));
  return ds.features().col(j).mean();
}

AttackType type(const char* name) { return *telemetry::parse_attack_type(name); }

TEST(GeneratorTest, SameSeedSameRows) {
  const auto cfg = default_baseline();
  EXPECT_EQ(generate_normal(cfg, 50, 3), generate_normal(cfg, 50, 3));
  EXPECT_FALSE(generate_normal(cfg, 50, 3) == generate_normal(cfg, 50, 4));
  const auto profiles = default_profiles();
  const auto& p = find_profile(profiles, type("POLSTR"));
  EXPECT_EQ(generate_attack(cfg, p, 20, 8), generate_attack(cfg, p, 20, 8));
}

TEST(GeneratorTest, RowsAreLabelledAndWellFormed) {
  const auto cfg = default_baseline();
  const auto profiles = default_profiles();
  const auto ds = generate_attack(cfg, find_profile(profiles, type("OOBLGT")), 300, 1);
  ASSERT_EQ(ds.size(), 300u);
  ASSERT_EQ(ds.num_features(), 36u);
  for (const auto& l : ds.labels()) {
    ASSERT_TRUE(l.is_attack());
    EXPECT_EQ(l.attack_type()->name(), "OOBLGT");
  }
  const auto& schema = ds.schema();
  for (auto base : telemetry::kAllBaseParams) {
    const auto cols = schema.group(base);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto row = ds.row(i);
      if (telemetry::is_single_valued(base)) {
        EXPECT_GE(row[cols[0]], 0.0);
        EXPECT_EQ(row[cols[0]], std::floor(row[cols[0]]));
      } else {
        const double avg = row[cols[0]], mx = row[cols[1]], mn = row[cols[2]];
        EXPECT_LE(mn, avg);
        EXPECT_LE(avg, mx);
      }
    }
  }
  EXPECT_OPMS_ERROR(generate_normal(cfg, 0, 1), ErrorCode::kInvalidArgument);
}

TEST(GeneratorTest, NormalRowsFollowBaseline) {
  const auto cfg = default_baseline();
  const auto ds = generate_normal(cfg, 4000, 2);
  for (const auto& l : ds.labels()) EXPECT_FALSE(l.is_attack());
  const auto& osnr = cfg.params.at(BaseParam::kOSNR);
  EXPECT_NEAR(column_mean(ds, "OSNR"), osnr.mean, 4 * osnr.stddev / std::sqrt(4000.0));
  EXPECT_NEAR(column_mean(ds, "BE-FEC"), cfg.params.at(BaseParam::kBEFEC).mean, 1.0);
}

TEST(GeneratorTest, AttackProfilesShiftTheirParameters) {
  const auto cfg = default_baseline();
  const auto profiles = default_profiles();
  ASSERT_EQ(profiles.size(), 6u);
  const auto normal = generate_normal(cfg, 2000, 1);
  auto attack = [&](const char* name) {
    return generate_attack(cfg, find_profile(profiles, type(name)), 2000, 2);
  };
  const auto inb = attack("INBSTR");
  EXPECT_LT(column_mean(inb, "OSNR"), column_mean(normal, "OSNR") - 1.0);
  EXPECT_GT(column_mean(inb, "BER-FEC"), column_mean(normal, "BER-FEC"));
  const auto oob = attack("OOBSTR");
  EXPECT_LT(column_mean(oob, "OPR"), column_mean(normal, "OPR") - 0.3);
  const auto pol = attack("POLSTR");
  EXPECT_GT(column_mean(pol, "BE-FEC"), column_mean(normal, "BE-FEC") * 1.5);
  // Untouched parameters keep the baseline distribution.
  EXPECT_NEAR(column_mean(inb, "CD"), column_mean(normal, "CD"), 0.5);
  // Strong variants move further than light ones.
  EXPECT_LT(column_mean(inb, "OSNR"), column_mean(attack("INBLGT"), "OSNR"));
}

TEST(GeneratorTest, ConfigJsonRoundTrip) {
  const auto cfg = default_baseline();
  const auto back = baseline_from_json(to_json(cfg));
  EXPECT_EQ(generate_normal(back, 10, 1), generate_normal(cfg, 10, 1));
  const auto profiles = default_profiles();
  const auto round = profiles_from_json(profiles_to_json(profiles));
  ASSERT_EQ(round.size(), profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    EXPECT_EQ(generate_attack(cfg, round[i], 10, 1), generate_attack(cfg, profiles[i], 10, 1));
  }
  EXPECT_OPMS_ERROR(baseline_from_json({{"format_version", 2}}), ErrorCode::kFormatError);
}

TEST(PoolsTest, SizesNamesAndAggregation) {
  const PoolSizes sizes{30, 12};
  const auto pools = generate_pools(default_baseline(), default_profiles(), sizes, 5);
  EXPECT_EQ(pools.normal.size(), 30u);
  ASSERT_EQ(pools.attacks.size(), 6u);
  for (const auto& [t, ds] : pools.attacks) EXPECT_EQ(ds.size(), 12u) << t.name();
  EXPECT_EQ(pools.aggregated().size(), 72u);
  const auto names = pools.attack_set_names();
  ASSERT_EQ(names.size(), 7u);
  EXPECT_EQ(names.back(), kAggregatedName);
  EXPECT_EQ(pools.attack_pool("OOBSTR"), pools.attacks[3].second);
  EXPECT_OPMS_ERROR(pools.attack_pool("XYZ"), ErrorCode::kInvalidArgument);
  const auto again = generate_pools(default_baseline(), default_profiles(), sizes, 5);
  EXPECT_EQ(again.aggregated(), pools.aggregated());
  // Pools use independent streams.
  EXPECT_FALSE(pools.attacks[0].second.features() == pools.attacks[1].second.features());
}

}  // namespace
}  // namespace opms::synthgen
