#ifndef OPMS_SYNTHGEN_GENERATOR_H_
#define OPMS_SYNTHGEN_GENERATOR_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "opms/telemetry/dataset.h"
#include "opms/telemetry/schema.h"

namespace opms::synthgen {

using telemetry::AttackType;
using telemetry::BaseParam;

// Per-parameter Gaussian baseline. For the block-error counters `mean` is the
// Poisson rate and `stddev` is unused; for LOS `mean` is the Bernoulli rate.
struct ParamBaseline {
  double mean = 0.0;
  double stddev = 0.0;
};

struct BaselineConfig {
  std::map<BaseParam, ParamBaseline> params;
  // Scale of the |N(0, spread * sigma)| draws that place max/min around avg.
  double spread_factor = 1.0;
  std::uint64_t seed = 0;
};

// Documented defaults; see README for the table of values.
BaselineConfig default_baseline();

struct ParamShift {
  double mean_shift = 0.0;    // in the parameter's unit
  double extra_stddev = 0.0;  // added in quadrature to the baseline stddev
  double burstiness = 0.0;    // counters: rate multiplier is (1 + burstiness)
};

struct AttackProfile {
  AttackType type;
  std::map<BaseParam, ParamShift> shifts;
};

// INBLGT, INBSTR, OOBLGT, OOBSTR, POLLGT, POLSTR against default_baseline().
std::vector<AttackProfile> default_profiles();
const AttackProfile& find_profile(const std::vector<AttackProfile>& profiles,
                                  const AttackType& type);

// Rows over build_default_schema(). The effective seed mixes `seed` with
// cfg.seed. Throws InvalidArgument when n == 0.
telemetry::Dataset generate_normal(const BaselineConfig& cfg, std::size_t n,
                                   std::uint64_t seed);
telemetry::Dataset generate_attack(const BaselineConfig& cfg,
                                   const AttackProfile& profile, std::size_t n,
                                   std::uint64_t seed);

nlohmann::json to_json(const BaselineConfig& cfg);
BaselineConfig baseline_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const AttackProfile& profile);
AttackProfile profile_from_json(const nlohmann::json& doc);
nlohmann::json profiles_to_json(const std::vector<AttackProfile>& profiles);
std::vector<AttackProfile> profiles_from_json(const nlohmann::json& doc);

}  // namespace opms::synthgen

#endif  // OPMS_SYNTHGEN_GENERATOR_H_
