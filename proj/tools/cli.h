#ifndef OPMS_TOOLS_CLI_H_
#define OPMS_TOOLS_CLI_H_

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "opms/models/config.h"
#include "opms/resilience/experiment.h"
#include "opms/synthgen/generator.h"
#include "opms/synthgen/pools.h"

namespace opms::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsageError = 2;

struct PipelineConfig {
  synthgen::BaselineConfig baseline = synthgen::default_baseline();
  std::vector<synthgen::AttackProfile> profiles = synthgen::default_profiles();
  synthgen::PoolSizes pools;
  std::map<models::ModelKind, models::ModelConfig> models;
  // Trial count, seeds and jobs come from the command line.
  resilience::ResilienceConfig experiment;

  const models::ModelConfig& model(models::ModelKind kind) const { return models.at(kind); }
};

// Every section is optional:
//   {"format_version": 1, "baseline": {...}, "profiles": [...],
//    "pools": {"normal": n, "attack_per_type": n},
//    "models": {"mlp": {...}, "xgb": {...}, "svm": {...}},
//    "experiment": {"test_fraction", "k_per_attack", "background_size",
//                   "explain_samples", "n_coalitions"}}
PipelineConfig load_config(const std::optional<std::filesystem::path>& path);

// Pool directory layout: normal.csv plus one <ATTACK>.csv per attack type.
void write_pools(const synthgen::Pools& pools, const std::filesystem::path& dir);
synthgen::Pools read_pools(const std::filesystem::path& dir);

// argv without the program name. Returns 0 on success, 1 on a domain error,
// 2 on a usage error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opms::cli

#endif  // OPMS_TOOLS_CLI_H_
