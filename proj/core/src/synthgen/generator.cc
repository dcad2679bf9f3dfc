#include "opms/synthgen/generator.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "opms/error.h"
#include "opms/io.h"
#include "opms/random.h"

namespace opms::synthgen {

using telemetry::AttackKind;
using telemetry::Dataset;
using telemetry::FeatureSchema;
using telemetry::Intensity;
using telemetry::Label;

BaselineConfig default_baseline() {
  BaselineConfig cfg;
  cfg.params = {
      {BaseParam::kCD, {1600.0, 4.0}},          // ps/nm
      {BaseParam::kDGD, {4.0, 0.4}},            // ps
      {BaseParam::kOSNR, {28.0, 0.35}},         // dB
      {BaseParam::kPDL, {0.9, 0.1}},            // dB
      {BaseParam::kQFactor, {8.6, 0.12}},       // dB
      {BaseParam::kBEFEC, {40.0, 0.0}},         // blocks / interval
      {BaseParam::kBERFEC, {4.0e-4, 2.0e-5}},
      {BaseParam::kUBEFEC, {0.02, 0.0}},        // blocks / interval
      {BaseParam::kBERPostFEC, {1.0e-12, 2.0e-13}},
      {BaseParam::kOPR, {-8.0, 0.12}},          // dBm
      {BaseParam::kOPT, {1.0, 0.05}},           // dBm
      {BaseParam::kOFT, {195200.0, 0.15}},      // GHz
      {BaseParam::kOFR, {195200.0, 0.4}},       // GHz
      {BaseParam::kLOS, {0.001, 0.0}},          // Bernoulli rate
  };
  cfg.spread_factor = 1.0;
  return cfg;
}

namespace {

// Signature magnitudes in units of the default baseline stddev.
struct SigmaShift {
  BaseParam param;
  double mean_sigmas;
  double extra_sigmas;
  double burstiness;
};

AttackProfile make_profile(AttackType type, std::initializer_list<SigmaShift> shifts) {
  const BaselineConfig base = default_baseline();
  AttackProfile p{type, {}};
  for (const auto& s : shifts) {
    const double sd = base.params.at(s.param).stddev;
    p.shifts[s.param] = {s.mean_sigmas * sd, s.extra_sigmas * sd, s.burstiness};
  }
  return p;
}

}  // namespace

std::vector<AttackProfile> default_profiles() {
  using B = BaseParam;
  const AttackType inb_lgt{AttackKind::kINB, Intensity::kLGT};
  const AttackType inb_str{AttackKind::kINB, Intensity::kSTR};
  const AttackType oob_lgt{AttackKind::kOOB, Intensity::kLGT};
  const AttackType oob_str{AttackKind::kOOB, Intensity::kSTR};
  const AttackType pol_lgt{AttackKind::kPOL, Intensity::kLGT};
  const AttackType pol_str{AttackKind::kPOL, Intensity::kSTR};
  // In-band jamming: unfilterable noise lowers OSNR and Q, raises pre-FEC BER.
  // Out-of-band jamming: the jammer steals amplifier gain, so received power
  // drops first. Polarization scrambling: burst errors and polarization
  // impairments; power and frequency are untouched.
  return {
      make_profile(inb_lgt, {{B::kOSNR, -3.4, 0, 0},
                             {B::kQFactor, -2.4, 0, 0},
                             {B::kBERFEC, 2.4, 0, 0},
                             {B::kBERPostFEC, 1.2, 0, 0}}),
      make_profile(inb_str, {{B::kOSNR, -5.0, 0, 0},
                             {B::kQFactor, -3.5, 0, 0},
                             {B::kBERFEC, 3.5, 0, 0},
                             {B::kBERPostFEC, 1.8, 0, 0}}),
      make_profile(oob_lgt, {{B::kOPR, -3.6, 0, 0},
                             {B::kQFactor, -2.2, 0, 0},
                             {B::kOSNR, -1.6, 0, 0},
                             {B::kBERFEC, 1.6, 0, 0}}),
      make_profile(oob_str, {{B::kOPR, -5.0, 0, 0},
                             {B::kQFactor, -3.2, 0, 0},
                             {B::kOSNR, -2.4, 0, 0},
                             {B::kBERFEC, 2.4, 0, 0}}),
      make_profile(pol_lgt, {{B::kBEFEC, 0, 0, 0.8},
                             {B::kUBEFEC, 0, 0, 3.0},
                             {B::kBERFEC, 2.0, 1.0, 0},
                             {B::kPDL, 0, 1.6, 0},
                             {B::kDGD, 0, 1.6, 0},
                             {B::kQFactor, -1.8, 0, 0}}),
      make_profile(pol_str, {{B::kBEFEC, 0, 0, 1.5},
                             {B::kUBEFEC, 0, 0, 6.0},
                             {B::kBERFEC, 3.2, 2.0, 0},
                             {B::kPDL, 0, 2.4, 0},
                             {B::kDGD, 0, 2.4, 0},
                             {B::kQFactor, -2.6, 0, 0}}),
  };
}

const AttackProfile& find_profile(const std::vector<AttackProfile>& profiles,
                                  const AttackType& type) {
  for (const auto& p : profiles) {
    if (p.type == type) return p;
  }
  throw Error(ErrorCode::kInvalidArgument, "no profile for " + type.name());
}

namespace {

Dataset generate(const BaselineConfig& cfg, const AttackProfile* profile,
                 std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  const FeatureSchema schema = telemetry::build_default_schema();
  Rng rng(derive_seed(derive_seed(seed, cfg.seed), seed_salt::kGenerate));
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  struct Column {
    BaseParam param;
    ParamBaseline base;
    ParamShift shift;
    std::vector<std::size_t> cols;  // avg, max, min or the single column
  };
  std::vector<Column> columns;
  for (BaseParam p : schema.groups()) {
    auto it = cfg.params.find(p);
    if (it == cfg.params.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "baseline missing " + std::string(telemetry::base_param_name(p)));
    }
    ParamShift shift;
    if (profile) {
      if (auto s = profile->shifts.find(p); s != profile->shifts.end()) shift = s->second;
    }
    columns.push_back({p, it->second, shift, schema.group(p)});
  }

  RowMatrix rows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(schema.size()));
  for (std::size_t r = 0; r < n; ++r) {
    auto row = rows.row(static_cast<Eigen::Index>(r));
    for (const Column& c : columns) {
      if (c.param == BaseParam::kLOS) {
        const double rate = std::clamp(c.base.mean + c.shift.mean_shift, 0.0, 1.0);
        row(static_cast<Eigen::Index>(c.cols[0])) =
            std::bernoulli_distribution(rate)(rng) ? 1.0 : 0.0;
      } else if (telemetry::is_single_valued(c.param)) {
        const double rate =
            std::max(0.0, c.base.mean + c.shift.mean_shift) * (1.0 + c.shift.burstiness);
        row(static_cast<Eigen::Index>(c.cols[0])) =
            rate > 0.0 ? static_cast<double>(std::poisson_distribution<long>(rate)(rng))
                       : 0.0;
      } else {
        const double sd = std::hypot(c.base.stddev, c.shift.extra_stddev);
        const double avg = c.base.mean + c.shift.mean_shift + sd * unit_normal(rng);
        const double spread = cfg.spread_factor * sd;
        const double up = std::abs(spread * unit_normal(rng));
        const double down = std::abs(spread * unit_normal(rng));
        row(static_cast<Eigen::Index>(c.cols[0])) = avg;
        row(static_cast<Eigen::Index>(c.cols[1])) = avg + up;
        row(static_cast<Eigen::Index>(c.cols[2])) = avg - down;
      }
    }
  }
  std::vector<Label> labels(n, profile ? Label::attack(profile->type) : Label::normal());
  std::string provenance = std::string("synthgen:") +
                           (profile ? profile->type.name() : "NORMAL") +
                           " n=" + std::to_string(n) + " seed=" + std::to_string(seed);
  return Dataset(schema, std::move(rows), std::move(labels), std::move(provenance));
}

}  // namespace

Dataset generate_normal(const BaselineConfig& cfg, std::size_t n, std::uint64_t seed) {
  return generate(cfg, nullptr, n, seed);
}

Dataset generate_attack(const BaselineConfig& cfg, const AttackProfile& profile,
                        std::size_t n, std::uint64_t seed) {
  return generate(cfg, &profile, n, seed);
}

nlohmann::json to_json(const BaselineConfig& cfg) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [p, b] : cfg.params) {
    params[std::string(telemetry::base_param_name(p))] = {{"mean", b.mean},
                                                          {"stddev", b.stddev}};
  }
  return {{"format_version", kFormatVersion},
          {"params", params},
          {"spread_factor", cfg.spread_factor},
          {"seed", cfg.seed}};
}

namespace {

BaseParam param_from_key(const std::string& key) {
  auto p = telemetry::parse_base_param(key);
  if (!p) throw Error(ErrorCode::kFormatError, "unknown parameter " + key);
  return *p;
}

}  // namespace

BaselineConfig baseline_from_json(const nlohmann::json& doc) {
  check_format_version(doc, "baseline config");
  try {
    BaselineConfig cfg = default_baseline();
    for (const auto& [key, v] : doc.at("params").items()) {
      ParamBaseline b{v.at("mean").get<double>(), v.value("stddev", 0.0)};
      if (!(b.stddev >= 0.0) || !std::isfinite(b.stddev) || !std::isfinite(b.mean)) {
        throw Error(ErrorCode::kInvalidArgument, "bad baseline for " + key);
      }
      cfg.params[param_from_key(key)] = b;
    }
    cfg.spread_factor = doc.value("spread_factor", cfg.spread_factor);
    cfg.seed = doc.value("seed", cfg.seed);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("baseline config: ") + e.what());
  }
}

nlohmann::json to_json(const AttackProfile& profile) {
  nlohmann::json shifts = nlohmann::json::object();
  for (const auto& [p, s] : profile.shifts) {
    shifts[std::string(telemetry::base_param_name(p))] = {
        {"mean_shift", s.mean_shift},
        {"extra_stddev", s.extra_stddev},
        {"burstiness", s.burstiness}};
  }
  return {{"attack_type", profile.type.name()}, {"shifts", shifts}};
}

AttackProfile profile_from_json(const nlohmann::json& doc) {
  try {
    auto type = telemetry::parse_attack_type(doc.at("attack_type").get<std::string>());
    if (!type) throw Error(ErrorCode::kFormatError, "bad attack_type");
    AttackProfile p{*type, {}};
    for (const auto& [key, v] : doc.at("shifts").items()) {
      ParamShift s{v.value("mean_shift", 0.0), v.value("extra_stddev", 0.0),
                   v.value("burstiness", 0.0)};
      if (s.extra_stddev < 0.0 || s.burstiness < 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "negative spread for " + key);
      }
      p.shifts[param_from_key(key)] = s;
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("attack profile: ") + e.what());
  }
}

nlohmann::json profiles_to_json(const std::vector<AttackProfile>& profiles) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& p : profiles) list.push_back(to_json(p));
  return {{"format_version", kFormatVersion}, {"profiles", list}};
}

std::vector<AttackProfile> profiles_from_json(const nlohmann::json& doc) {
  check_format_version(doc, "profiles");
  std::vector<AttackProfile> out;
  for (const auto& p : doc.at("profiles")) out.push_back(profile_from_json(p));
  return out;
}

}  // namespace opms::synthgen
