#include "opms/resilience/experiment.h"

#include <algorithm>
#include <array>
#include <map>

#include "opms/error.h"
#include "opms/io.h"
#include "opms/models/trained_model.h"
#include "opms/parallel.h"
#include "opms/random.h"
#include "opms/resilience/noise.h"
#include "opms/telemetry/assembly.h"

namespace opms::resilience {

double drop_percent(double clean, double noised) {
  if (clean == 0.0) return 0.0;
  return 100.0 * (clean - noised) / clean;
}

double metric_mean(const metrics::MetricReport& r, Metric m) {
  switch (m) {
    case Metric::kBac: return r.bac.mean;
    case Metric::kF1: return r.f1.mean;
    case Metric::kGMean: return r.g_mean.mean;
  }
  return 0.0;
}

const selection::FeatureSet& ResilienceReport::feature_set(models::ModelKind kind) const {
  for (const auto& [k, fs] : feature_sets) {
    if (k == kind) return fs;
  }
  throw Error(ErrorCode::kInvalidArgument, "no feature set for classifier");
}

const CellResult& ResilienceReport::cell(std::string_view attack_set, models::ModelKind kind) const {
  for (const auto& c : cells) {
    if (c.attack_set == attack_set && c.classifier == kind) return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "no cell for " + std::string(attack_set));
}

ArmDrops average_drop(const ResilienceReport& report, Metric m, std::string_view attack_set,
                      std::optional<models::ModelKind> classifier, bool control) {
  ArmDrops sum;
  int n = 0;
  for (const auto& c : report.cells) {
    if (!attack_set.empty() && c.attack_set != attack_set) continue;
    if (classifier && c.classifier != *classifier) continue;
    auto drop = [&](const ArmResult& a) {
      return drop_percent(metric_mean(a.clean, m), metric_mean(control ? a.control : a.noised, m));
    };
    sum.full += drop(c.full);
    sum.selected += drop(c.selected);
    ++n;
  }
  if (n > 0) {
    sum.full /= n;
    sum.selected /= n;
  }
  return sum;
}

RowMatrix explanation_rows(const telemetry::Dataset& test, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> attacks;
  std::vector<std::size_t> normals;
  for (std::size_t i = 0; i < test.size(); ++i) {
    (test.labels()[i].is_attack() ? attacks : normals).push_back(i);
  }
  Rng rng(derive_seed(seed, seed_salt::kBackground) + 1);
  std::shuffle(attacks.begin(), attacks.end(), rng);
  std::shuffle(normals.begin(), normals.end(), rng);
  const std::size_t na = std::min(attacks.size(), n / 2);
  const std::size_t nn = std::min(normals.size(), n - na);
  std::vector<std::size_t> rows(attacks.begin(), attacks.begin() + static_cast<std::ptrdiff_t>(na));
  rows.insert(rows.end(), normals.begin(), normals.begin() + static_cast<std::ptrdiff_t>(nn));
  std::sort(rows.begin(), rows.end());
  RowMatrix out(static_cast<Eigen::Index>(rows.size()), test.features().cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = test.features().row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

RankingStudy compute_rankings(const synthgen::Pools& pools, const ResilienceConfig& cfg) {
  RankingStudy study;
  study.attack_sets = pools.attack_set_names();
  const std::size_t na = study.attack_sets.size();
  const std::size_t nc = cfg.classifiers.size();
  std::vector<telemetry::Dataset> attack_pools;
  for (const auto& name : study.attack_sets) attack_pools.push_back(pools.attack_pool(name));
  study.rankings.assign(na, std::vector<std::vector<explain::RankedFeature>>(nc));
  const std::uint64_t seed = cfg.base_seed;
  parallel_for(na * nc, cfg.jobs, [&](std::size_t job) {
    const std::size_t a = job / nc;
    const std::size_t c = job % nc;
    auto ds = telemetry::assemble_imbalanced(pools.normal, attack_pools[a],
                                             derive_seed(seed, seed_salt::kAssembly));
    auto [train, test] =
        telemetry::stratified_split(ds, cfg.test_fraction, derive_seed(seed, seed_salt::kSplit));
    auto model = models::fit(cfg.classifiers[c], train, derive_seed(seed, seed_salt::kFit));
    auto background = explain::sample_background(train, cfg.background_size, seed);
    auto rows = explanation_rows(test, cfg.explain_samples, seed);
    explain::ExplainOptions opt;
    opt.kernel.n_coalitions = cfg.n_coalitions;
    opt.kernel.seed = seed;
    study.rankings[a][c] = explain::rank_features(explain::explain_model(model, background, rows, opt));
  });
  return study;
}

selection::FeatureSet select_for_classifier(const RankingStudy& study, std::size_t classifier_index,
                                            int k_per_attack, models::ModelKind kind) {
  selection::SelectionPolicy policy;
  policy.k_per_attack = k_per_attack;
  policy.classifier = kind;
  for (std::size_t a = 0; a < study.attack_sets.size(); ++a) {
    if (study.attack_sets[a] == synthgen::kAggregatedName) continue;
    std::vector<std::string> names;
    for (const auto& r : study.rankings[a][classifier_index]) names.push_back(r.name);
    policy.rankings[study.attack_sets[a]] = std::move(names);
  }
  return selection::select_features(policy);
}

std::vector<telemetry::BaseParam> continuous_groups(const telemetry::Dataset& ds) {
  std::vector<telemetry::BaseParam> out;
  for (auto group : ds.schema().groups()) {
    bool continuous = true;
    for (std::size_t c : ds.schema().group(group)) {
      std::vector<double> col(ds.size());
      for (std::size_t i = 0; i < ds.size(); ++i) col[i] = ds.row(i)[c];
      std::sort(col.begin(), col.end());
      const auto distinct = static_cast<std::size_t>(std::unique(col.begin(), col.end()) - col.begin());
      if (2 * distinct < ds.size()) continuous = false;
    }
    if (continuous) out.push_back(group);
  }
  return out;
}

telemetry::BaseParam least_influential_group(const std::vector<explain::RankedFeature>& ranking,
                                             const selection::FeatureSet& exclude,
                                             std::span<const telemetry::BaseParam> candidates) {
  if (ranking.empty()) throw Error(ErrorCode::kEmptyRanking, "ranking is empty");
  std::map<telemetry::BaseParam, double> influence;
  std::map<telemetry::BaseParam, bool> excluded;
  for (const auto& r : ranking) {
    auto desc = telemetry::parse_feature_name(r.name);
    if (!desc) throw Error(ErrorCode::kUnknownFeature, "not a catalogue feature: " + r.name);
    influence[desc->base] += r.mean_abs_phi;
  }
  for (const auto& name : exclude.names()) {
    if (auto desc = telemetry::parse_feature_name(name)) excluded[desc->base] = true;
  }
  std::optional<telemetry::BaseParam> best;
  for (const auto& [group, value] : influence) {
    if (excluded[group]) continue;
    if (!candidates.empty() && std::find(candidates.begin(), candidates.end(), group) == candidates.end()) {
      continue;
    }
    if (!best || value < influence[*best]) best = group;
  }
  if (!best) throw Error(ErrorCode::kEmptyRanking, "no eligible control group");
  return *best;
}

namespace {

struct ArmTrial {
  metrics::TrialMetrics clean;
  metrics::TrialMetrics noised;
  metrics::TrialMetrics control;
};

metrics::TrialMetrics score(const models::TrainedModel& model, const telemetry::Dataset& test) {
  return metrics::trial_metrics(
      metrics::confusion(test.binary_labels(), model.predict(test.features())));
}

ArmTrial run_arm(const models::ModelConfig& cfg, const telemetry::Dataset& train,
                 const telemetry::Dataset& test, telemetry::BaseParam target,
                 telemetry::BaseParam control, std::uint64_t seed) {
  auto model = models::fit(cfg, train, derive_seed(seed, seed_salt::kFit));
  const auto ranges = training_ranges(train);
  ArmTrial out;
  out.clean = score(model, test);
  auto noised = [&](telemetry::BaseParam group, std::uint64_t noise_seed) {
    if (train.schema().group(group).empty()) return out.clean;
    return score(model, noise_group(test, {group, noise_seed}, ranges));
  };
  out.noised = noised(target, seed);
  out.control = noised(control, derive_seed(seed, seed_salt::kNoise));
  return out;
}

metrics::MetricReport collect(const std::vector<ArmTrial>& trials,
                              metrics::TrialMetrics ArmTrial::*field) {
  std::vector<metrics::TrialMetrics> values;
  values.reserve(trials.size());
  for (const auto& t : trials) values.push_back(t.*field);
  return metrics::MetricReport::from_trials(values);
}

}  // namespace

ResilienceReport run_resilience_experiment(const synthgen::Pools& pools,
                                           const ResilienceConfig& cfg) {
  if (cfg.n_trials < 1) throw Error(ErrorCode::kInvalidArgument, "n_trials must be >= 1");
  if (cfg.classifiers.empty()) throw Error(ErrorCode::kInvalidArgument, "no classifiers");
  const RankingStudy study = compute_rankings(pools, cfg);
  const std::size_t na = study.attack_sets.size();
  const std::size_t nc = cfg.classifiers.size();

  ResilienceReport report;
  report.n_trials = cfg.n_trials;
  report.base_seed = cfg.base_seed;
  report.k_per_attack = cfg.k_per_attack;
  for (std::size_t c = 0; c < nc; ++c) {
    report.feature_sets.emplace_back(
        cfg.classifiers[c].kind,
        select_for_classifier(study, c, cfg.k_per_attack, cfg.classifiers[c].kind));
  }
  const auto candidates = continuous_groups(pools.normal);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t c = 0; c < nc; ++c) {
      CellResult cell;
      cell.attack_set = study.attack_sets[a];
      cell.classifier = cfg.classifiers[c].kind;
      cell.ranking = study.rankings[a][c];
      cell.noised_group = telemetry::parse_feature_name(cell.ranking.front().name)->base;
      cell.control_group =
          least_influential_group(cell.ranking, report.feature_sets[c].second, candidates);
      report.cells.push_back(std::move(cell));
    }
  }

  std::vector<telemetry::Dataset> attack_pools;
  for (const auto& name : study.attack_sets) attack_pools.push_back(pools.attack_pool(name));

  const auto n_trials = static_cast<std::size_t>(cfg.n_trials);
  // [cell][arm][trial]
  std::vector<std::array<std::vector<ArmTrial>, 2>> results(report.cells.size());
  for (auto& r : results) {
    r[0].resize(n_trials);
    r[1].resize(n_trials);
  }
  parallel_for(n_trials, cfg.jobs, [&](std::size_t t) {
    const std::uint64_t seed = cfg.base_seed + t;
    for (std::size_t a = 0; a < na; ++a) {
      auto ds = telemetry::assemble_imbalanced(pools.normal, attack_pools[a],
                                               derive_seed(seed, seed_salt::kAssembly));
      auto [train, test] =
          telemetry::stratified_split(ds, cfg.test_fraction, derive_seed(seed, seed_salt::kSplit));
      for (std::size_t c = 0; c < nc; ++c) {
        const std::size_t k = a * nc + c;
        const CellResult& cell = report.cells[k];
        results[k][0][t] = run_arm(cfg.classifiers[c], train, test, cell.noised_group,
                                   cell.control_group, seed);
        const auto& fs = report.feature_sets[c].second;
        results[k][1][t] = run_arm(cfg.classifiers[c], selection::project_dataset(train, fs),
                                   selection::project_dataset(test, fs), cell.noised_group,
                                   cell.control_group, seed);
      }
    }
  });

  for (std::size_t k = 0; k < report.cells.size(); ++k) {
    CellResult& cell = report.cells[k];
    const auto& fs = report.feature_sets[k % nc].second;
    for (int arm = 0; arm < 2; ++arm) {
      ArmResult& r = arm == 0 ? cell.full : cell.selected;
      r.clean = collect(results[k][arm], &ArmTrial::clean);
      r.noised = collect(results[k][arm], &ArmTrial::noised);
      r.control = collect(results[k][arm], &ArmTrial::control);
      if (arm == 1) {
        auto has = [&](telemetry::BaseParam g) {
          return std::any_of(fs.names().begin(), fs.names().end(), [&](const std::string& n) {
            return telemetry::parse_feature_name(n)->base == g;
          });
        };
        r.target_present = has(cell.noised_group);
        r.control_present = has(cell.control_group);
      }
    }
  }
  return report;
}

// ---- export ----

namespace {

using nlohmann::json;

json drops_json(const ArmResult& a, bool control) {
  const auto& other = control ? a.control : a.noised;
  return {{"bac", drop_percent(a.clean.bac.mean, other.bac.mean)},
          {"f1", drop_percent(a.clean.f1.mean, other.f1.mean)},
          {"g_mean", drop_percent(a.clean.g_mean.mean, other.g_mean.mean)}};
}

json arm_json(const ArmResult& a) {
  return {{"clean", metrics::to_json(a.clean)},
          {"noised", metrics::to_json(a.noised)},
          {"control", metrics::to_json(a.control)},
          {"target_present", a.target_present},
          {"control_present", a.control_present},
          {"drop_percent", drops_json(a, false)},
          {"control_drop_percent", drops_json(a, true)}};
}

ArmResult arm_from(const json& j) {
  ArmResult a;
  a.clean = metrics::metric_report_from_json(j.at("clean"));
  a.noised = metrics::metric_report_from_json(j.at("noised"));
  a.control = metrics::metric_report_from_json(j.at("control"));
  a.target_present = j.value("target_present", true);
  a.control_present = j.value("control_present", true);
  return a;
}

json summary_row(const ResilienceReport& r, std::string_view attack,
                 std::optional<models::ModelKind> kind) {
  json out;
  for (auto [m, name] : {std::pair{Metric::kBac, "bac"}, std::pair{Metric::kF1, "f1"},
                         std::pair{Metric::kGMean, "g_mean"}}) {
    const auto d = average_drop(r, m, attack, kind);
    out["full"][name] = d.full;
    out["selected"][name] = d.selected;
  }
  return out;
}

telemetry::BaseParam group_from(const json& j) {
  auto g = telemetry::parse_base_param(j.get<std::string>());
  if (!g) throw Error(ErrorCode::kFormatError, "unknown group " + j.get<std::string>());
  return *g;
}

}  // namespace

json to_json(const ResilienceReport& r) {
  json doc = {{"format_version", kFormatVersion},
              {"kind", "resilience"},
              {"n_trials", r.n_trials},
              {"base_seed", r.base_seed},
              {"k_per_attack", r.k_per_attack}};
  json sets = json::object();
  for (const auto& [kind, fs] : r.feature_sets) sets[std::string(models::model_kind_name(kind))] = fs.names();
  doc["feature_sets"] = sets;
  json cells = json::array();
  for (const auto& c : r.cells) {
    json ranking = json::array();
    for (const auto& f : c.ranking) ranking.push_back({{"feature", f.name}, {"mean_abs_phi", f.mean_abs_phi}});
    cells.push_back({{"attack_set", c.attack_set},
                     {"classifier", std::string(models::model_kind_name(c.classifier))},
                     {"noised_group", std::string(telemetry::base_param_name(c.noised_group))},
                     {"control_group", std::string(telemetry::base_param_name(c.control_group))},
                     {"ranking", ranking},
                     {"full", arm_json(c.full)},
                     {"selected", arm_json(c.selected)}});
  }
  doc["cells"] = cells;

  json by_attack = json::object();
  std::vector<std::string> attacks;
  std::vector<models::ModelKind> kinds;
  for (const auto& c : r.cells) {
    if (std::find(attacks.begin(), attacks.end(), c.attack_set) == attacks.end()) attacks.push_back(c.attack_set);
    if (std::find(kinds.begin(), kinds.end(), c.classifier) == kinds.end()) kinds.push_back(c.classifier);
  }
  json summary = json::object();
  for (const auto& a : attacks) summary["attack"][a] = summary_row(r, a, std::nullopt);
  for (auto k : kinds) summary["classifier"][std::string(models::model_kind_name(k))] = summary_row(r, {}, k);
  summary["overall"] = summary_row(r, {}, std::nullopt);
  doc["summary"] = summary;
  return doc;
}

ResilienceReport resilience_report_from_json(const json& doc) {
  check_format_version(doc, "resilience report");
  try {
    ResilienceReport r;
    r.n_trials = doc.at("n_trials").get<int>();
    r.base_seed = doc.at("base_seed").get<std::uint64_t>();
    r.k_per_attack = doc.at("k_per_attack").get<int>();
    for (const auto& [name, list] : doc.at("feature_sets").items()) {
      auto kind = models::parse_model_kind(name);
      if (!kind) throw Error(ErrorCode::kFormatError, "unknown classifier " + name);
      r.feature_sets.emplace_back(*kind, selection::FeatureSet::from_names(list.get<std::vector<std::string>>()));
    }
    for (const auto& j : doc.at("cells")) {
      CellResult c;
      c.attack_set = j.at("attack_set").get<std::string>();
      auto kind = models::parse_model_kind(j.at("classifier").get<std::string>());
      if (!kind) throw Error(ErrorCode::kFormatError, "unknown classifier");
      c.classifier = *kind;
      c.noised_group = group_from(j.at("noised_group"));
      c.control_group = group_from(j.at("control_group"));
      for (const auto& f : j.at("ranking")) {
        c.ranking.push_back({f.at("feature").get<std::string>(), f.at("mean_abs_phi").get<double>()});
      }
      c.full = arm_from(j.at("full"));
      c.selected = arm_from(j.at("selected"));
      r.cells.push_back(std::move(c));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("resilience report: ") + e.what());
  }
}

std::string resilience_csv(const ResilienceReport& r) {
  std::string out =
      "attack_set,classifier,arm,metric,clean,noised,drop_percent,control,control_drop_percent\n";
  for (const auto& c : r.cells) {
    for (int arm = 0; arm < 2; ++arm) {
      const ArmResult& a = arm == 0 ? c.full : c.selected;
      for (auto [m, name] : {std::pair{Metric::kBac, "bac"}, std::pair{Metric::kF1, "f1"},
                             std::pair{Metric::kGMean, "g_mean"}}) {
        const double clean = metric_mean(a.clean, m);
        const double noised = metric_mean(a.noised, m);
        const double control = metric_mean(a.control, m);
        out += c.attack_set + "," + std::string(models::model_kind_name(c.classifier)) + "," +
               (arm == 0 ? "full" : "selected") + "," + name + ",";
        for (double v : {clean, noised, drop_percent(clean, noised), control,
                         drop_percent(clean, control)}) {
          append_double(out, v);
          out += ',';
        }
        out.back() = '\n';
      }
    }
  }
  return out;
}

}  // namespace opms::resilience
