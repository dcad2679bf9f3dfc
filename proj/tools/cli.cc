#include "cli.h"

#include <algorithm>
#include <set>

#include <CLI11.hpp>

#include "opms/error.h"
#include "opms/explain/explanation.h"
#include "opms/explain/plot.h"
#include "opms/io.h"
#include "opms/metrics/metrics.h"
#include "opms/models/trained_model.h"
#include "opms/random.h"
#include "opms/selection/selection.h"
#include "opms/telemetry/assembly.h"
#include "opms/telemetry/csv.h"
#include "report.h"

namespace opms::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json with_version(json doc) {
  if (!doc.contains("format_version")) doc["format_version"] = kFormatVersion;
  return doc;
}

models::ModelKind parse_kind(const std::string& name) {
  auto kind = models::parse_model_kind(name);
  if (!kind) throw Error(ErrorCode::kInvalidArgument, "unknown model kind: " + name);
  return *kind;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string::npos ? s.size() : comma;
    if (end > start) out.push_back(s.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<models::ModelKind> parse_kinds(const std::string& s) {
  if (s == "all") return {std::begin(models::kAllModelKinds), std::end(models::kAllModelKinds)};
  std::vector<models::ModelKind> out;
  for (const auto& name : split_list(s)) out.push_back(parse_kind(name));
  return out;
}

std::vector<std::string> parse_attack_sets(const std::string& s, const synthgen::Pools& pools) {
  if (s == "all") return pools.attack_set_names();
  return split_list(s);
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension();
  p += suffix;
  return p;
}

struct TrialData {
  telemetry::Dataset train;
  telemetry::Dataset test;
};

// The split a single-seed command works on, identical to trial 0 of eval.
TrialData split_for(const synthgen::Pools& pools, const std::string& attack_set,
                    double test_fraction, std::uint64_t seed) {
  auto ds = telemetry::assemble_imbalanced(pools.normal, pools.attack_pool(attack_set),
                                           derive_seed(seed, seed_salt::kAssembly));
  auto [train, test] =
      telemetry::stratified_split(ds, test_fraction, derive_seed(seed, seed_salt::kSplit));
  return {std::move(train), std::move(test)};
}

}  // namespace

PipelineConfig load_config(const std::optional<fs::path>& path) {
  PipelineConfig cfg;
  for (auto kind : models::kAllModelKinds) cfg.models[kind] = models::default_config(kind);
  cfg.experiment.background_size = 100;
  if (!path) return cfg;
  const json doc = read_json(*path);
  check_format_version(doc, "pipeline config");
  try {
    if (doc.contains("baseline")) cfg.baseline = synthgen::baseline_from_json(with_version(doc["baseline"]));
    if (doc.contains("profiles")) {
      for (const auto& p : doc["profiles"]) {
        auto profile = synthgen::profile_from_json(p);
        auto it = std::find_if(cfg.profiles.begin(), cfg.profiles.end(),
                               [&](const auto& q) { return q.type == profile.type; });
        if (it == cfg.profiles.end()) {
          cfg.profiles.push_back(profile);
        } else {
          *it = profile;
        }
      }
    }
    if (doc.contains("pools")) {
      cfg.pools.normal = doc["pools"].value("normal", cfg.pools.normal);
      cfg.pools.attack_per_type = doc["pools"].value("attack_per_type", cfg.pools.attack_per_type);
    }
    if (doc.contains("models")) {
      for (const auto& [name, m] : doc["models"].items()) {
        const auto kind = parse_kind(name);
        auto mc = models::model_config_from_json(m);
        mc.kind = kind;
        mc.validate();
        cfg.models[kind] = mc;
      }
    }
    if (doc.contains("experiment")) {
      const auto& e = doc["experiment"];
      auto& x = cfg.experiment;
      x.test_fraction = e.value("test_fraction", x.test_fraction);
      x.k_per_attack = e.value("k_per_attack", x.k_per_attack);
      x.background_size = e.value("background_size", x.background_size);
      x.explain_samples = e.value("explain_samples", x.explain_samples);
      x.n_coalitions = e.value("n_coalitions", x.n_coalitions);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("pipeline config: ") + e.what());
  }
  if (!(cfg.experiment.test_fraction > 0.0 && cfg.experiment.test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "test_fraction must be in (0, 1)");
  }
  return cfg;
}

void write_pools(const synthgen::Pools& pools, const fs::path& dir) {
  telemetry::write_csv(pools.normal, dir / "normal.csv");
  for (const auto& [type, ds] : pools.attacks) telemetry::write_csv(ds, dir / (type.name() + ".csv"));
}

synthgen::Pools read_pools(const fs::path& dir) {
  synthgen::Pools pools;
  const auto schema = telemetry::build_default_schema();
  pools.normal = telemetry::read_csv(dir / "normal.csv", schema);
  for (const auto& type : telemetry::all_attack_types()) {
    pools.attacks.emplace_back(type, telemetry::read_csv(dir / (type.name() + ".csv"), schema));
  }
  return pools;
}

namespace {

struct Common {
  std::uint64_t seed = 0;
  int trials = 100;
  std::size_t jobs = 1;
  std::optional<std::string> config;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool trials, bool out_required = true) {
  cmd->add_option("--seed", c.seed, "Base seed")->envname("OPMS_SEED");
  if (trials) {
    cmd->add_option("--trials", c.trials, "Number of trials")
        ->envname("OPMS_TRIALS")
        ->check(CLI::PositiveNumber);
  }
  cmd->add_option("--jobs", c.jobs, "Worker threads")->envname("OPMS_JOBS")->check(CLI::PositiveNumber);
  cmd->add_option("--config", c.config, "Pipeline config JSON")->envname("OPMS_CONFIG");
  auto* out = cmd->add_option("--out", c.out, "Output path");
  if (out_required) out->required();
}

std::optional<fs::path> config_path(const Common& c) {
  if (!c.config) return std::nullopt;
  return fs::path(*c.config);
}

// ---- gen ----

int cmd_gen(const Common& c, const std::string& profile, std::size_t n, std::size_t n_normal,
            std::ostream& out) {
  const PipelineConfig cfg = load_config(config_path(c));
  if (profile == "all") {
    synthgen::PoolSizes sizes = cfg.pools;
    if (n > 0) sizes.attack_per_type = n;
    if (n_normal > 0) sizes.normal = n_normal;
    auto pools = synthgen::generate_pools(cfg.baseline, cfg.profiles, sizes, c.seed);
    write_pools(pools, c.out);
    out << "wrote " << pools.attacks.size() + 1 << " pools to " << c.out << "\n";
    return kExitOk;
  }
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "--n is required for a single profile");
  telemetry::Dataset ds;
  if (profile == "normal" || profile == "NORMAL") {
    ds = synthgen::generate_normal(cfg.baseline, n, c.seed);
  } else {
    auto type = telemetry::parse_attack_type(profile);
    if (!type) throw Error(ErrorCode::kInvalidArgument, "unknown profile: " + profile);
    ds = synthgen::generate_attack(cfg.baseline, synthgen::find_profile(cfg.profiles, *type), n, c.seed);
  }
  telemetry::write_csv(ds, c.out);
  out << "wrote " << ds.size() << " rows to " << c.out << "\n";
  return kExitOk;
}

// ---- train ----

int cmd_train(const Common& c, const std::string& data_dir, const std::string& attack_set,
              const std::string& kind, const std::optional<std::string>& features, std::ostream& out) {
  const PipelineConfig cfg = load_config(config_path(c));
  const auto pools = read_pools(data_dir);
  auto [train, test] = split_for(pools, attack_set, cfg.experiment.test_fraction, c.seed);
  if (features) {
    const auto fs = selection::feature_set_from_json(read_json(*features));
    train = selection::project_dataset(train, fs);
    test = selection::project_dataset(test, fs);
  }
  const auto model = models::fit(cfg.model(parse_kind(kind)), train, derive_seed(c.seed, seed_salt::kFit));
  write_json_atomic(c.out, models::to_json(model));
  const auto m = metrics::trial_metrics(metrics::confusion(test.binary_labels(), model.predict(test.features())));
  out << "trained " << kind << " on " << train.size() << " rows; holdout BAC " << m.bac
      << (model.converged() ? "" : " (solver hit its iteration cap)") << "\n";
  return kExitOk;
}

// ---- eval ----

int cmd_eval(const Common& c, const std::string& data_dir, const std::string& attack_sets,
             const std::string& kinds, const std::optional<std::string>& features, std::ostream& out) {
  const PipelineConfig cfg = load_config(config_path(c));
  const auto pools = read_pools(data_dir);
  std::optional<selection::FeatureSet> fs;
  if (features) fs = selection::feature_set_from_json(read_json(*features));
  json cells = json::array();
  for (const auto& set : parse_attack_sets(attack_sets, pools)) {
    telemetry::Dataset normal = pools.normal;
    telemetry::Dataset attacks = pools.attack_pool(set);
    if (fs) {
      normal = selection::project_dataset(normal, *fs);
      attacks = selection::project_dataset(attacks, *fs);
    }
    for (auto kind : parse_kinds(kinds)) {
      metrics::TrialExperiment ex{normal, attacks, cfg.model(kind), cfg.experiment.test_fraction,
                                  c.trials, c.jobs};
      const auto report = metrics::run_trials(ex, c.seed);
      cells.push_back({{"attack_set", set},
                       {"classifier", std::string(models::model_kind_name(kind))},
                       {"feature_set", fs ? "selected" : "full"},
                       {"features", normal.schema().names()},
                       {"metrics", metrics::to_json(report)}});
      out << set << " " << models::model_kind_name(kind) << (fs ? " selected" : " full")
          << ": BAC " << report.bac.mean << " F1 " << report.f1.mean << " G-Mean "
          << report.g_mean.mean << "\n";
    }
  }
  write_json_atomic(c.out, {{"format_version", kFormatVersion},
                            {"kind", "evaluation"},
                            {"base_seed", c.seed},
                            {"n_trials", c.trials},
                            {"cells", cells}});
  return kExitOk;
}

// ---- explain ----

int cmd_explain(const Common& c, const std::string& model_path, const std::string& data_dir,
                const std::string& attack_set, std::size_t background, std::size_t samples,
                int coalitions, std::ostream& out) {
  const PipelineConfig cfg = load_config(config_path(c));
  const auto model = models::model_from_json(read_json(model_path));
  const auto pools = read_pools(data_dir);
  auto [train, test] = split_for(pools, attack_set, cfg.experiment.test_fraction, c.seed);
  if (!(train.schema() == model.schema())) {
    selection::FeatureSet fs = selection::FeatureSet::from_names(model.schema().names());
    train = selection::project_dataset(train, fs);
    test = selection::project_dataset(test, fs);
    if (!(train.schema() == model.schema())) {
      // Projection sorts alphabetically; the model keeps its own column order.
      throw Error(ErrorCode::kSchemaMismatch, "model columns are not in feature-set order");
    }
  }
  const auto bg = explain::sample_background(train, background, c.seed);
  const auto rows = resilience::explanation_rows(test, samples, c.seed);
  explain::ExplainOptions opt;
  opt.kernel.n_coalitions = coalitions;
  opt.kernel.seed = c.seed;
  opt.jobs = c.jobs;
  const auto expl = explain::explain_model(model, bg, rows, opt);
  const std::string classifier(models::model_kind_name(model.kind()));

  json doc = explain::to_json(expl);
  doc["attack_set"] = attack_set;
  doc["classifier"] = classifier;
  write_json_atomic(c.out, doc);

  json ranking = explain::ranking_to_json(explain::rank_features(expl));
  ranking["attack_set"] = attack_set;
  ranking["classifier"] = classifier;
  write_json_atomic(sibling(c.out, ".ranking.json"), ranking);

  const auto plot = explain::decision_plot_data(expl, expl.outputs);
  write_file_atomic(sibling(c.out, ".decision.csv"), explain::decision_plot_csv(plot));
  write_file_atomic(sibling(c.out, ".decision.svg"),
                    explain::decision_plot_svg(plot, attack_set + " / " + classifier));
  out << "explained " << expl.num_samples() << " samples (" << explain::method_name(expl.method)
      << "), base value " << expl.base_value << ", max residual " << expl.max_residual() << "\n";
  return kExitOk;
}

// ---- select ----

int cmd_select(const Common& c, int k, const std::string& rankings_dir,
               const std::optional<std::string>& kind, std::ostream& out) {
  selection::SelectionPolicy policy;
  policy.k_per_attack = k;
  if (kind) policy.classifier = parse_kind(*kind);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(rankings_dir)) {
    const auto name = entry.path().filename().string();
    if (name.size() > 13 && name.ends_with(".ranking.json")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const json doc = read_json(f);
    if (kind && doc.value("classifier", *kind) != *kind) continue;
    std::string set = doc.value("attack_set", f.filename().string());
    if (set == synthgen::kAggregatedName) continue;
    std::vector<std::string> names;
    for (const auto& r : explain::ranking_from_json(doc)) names.push_back(r.name);
    if (policy.rankings.count(set)) {
      throw Error(ErrorCode::kInvalidArgument, "two rankings for " + set + "; pass --model");
    }
    policy.rankings[set] = std::move(names);
  }
  const auto fs = selection::select_features(policy);
  write_json_atomic(c.out, selection::to_json(fs));
  out << "selected " << fs.size() << " features from " << policy.rankings.size() << " rankings\n";
  return kExitOk;
}

// ---- noise ----

int cmd_noise(const Common& c, const std::string& data_dir, const std::string& kinds,
              std::ostream& out) {
  const PipelineConfig cfg = load_config(config_path(c));
  const auto pools = read_pools(data_dir);
  resilience::ResilienceConfig rc = cfg.experiment;
  rc.classifiers.clear();
  for (auto kind : parse_kinds(kinds)) rc.classifiers.push_back(cfg.model(kind));
  rc.n_trials = c.trials;
  rc.base_seed = c.seed;
  rc.jobs = c.jobs;
  const auto report = resilience::run_resilience_experiment(pools, rc);
  write_json_atomic(c.out, resilience::to_json(report));
  write_file_atomic(sibling(c.out, ".csv"), resilience::resilience_csv(report));
  const auto d = resilience::average_drop(report, resilience::Metric::kBac);
  out << "overall BAC drop: full " << d.full << "%, selected " << d.selected << "%\n";
  return kExitOk;
}

// ---- report ----

int cmd_report(const Common& c, const std::string& in_dir, std::ostream& out) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(in_dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<json> docs;
  for (const auto& f : files) {
    json doc = read_json(f);
    const std::string kind = doc.value("kind", "");
    if (kind == "evaluation" || kind == "resilience") docs.push_back(std::move(doc));
  }
  if (docs.empty()) throw Error(ErrorCode::kInvalidArgument, "no evaluation or resilience reports in " + in_dir);
  const auto tables = build_report(docs);
  if (c.out.empty()) {
    out << tables.markdown;
    return kExitOk;
  }
  write_file_atomic(c.out, tables.markdown);
  write_file_atomic(sibling(c.out, ".csv"), tables.csv);
  out << "wrote report from " << docs.size() << " files to " << c.out << "\n";
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optical performance monitoring attack detection pipeline", "opms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "opms 0.1.0");

  Common c;

  auto* gen = app.add_subcommand("gen", "Generate synthetic telemetry CSV");
  std::string profile;
  std::size_t n = 0;
  std::size_t n_normal = 0;
  gen->add_option("--profile", profile, "normal, an attack type such as INBSTR, or all")->required();
  gen->add_option("--n", n, "Rows (per attack type with --profile all)");
  gen->add_option("--n-normal", n_normal, "Normal rows with --profile all");
  add_common(gen, c, false);

  std::string data_dir;
  std::string attack_set = "aggregated";
  std::string kind = "mlp";
  std::optional<std::string> features;

  auto* train = app.add_subcommand("train", "Fit one detector on the seed's training split");
  train->add_option("--data-dir", data_dir, "Pool directory written by gen --profile all")->required();
  train->add_option("--attack-set", attack_set, "Attack type or aggregated");
  train->add_option("--model", kind, "mlp, xgb or svm");
  train->add_option("--features", features, "Feature set JSON");
  add_common(train, c, false);

  auto* eval = app.add_subcommand("eval", "Repeated-trial evaluation");
  std::string attack_sets = "all";
  std::string kinds = "all";
  eval->add_option("--data-dir", data_dir, "Pool directory")->required();
  eval->add_option("--attack-set", attack_sets, "Comma list or all");
  eval->add_option("--model", kinds, "Comma list or all");
  eval->add_option("--features", features, "Feature set JSON");
  add_common(eval, c, true);

  auto* explain = app.add_subcommand("explain", "SHAP explanation, ranking and decision plot");
  std::string model_path;
  std::size_t background = 100;
  std::size_t samples = 40;
  int coalitions = 2048;
  explain->add_option("--model", model_path, "Model JSON")->required();
  explain->add_option("--data-dir", data_dir, "Pool directory")->required();
  explain->add_option("--attack-set", attack_set, "Attack set the model was trained on");
  explain->add_option("--background", background, "Background rows")->check(CLI::PositiveNumber);
  explain->add_option("--samples", samples, "Explained test rows")->check(CLI::PositiveNumber);
  explain->add_option("--coalitions", coalitions, "Kernel SHAP coalitions (sampled mode)")
      ->check(CLI::Range(2, 1 << 20));
  add_common(explain, c, false);

  auto* select = app.add_subcommand("select", "Feature set from per-attack rankings");
  int k = 2;
  std::string rankings_dir;
  std::optional<std::string> select_kind;
  select->add_option("--k", k, "Features per attack type")->check(CLI::Range(1, 3));
  select->add_option("--rankings", rankings_dir, "Directory of *.ranking.json")->required();
  select->add_option("--model", select_kind, "Use rankings of this classifier only");
  add_common(select, c, false);

  auto* noise = app.add_subcommand("noise", "Parameter-noising resilience experiment");
  noise->add_option("--data-dir", data_dir, "Pool directory")->required();
  noise->add_option("--model", kinds, "Comma list or all");
  add_common(noise, c, true);

  auto* report = app.add_subcommand("report", "Markdown and CSV tables from run artifacts");
  std::string in_dir;
  report->add_option("--in", in_dir, "Directory of evaluation/resilience JSON")->required();
  add_common(report, c, false, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsageError;
  }

  try {
    if (gen->parsed()) return cmd_gen(c, profile, n, n_normal, out);
    if (train->parsed()) return cmd_train(c, data_dir, attack_set, kind, features, out);
    if (eval->parsed()) return cmd_eval(c, data_dir, attack_sets, kinds, features, out);
    if (explain->parsed()) {
      return cmd_explain(c, model_path, data_dir, attack_set, background, samples, coalitions, out);
    }
    if (select->parsed()) return cmd_select(c, k, rankings_dir, select_kind, out);
    if (noise->parsed()) return cmd_noise(c, data_dir, kinds, out);
    if (report->parsed()) return cmd_report(c, in_dir, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const fs::filesystem_error& e) {
    err << "error: IoError: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitUsageError;
}

}  // namespace opms::cli
