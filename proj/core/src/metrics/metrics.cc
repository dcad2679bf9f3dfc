#include "opms/metrics/metrics.h"

#include <cmath>
#include <numeric>

#include "opms/error.h"
#include "opms/models/trained_model.h"
#include "opms/parallel.h"
#include "opms/random.h"
#include "opms/telemetry/assembly.h"

namespace opms::metrics {

ConfusionCounts confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw Error(ErrorCode::kLengthMismatch,
                "y_true has " + std::to_string(y_true.size()) + " entries, y_pred has " +
                    std::to_string(y_pred.size()));
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1)) {
      throw Error(ErrorCode::kNonBinaryLabel, "labels must be 0 or 1");
    }
    if (t == 1) {
      (p == 1 ? c.tp : c.fn) += 1;
    } else {
      (p == 1 ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

TrialMetrics trial_metrics(const ConfusionCounts& c) {
  if (c.tp + c.fn == 0 || c.tn + c.fp == 0) {
    throw Error(ErrorCode::kEmptyClass, "both classes must be present in y_true");
  }
  const double tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  const double tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  TrialMetrics m;
  m.bac = 0.5 * (tpr + tnr);
  m.f1 = 2.0 * static_cast<double>(c.tp) / static_cast<double>(2 * c.tp + c.fp + c.fn);
  m.g_mean = std::sqrt(tpr * tnr);
  return m;
}

MetricSummary MetricSummary::from_values(std::vector<double> values) {
  MetricSummary s;
  s.trials = std::move(values);
  const auto n = static_cast<double>(s.trials.size());
  if (s.trials.empty()) return s;
  s.mean = std::accumulate(s.trials.begin(), s.trials.end(), 0.0) / n;
  if (s.trials.size() > 1) {
    double ss = 0.0;
    for (double v : s.trials) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

MetricReport MetricReport::from_trials(std::span<const TrialMetrics> trials) {
  std::vector<double> bac, f1, g;
  for (const auto& t : trials) {
    bac.push_back(t.bac);
    f1.push_back(t.f1);
    g.push_back(t.g_mean);
  }
  return {MetricSummary::from_values(std::move(bac)), MetricSummary::from_values(std::move(f1)),
          MetricSummary::from_values(std::move(g))};
}

MetricReport compute_metrics(const ConfusionCounts& c) {
  const TrialMetrics m = trial_metrics(c);
  return MetricReport::from_trials(std::span(&m, 1));
}

TrialMetrics run_trial(const TrialExperiment& ex, std::uint64_t trial_seed) {
  auto ds = telemetry::assemble_imbalanced(ex.normal, ex.attacks,
                                           derive_seed(trial_seed, seed_salt::kAssembly));
  auto [train, test] = telemetry::stratified_split(ds, ex.test_fraction,
                                                   derive_seed(trial_seed, seed_salt::kSplit));
  auto model = models::fit(ex.model, train, derive_seed(trial_seed, seed_salt::kFit));
  auto pred = model.predict(test.features());
  return trial_metrics(confusion(test.binary_labels(), pred));
}

MetricReport run_trials(const TrialExperiment& ex, std::uint64_t base_seed) {
  if (ex.n_trials < 1) throw Error(ErrorCode::kInvalidArgument, "n_trials must be >= 1");
  std::vector<TrialMetrics> trials(static_cast<std::size_t>(ex.n_trials));
  parallel_for(trials.size(), ex.jobs, [&](std::size_t t) {
    trials[t] = run_trial(ex, base_seed + t);
  });
  return MetricReport::from_trials(trials);
}

nlohmann::json to_json(const MetricSummary& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"trials", s.trials}};
}

nlohmann::json to_json(const MetricReport& r) {
  return {{"bac", to_json(r.bac)}, {"f1", to_json(r.f1)}, {"g_mean", to_json(r.g_mean)}};
}

MetricReport metric_report_from_json(const nlohmann::json& doc) {
  try {
    auto summary = [&](const char* key) {
      return MetricSummary::from_values(doc.at(key).at("trials").get<std::vector<double>>());
    };
    return {summary("bac"), summary("f1"), summary("g_mean")};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("metric report: ") + e.what());
  }
}

}  // namespace opms::metrics
