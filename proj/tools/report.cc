#include "report.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <tuple>

#include "opms/error.h"
#include "opms/metrics/metrics.h"
#include "opms/models/config.h"
#include "opms/resilience/experiment.h"
#include "opms/telemetry/schema.h"

namespace opms::cli {

namespace {

using nlohmann::json;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string mean_std(const metrics::MetricSummary& s) {
  return fmt("%.4f", s.mean) + " ± " + fmt("%.4f", s.std);
}

struct DetectionRow {
  std::optional<metrics::MetricReport> full;
  std::optional<metrics::MetricReport> selected;
};

using RowKey = std::pair<std::string, std::string>;  // attack set, classifier

void add_csv(std::string& csv, const std::string& table, const std::string& row,
             const std::string& classifier, const std::string& arm, const std::string& metric,
             double value) {
  csv += table + "," + row + "," + classifier + "," + arm + "," + metric + "," + fmt("%.17g", value) + "\n";
}

const metrics::MetricSummary& pick(const metrics::MetricReport& r, int i) {
  return i == 0 ? r.bac : i == 1 ? r.f1 : r.g_mean;
}

constexpr const char* kMetricNames[] = {"bac", "f1", "g_mean"};

}  // namespace

ReportTables build_report(const std::vector<json>& docs) {
  std::vector<RowKey> order;
  std::map<RowKey, DetectionRow> rows;
  std::optional<resilience::ResilienceReport> res;

  auto row_for = [&](const RowKey& key) -> DetectionRow& {
    auto [it, inserted] = rows.try_emplace(key);
    if (inserted) order.push_back(key);
    return it->second;
  };

  for (const auto& doc : docs) {
    const std::string kind = doc.value("kind", "");
    if (kind == "evaluation") {
      try {
        for (const auto& c : doc.at("cells")) {
          auto& row = row_for({c.at("attack_set").get<std::string>(), c.at("classifier").get<std::string>()});
          auto& slot = c.at("feature_set").get<std::string>() == "selected" ? row.selected : row.full;
          if (!slot) slot = metrics::metric_report_from_json(c.at("metrics"));
        }
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kFormatError, std::string("evaluation report: ") + e.what());
      }
    } else if (kind == "resilience" && !res) {
      res = resilience::resilience_report_from_json(doc);
    }
  }
  if (res) {
    for (const auto& c : res->cells) {
      auto& row = row_for({c.attack_set, std::string(models::model_kind_name(c.classifier))});
      if (!row.full) row.full = c.full.clean;
      if (!row.selected) row.selected = c.selected.clean;
    }
  }

  ReportTables t;
  t.csv = "table,row,classifier,arm,metric,value\n";
  auto& md = t.markdown;
  md += "# Detection and resilience report\n\n";

  md += "## Detection performance\n\n";
  md += "Mean ± std over trials. Orig. uses all features, FS the selected set.\n\n";
  md += "| Attack set | Classifier | BAC Orig. | BAC FS | F1 Orig. | F1 FS | G-Mean Orig. | G-Mean FS |\n";
  md += "|---|---|---|---|---|---|---|---|\n";
  for (const auto& key : order) {
    const auto& row = rows.at(key);
    md += "| " + key.first + " | " + key.second + " |";
    for (int i = 0; i < 3; ++i) {
      md += " " + (row.full ? mean_std(pick(*row.full, i)) : std::string("-")) + " |";
      md += " " + (row.selected ? mean_std(pick(*row.selected, i)) : std::string("-")) + " |";
      if (row.full) add_csv(t.csv, "detection", key.first, key.second, "full", kMetricNames[i], pick(*row.full, i).mean);
      if (row.selected) {
        add_csv(t.csv, "detection", key.first, key.second, "selected", kMetricNames[i], pick(*row.selected, i).mean);
      }
    }
    md += "\n";
  }

  if (!res) return t;

  md += "\n## Performance drop under parameter noising\n\n";
  md += "Percent drop from clean to noised test data, averaged over the matching cells. ";
  md += "Trials: " + std::to_string(res->n_trials) + ".\n\n";
  md += "| Scope | BAC Orig. | BAC FS | F1 Orig. | F1 FS | G-Mean Orig. | G-Mean FS |\n";
  md += "|---|---|---|---|---|---|---|\n";

  std::vector<std::string> attacks;
  std::vector<models::ModelKind> kinds;
  for (const auto& c : res->cells) {
    if (std::find(attacks.begin(), attacks.end(), c.attack_set) == attacks.end()) attacks.push_back(c.attack_set);
    if (std::find(kinds.begin(), kinds.end(), c.classifier) == kinds.end()) kinds.push_back(c.classifier);
  }
  auto drop_row = [&](const std::string& label, std::string_view attack,
                      std::optional<models::ModelKind> kind, bool control) {
    md += "| " + label + " |";
    for (int i = 0; i < 3; ++i) {
      const auto d = resilience::average_drop(*res, static_cast<resilience::Metric>(i), attack, kind, control);
      md += " " + fmt("%.2f", d.full) + " | " + fmt("%.2f", d.selected) + " |";
      const std::string table = control ? "control_drop" : "noise_drop";
      add_csv(t.csv, table, label, "", "full", kMetricNames[i], d.full);
      add_csv(t.csv, table, label, "", "selected", kMetricNames[i], d.selected);
    }
    md += "\n";
  };
  for (const auto& a : attacks) drop_row(a, a, std::nullopt, false);
  for (auto k : kinds) drop_row(std::string(models::model_kind_name(k)), {}, k, false);
  drop_row("overall", {}, std::nullopt, false);
  drop_row("overall (control group)", {}, std::nullopt, true);

  md += "\n## Selected feature sets\n\n";
  for (const auto& [kind, fs] : res->feature_sets) {
    md += "- " + std::string(models::model_kind_name(kind)) + ": ";
    for (std::size_t i = 0; i < fs.names().size(); ++i) md += (i ? ", " : "") + fs.names()[i];
    md += "\n";
  }

  md += "\n## Noised groups\n\n";
  md += "| Attack set | Classifier | Noised | Control |\n|---|---|---|---|\n";
  for (const auto& c : res->cells) {
    md += "| " + c.attack_set + " | " + std::string(models::model_kind_name(c.classifier)) + " | " +
          std::string(telemetry::base_param_name(c.noised_group)) + " | " +
          std::string(telemetry::base_param_name(c.control_group)) + " |\n";
  }
  return t;
}

}  // namespace opms::cli
