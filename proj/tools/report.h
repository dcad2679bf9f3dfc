#ifndef OPMS_TOOLS_REPORT_H_
#define OPMS_TOOLS_REPORT_H_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace opms::cli {

struct ReportTables {
  std::string markdown;
  std::string csv;
};

// Detection table (full vs selected features) and noising table from
// "evaluation" and "resilience" artifacts. Evaluation cells take precedence
// over the clean metrics of a resilience report. Output depends only on the
// documents and their order.
ReportTables build_report(const std::vector<nlohmann::json>& docs);

}  // namespace opms::cli

#endif  // OPMS_TOOLS_REPORT_H_
