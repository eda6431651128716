#ifndef CAMEXT_CLI_REPORT_H_
#define CAMEXT_CLI_REPORT_H_

#include <optional>
#include <string>
#include <vector>

namespace camext::cli {

enum class ReportFormat { kJson, kCsv };

// One cell of a metric table, keyed like the benchmark tables:
// (class, metric, difficulty, threshold). `set` is empty for single-run
// reports and one of original / disturbed / decrease otherwise.
struct MetricRow {
  std::string set;
  std::string cls;
  std::string metric;
  std::string difficulty;
  double threshold = 0.0;
  std::optional<double> value;  // nullopt renders as n/a / null
};

std::string RenderRows(const std::vector<MetricRow>& rows, ReportFormat format);

// Fixed six-decimal rendering used in CSV and text summaries.
std::string FormatNumber(double v);

}  // namespace camext::cli

#endif  // CAMEXT_CLI_REPORT_H_
