#include "report.h"

#include <cstdio>

#include <nlohmann/json.hpp>

namespace camext::cli {

std::string FormatNumber(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string RenderRows(const std::vector<MetricRow>& rows,
                       ReportFormat format) {
  const bool with_set = !rows.empty() && !rows.front().set.empty();
  if (format == ReportFormat::kCsv) {
    std::string out = with_set ? "set," : "";
    out += "class,metric,difficulty,threshold,value\n";
    for (const MetricRow& r : rows) {
      if (with_set) out += r.set + ",";
      out += r.cls + "," + r.metric + "," + r.difficulty + "," +
             FormatNumber(r.threshold) + "," +
             (r.value ? FormatNumber(*r.value) : std::string("n/a")) + "\n";
    }
    return out;
  }
  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const MetricRow& r : rows) {
    nlohmann::ordered_json row;
    if (with_set) row["set"] = r.set;
    row["class"] = r.cls;
    row["metric"] = r.metric;
    row["difficulty"] = r.difficulty;
    row["threshold"] = r.threshold;
    if (r.value) {
      row["value"] = *r.value;
      row["status"] = "ok";
    } else {
      row["value"] = nullptr;
      row["status"] = "n/a";
    }
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

}  // namespace camext::cli
