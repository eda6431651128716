#include <cmath>

#include "camext/cli.h"
#include "camext/error.h"
#include "camext/eval_metrics.h"
#include "camext/parallel.h"
#include "commands.h"
#include "dataset.h"

namespace camext::cli {

namespace {

// One requested table cell, before it is evaluated.
struct Cell {
  std::string cls;
  std::string metric;  // report name
  std::string difficulty;
  double threshold = 0.0;
};

std::vector<DetectionFrame> LoadFrames(const std::string& gt_dir,
                                       const std::string& det_dir, int jobs) {
  const std::vector<std::string> ids = ListFrameIds(gt_dir);
  std::vector<DetectionFrame> frames(ids.size());
  ParallelFor(ids.size(), jobs, [&](size_t i) {
    frames[i].frame_id = ids[i];
    frames[i].ground_truth = LoadLabels(gt_dir, ids[i], false);
    frames[i].detections = LoadLabels(det_dir, ids[i], true);
    for (ObjectLabel& d : frames[i].detections) {
      if (!d.score) d.score = 1.0;
    }
  });
  return frames;
}

std::vector<Cell> PlanCells(const EvaluateOptions& opts) {
  std::vector<Cell> cells;
  for (const std::string& cls : opts.classes) {
    for (const std::string& metric : opts.metrics) {
      if (metric == "nuscenes") {
        for (const char* name : {"ATE", "ASE", "AOE", "AOE_deg"}) {
          cells.push_back({cls, name, "all", opts.match_radius});
        }
        continue;
      }
      std::string name = metric == "ap2d"    ? "AP_2D"
                         : metric == "apbev" ? "AP_BEV"
                         : metric == "ap3d"  ? "AP_3D"
                                             : "AOS";
      for (const std::string& diff : opts.difficulties) {
        for (double thr : opts.thresholds) {
          cells.push_back({cls, name, diff, thr});
        }
      }
    }
  }
  return cells;
}

std::vector<std::optional<double>> EvaluateCells(
    const std::vector<Cell>& cells, std::span<const DetectionFrame> frames,
    int jobs) {
  std::vector<std::optional<double>> values(cells.size());
  ParallelFor(cells.size(), jobs, [&](size_t i) {
    const Cell& c = cells[i];
    if (c.metric == "ATE" || c.metric == "ASE" || c.metric == "AOE" ||
        c.metric == "AOE_deg") {
      const NuScenesErrors e = ComputeNuScenesErrors(frames, c.cls, c.threshold);
      if (c.metric == "ATE") values[i] = e.ate;
      if (c.metric == "ASE") values[i] = e.ase;
      if (c.metric == "AOE") values[i] = e.aoe;
      if (c.metric == "AOE_deg" && e.aoe) values[i] = *e.aoe / kDegree;
      return;
    }
    const DifficultyBin bin = *ParseDifficulty(c.difficulty);
    if (c.metric == "AOS") {
      values[i] = AverageOrientationSimilarity(frames, c.cls, c.threshold, bin)
                      .value;
      return;
    }
    const IouKind kind = c.metric == "AP_2D"    ? IouKind::k2D
                         : c.metric == "AP_BEV" ? IouKind::kBev
                                                : IouKind::k3D;
    values[i] = AveragePrecision40(frames, c.cls, kind, c.threshold, bin).value;
  });
  return values;
}

}  // namespace

int RunEvaluate(const EvaluateOptions& opts, std::ostream& out,
                std::ostream& /*err*/) {
  if (opts.classes.empty() || opts.metrics.empty() ||
      opts.thresholds.empty() || opts.difficulties.empty()) {
    throw UsageError("classes, metrics, thresholds and difficulties must be non-empty");
  }
  RequireDirectory(opts.gt_dir, "ground-truth");
  RequireDirectory(opts.det_dir, "detection");
  if (!opts.disturbed_dir.empty()) {
    RequireDirectory(opts.disturbed_dir, "disturbed detection");
  }

  const std::vector<Cell> cells = PlanCells(opts);
  const std::vector<DetectionFrame> frames =
      LoadFrames(opts.gt_dir, opts.det_dir, opts.jobs);
  const auto values = EvaluateCells(cells, frames, opts.jobs);

  std::vector<MetricRow> rows;
  auto add_rows = [&](const std::string& set,
                      const std::vector<std::optional<double>>& v) {
    for (size_t i = 0; i < cells.size(); ++i) {
      rows.push_back({set, cells[i].cls, cells[i].metric, cells[i].difficulty,
                      cells[i].threshold, v[i]});
    }
  };

  if (opts.disturbed_dir.empty()) {
    add_rows("", values);
  } else {
    const std::vector<DetectionFrame> disturbed =
        LoadFrames(opts.gt_dir, opts.disturbed_dir, opts.jobs);
    const auto disturbed_values = EvaluateCells(cells, disturbed, opts.jobs);
    std::vector<std::optional<double>> decrease(cells.size());
    for (size_t i = 0; i < cells.size(); ++i) {
      if (values[i] && disturbed_values[i]) {
        decrease[i] = *values[i] - *disturbed_values[i];
      }
    }
    add_rows("original", values);
    add_rows("disturbed", disturbed_values);
    add_rows("decrease", decrease);
  }
  EmitReport(opts.output, RenderRows(rows, opts.format), out);
  return kExitOk;
}

}  // namespace camext::cli
