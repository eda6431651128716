#include "camext/eval_metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "camext/error.h"

namespace camext {

namespace {

double ScoreOf(const ObjectLabel& det) {
  if (!det.score || !std::isfinite(*det.score)) {
    throw Error(ErrorCode::kInvalidArgument,
                "detection of type " + det.type + " has no finite score");
  }
  return *det.score;
}

double PairIou(const ObjectLabel& gt, const ObjectLabel& det, IouKind kind) {
  switch (kind) {
    case IouKind::k2D: return Iou2D(gt.bbox, det.bbox);
    case IouKind::kBev: return IouBev(gt.box(), det.box());
    case IouKind::k3D: return Iou3D(gt.box(), det.box());
  }
  return 0.0;
}

// Detection indices of `cls` with score >= min_score, best score first.
std::vector<int> RankedDetections(const DetectionFrame& frame,
                                  std::string_view cls, double min_score) {
  std::vector<int> order;
  for (size_t i = 0; i < frame.detections.size(); ++i) {
    const ObjectLabel& det = frame.detections[i];
    if (det.type == cls && ScoreOf(det) >= min_score) {
      order.push_back(static_cast<int>(i));
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return *frame.detections[a].score > *frame.detections[b].score;
  });
  return order;
}

double OrientationSimilarity(const ObjectLabel& gt, const ObjectLabel& det) {
  return (1.0 + std::cos(det.alpha - gt.alpha)) / 2.0;
}

struct ScoredDetection {
  double score;
  bool tp;
  double similarity;
};

int CountGroundTruth(const DetectionFrame& frame, std::string_view cls,
                     DifficultyBin bin) {
  int n = 0;
  for (const ObjectLabel& gt : frame.ground_truth) {
    if (gt.type == cls && InDifficultyBin(gt, bin)) ++n;
  }
  return n;
}

ApResult SweepFrames(std::span<const DetectionFrame> frames,
                     std::string_view cls, IouKind kind, double threshold,
                     DifficultyBin bin, bool orientation) {
  std::vector<ScoredDetection> scored;
  int num_gt = 0;
  for (const DetectionFrame& frame : frames) {
    num_gt += CountGroundTruth(frame, cls, bin);
    const MatchResult m = MatchFrame(frame, cls, kind, threshold, bin);
    for (const MatchPair& p : m.pairs) {
      scored.push_back({*frame.detections[p.det].score, true,
                        OrientationSimilarity(frame.ground_truth[p.gt],
                                              frame.detections[p.det])});
    }
    for (int d : m.unmatched_det) {
      scored.push_back({*frame.detections[d].score, false, 0.0});
    }
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredDetection& a, const ScoredDetection& b) {
                     return a.score > b.score;
                   });
  std::vector<OperatingPoint> points;
  OperatingPoint running;
  for (size_t i = 0; i < scored.size(); ++i) {
    if (scored[i].tp) {
      ++running.tp;
      running.similarity += scored[i].similarity;
    } else {
      ++running.fp;
    }
    running.score = scored[i].score;
    if (i + 1 == scored.size() || scored[i + 1].score != scored[i].score) {
      points.push_back(running);
    }
  }
  return InterpolateAp40(points, num_gt, orientation);
}

}  // namespace

const char* IouKindName(IouKind kind) {
  switch (kind) {
    case IouKind::k2D: return "2d";
    case IouKind::kBev: return "bev";
    case IouKind::k3D: return "3d";
  }
  return "2d";
}

std::optional<IouKind> ParseIouKind(std::string_view name) {
  for (IouKind k : {IouKind::k2D, IouKind::kBev, IouKind::k3D}) {
    if (name == IouKindName(k)) return k;
  }
  return std::nullopt;
}

bool InDifficultyBin(const ObjectLabel& gt, DifficultyBin bin) {
  if (gt.IsDontCare() || bin == DifficultyBin::kIgnored) return false;
  return static_cast<int>(DifficultyOf(gt)) <= static_cast<int>(bin);
}

MatchResult MatchFrame(const DetectionFrame& frame, std::string_view cls,
                       IouKind kind, double threshold, DifficultyBin bin,
                       double min_score) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "IoU threshold must be in (0, 1]");
  }
  const auto& gts = frame.ground_truth;
  const auto& dets = frame.detections;
  std::vector<char> in_bin(gts.size()), claimed(gts.size(), 0);
  for (size_t g = 0; g < gts.size(); ++g) in_bin[g] = InDifficultyBin(gts[g], bin);

  MatchResult result;
  for (int d : RankedDetections(frame, cls, min_score)) {
    int best_valid = -1, best_other = -1;
    double iou_valid = threshold, iou_other = threshold;
    for (size_t g = 0; g < gts.size(); ++g) {
      if (claimed[g] || gts[g].type != cls) continue;
      const double iou = PairIou(gts[g], dets[d], kind);
      if (in_bin[g]) {
        if (iou >= iou_valid && (best_valid < 0 || iou > iou_valid)) {
          best_valid = static_cast<int>(g);
          iou_valid = iou;
        }
      } else if (iou >= iou_other && (best_other < 0 || iou > iou_other)) {
        best_other = static_cast<int>(g);
        iou_other = iou;
      }
    }
    if (best_valid >= 0) {
      claimed[best_valid] = 1;
      result.pairs.push_back({best_valid, d, iou_valid});
      continue;
    }
    if (best_other >= 0) {
      claimed[best_other] = 1;
      result.ignored_det.push_back(d);
      continue;
    }
    bool in_dont_care = false;
    for (const ObjectLabel& gt : gts) {
      if (!gt.IsDontCare()) continue;
      const BBox2D& b = dets[d].bbox;
      const double iw = std::min(b.right, gt.bbox.right) -
                        std::max(b.left, gt.bbox.left);
      const double ih = std::min(b.bottom, gt.bbox.bottom) -
                        std::max(b.top, gt.bbox.top);
      if (iw > 0.0 && ih > 0.0 && iw * ih >= 0.5 * b.Area()) {
        in_dont_care = true;
        break;
      }
    }
    if (in_dont_care) {
      result.ignored_det.push_back(d);
    } else {
      result.unmatched_det.push_back(d);
    }
  }
  for (size_t g = 0; g < gts.size(); ++g) {
    if (in_bin[g] && !claimed[g] && gts[g].type == cls) {
      result.unmatched_gt.push_back(static_cast<int>(g));
    }
  }
  return result;
}

ApResult InterpolateAp40(std::span<const OperatingPoint> points, int num_gt,
                         bool orientation) {
  ApResult result;
  result.num_gt = num_gt;
  for (int k = 1; k <= kRecallPoints; ++k) {
    result.curve.recall[k - 1] = static_cast<double>(k) / kRecallPoints;
  }
  if (num_gt <= 0) return result;
  double sum = 0.0;
  for (int k = 1; k <= kRecallPoints; ++k) {
    double best = 0.0;
    for (const OperatingPoint& p : points) {
      // recall tp / num_gt >= k / 40, compared exactly in integers.
      if (static_cast<long>(p.tp) * kRecallPoints <
          static_cast<long>(k) * num_gt) {
        continue;
      }
      const double hits = orientation ? p.similarity : p.tp;
      best = std::max(best, hits / (p.tp + p.fp));
    }
    result.curve.precision[k - 1] = best;
    sum += best;
  }
  result.value = 100.0 * sum / kRecallPoints;
  return result;
}

ApResult AveragePrecision40(std::span<const DetectionFrame> frames,
                            std::string_view cls, IouKind kind,
                            double threshold, DifficultyBin bin) {
  return SweepFrames(frames, cls, kind, threshold, bin, false);
}

ApResult AverageOrientationSimilarity(std::span<const DetectionFrame> frames,
                                      std::string_view cls, double threshold,
                                      DifficultyBin bin) {
  return SweepFrames(frames, cls, IouKind::k2D, threshold, bin, true);
}

NuScenesErrors ComputeNuScenesErrors(std::span<const DetectionFrame> frames,
                                     std::string_view cls,
                                     double match_radius) {
  if (!(match_radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "match radius must be positive");
  }
  double translation = 0.0, scale = 0.0, orientation = 0.0;
  NuScenesErrors errors;
  for (const DetectionFrame& frame : frames) {
    const auto& gts = frame.ground_truth;
    std::vector<char> claimed(gts.size(), 0);
    for (int d : RankedDetections(frame, cls, -1e300)) {
      const ObjectLabel& det = frame.detections[d];
      int best = -1;
      double best_dist = match_radius;
      for (size_t g = 0; g < gts.size(); ++g) {
        if (claimed[g] || gts[g].type != cls) continue;
        const double dist = std::hypot(gts[g].location.x - det.location.x,
                                       gts[g].location.z - det.location.z);
        if (dist <= best_dist && (best < 0 || dist < best_dist)) {
          best = static_cast<int>(g);
          best_dist = dist;
        }
      }
      if (best < 0) continue;
      claimed[best] = 1;
      ++errors.matches;
      translation += best_dist;
      scale += 1.0 - AlignedIou(gts[best].box(), det.box());
      orientation += std::abs(WrapAngle(det.rotation_y - gts[best].rotation_y));
    }
  }
  if (errors.matches > 0) {
    errors.ate = translation / errors.matches;
    errors.ase = scale / errors.matches;
    errors.aoe = orientation / errors.matches;
  }
  return errors;
}

}  // namespace camext
