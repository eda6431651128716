#ifndef CAMEXT_EVAL_METRICS_H_
#define CAMEXT_EVAL_METRICS_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "camext/geometry.h"
#include "camext/kitti_io.h"

namespace camext {

enum class IouKind { k2D, kBev, k3D };

const char* IouKindName(IouKind kind);
std::optional<IouKind> ParseIouKind(std::string_view name);

double Iou2D(const BBox2D& a, const BBox2D& b);

// Ground footprint of a box as a counter-clockwise polygon in (x, z).
std::array<Eigen::Vector2d, 4> BevFootprint(const Box3D& b);

// Area of the intersection of two convex polygons, both counter-clockwise
// (Sutherland-Hodgman clipping followed by the shoelace formula).
double ConvexIntersectionArea(std::span<const Eigen::Vector2d> subject,
                              std::span<const Eigen::Vector2d> clip);

// Rotated-rectangle IoU of the ground footprints. Throws kDegenerateBox when
// either footprint has area below 1e-12.
double IouBev(const Box3D& a, const Box3D& b);

// Footprint intersection times vertical overlap, where each box spans
// [y - h, y]. Throws kDegenerateBox on vanishing volume.
double Iou3D(const Box3D& a, const Box3D& b);

struct DetectionFrame {
  std::string frame_id;
  std::vector<ObjectLabel> ground_truth;
  std::vector<ObjectLabel> detections;
  std::optional<CameraIntrinsics> intrinsics;
};

struct MatchPair {
  int gt = 0;
  int det = 0;
  double iou = 0.0;
};

// Indices refer to DetectionFrame::ground_truth / detections. Detections
// of other classes appear in none of the lists.
struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<int> unmatched_gt;   // in-bin ground truth left unclaimed
  std::vector<int> unmatched_det;  // false positives
  std::vector<int> ignored_det;    // neither TP nor FP
};

// A ground truth counts toward `bin` when DifficultyOf(gt) <= bin, so
// Moderate includes Easy and Hard includes both (benchmark convention).
bool InDifficultyBin(const ObjectLabel& gt, DifficultyBin bin);

// Greedy matching in descending score order (ties keep input order). A
// detection claims the unclaimed in-bin ground truth of its class with the
// highest IoU >= threshold. Failing that, a detection that reaches an
// out-of-bin ground truth, or that lies at least half inside a DontCare
// region, is ignored. Only detections with score >= min_score take part.
MatchResult MatchFrame(const DetectionFrame& frame, std::string_view cls,
                       IouKind kind, double threshold, DifficultyBin bin,
                       double min_score = -1e300);

inline constexpr int kRecallPoints = 40;

struct PRCurve {
  std::array<double, kRecallPoints> recall{};     // k / 40, k = 1..40
  std::array<double, kRecallPoints> precision{};  // interpolated
};

// Percentages in [0, 100]; nullopt when the class/bin has no ground truth.
struct ApResult {
  std::optional<double> value;
  PRCurve curve;
  int num_gt = 0;
};

ApResult AveragePrecision40(std::span<const DetectionFrame> frames,
                            std::string_view cls, IouKind kind,
                            double threshold, DifficultyBin bin);

// AP40 sweep over 2D matches where each TP contributes
// (1 + cos(alpha_det - alpha_gt)) / 2 instead of 1.
ApResult AverageOrientationSimilarity(std::span<const DetectionFrame> frames,
                                      std::string_view cls, double threshold,
                                      DifficultyBin bin);

// Score-sorted operating points of a detector: after each distinct score,
// the cumulative TP count, FP count and orientation-similarity sum.
struct OperatingPoint {
  double score = 0.0;
  int tp = 0;
  int fp = 0;
  double similarity = 0.0;
};

// Max precision at recall >= k/40 for each k, averaged, times 100.
// `orientation` selects similarity-weighted precision (AOS).
ApResult InterpolateAp40(std::span<const OperatingPoint> points, int num_gt,
                         bool orientation);

struct NuScenesErrors {
  std::optional<double> ate;  // meters
  std::optional<double> ase;  // 1 - aligned IoU
  std::optional<double> aoe;  // radians
  int matches = 0;
};

// Greedy score-ordered matching on ground-plane center distance.
NuScenesErrors ComputeNuScenesErrors(std::span<const DetectionFrame> frames,
                                     std::string_view cls,
                                     double match_radius = 2.0);

// IoU of two boxes after aligning their centers and yaw.
double AlignedIou(const Box3D& a, const Box3D& b);

}  // namespace camext

#endif  // CAMEXT_EVAL_METRICS_H_
