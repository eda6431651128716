#ifndef CAMEXT_KITTI_IO_H_
#define CAMEXT_KITTI_IO_H_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "camext/geometry.h"

namespace camext {

struct BBox2D {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  double Width() const { return right - left; }
  double Height() const { return bottom - top; }
  double Area() const { return Width() * Height(); }
};

// One line of a KITTI object label file. Ground truth has no score;
// detections carry one.
struct ObjectLabel {
  std::string type;
  double truncated = 0.0;
  int occluded = 0;
  double alpha = 0.0;
  BBox2D bbox;
  double h = 0.0, w = 0.0, l = 0.0;
  Point3Camera location;
  double rotation_y = 0.0;
  std::optional<double> score;

  bool IsDontCare() const { return type == "DontCare"; }
  Box3D box() const { return {location, h, w, l, rotation_y}; }
  void set_box(const Box3D& b) {
    location = b.center;
    h = b.h;
    w = b.w;
    l = b.l;
    rotation_y = b.yaw;
  }
};

// Throws ParseError (kMalformedLine / kNonFiniteValue) on the first bad line.
std::vector<ObjectLabel> ParseLabelFile(std::string_view text);

// Fixed-point output, `decimals` digits after the point (KITTI uses 2).
std::string WriteLabelFile(const std::vector<ObjectLabel>& labels,
                           int decimals = 2);

struct CalibrationSet {
  std::array<std::optional<Eigen::Matrix<double, 3, 4>>, 4> projections;
  std::optional<Eigen::Matrix3d> rectification;
  std::optional<Eigen::Matrix<double, 3, 4>> velo_to_cam;
  // Any other keys, kept verbatim in file order.
  std::vector<std::pair<std::string, std::vector<double>>> extra;

  const Eigen::Matrix<double, 3, 4>& p2() const { return *projections[2]; }
  CameraIntrinsics Intrinsics() const;
};

// Requires P2 (kMissingKey otherwise).
CalibrationSet ParseCalibFile(std::string_view text);
std::string WriteCalibFile(const CalibrationSet& calib);

// Writes a minimal calib file whose P2 is [K | 0].
std::string CalibFileForIntrinsics(const CameraIntrinsics& k);

struct OdometryPose {
  Eigen::Matrix<double, 3, 4> transform;
  int frame_index = 0;

  Eigen::Matrix3d rotation() const { return transform.leftCols<3>(); }
  Eigen::Vector3d translation() const { return transform.col(3); }
};

// One 3x4 row-major pose per line; rotation blocks must be orthogonal to
// within 1e-6 per entry of R * R^T - I (kNotARotation otherwise).
std::vector<OdometryPose> ParseOdometryPoses(std::string_view text);
std::string WriteOdometryPoses(const std::vector<OdometryPose>& poses);

enum class DifficultyBin { kEasy = 0, kModerate = 1, kHard = 2, kIgnored = 3 };

struct DifficultyThresholds {
  double min_height;
  int max_occlusion;
  double max_truncation;
};

// KITTI benchmark constants for Easy, Moderate, Hard.
inline constexpr std::array<DifficultyThresholds, 3> kDifficultyThresholds = {{
    {40.0, 0, 0.15},
    {25.0, 1, 0.30},
    {25.0, 2, 0.50},
}};

DifficultyBin DifficultyOf(const ObjectLabel& label);
const char* DifficultyName(DifficultyBin bin);
std::optional<DifficultyBin> ParseDifficulty(std::string_view name);

}  // namespace camext

#endif  // CAMEXT_KITTI_IO_H_
