#include "camext/horizon_vp.h"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/LU>

#include "camext/error.h"

namespace camext {

namespace {

void CheckAngle(double angle, const char* name) {
  if (!std::isfinite(angle) || std::abs(angle) >= std::numbers::pi / 2) {
    throw Error(ErrorCode::kOutOfRange,
                std::string(name) + " angle out of range: " +
                    std::to_string(angle));
  }
}

void CheckRotation(const Eigen::Matrix3d& m, const char* name) {
  const double err = (m * m.transpose() - Eigen::Matrix3d::Identity()).norm();
  if (!(err <= 1e-9) || !(std::abs(m.determinant() - 1.0) <= 1e-9)) {
    throw Error(ErrorCode::kNotARotation,
                std::string(name) + " deviates from orthogonality by " +
                    std::to_string(err));
  }
}

}  // namespace

ExtrinsicPerturbation ExtrinsicsFromHorizonVp(const HorizonLine& gp,
                                              const VanishingPoint& vp,
                                              const CameraIntrinsics& k) {
  const double pitch = std::atan((k.cy() - vp.v) / k.fy());
  CheckAngle(pitch, "pitch");
  const double roll = std::atan(gp.slope * k.fx() * std::cos(pitch) /
                                (k.fy() - k.skew() * gp.slope));
  CheckAngle(roll, "roll");
  return ExtrinsicPerturbation(pitch, roll);
}

HorizonObservation HorizonVpFromExtrinsics(const ExtrinsicPerturbation& p,
                                           const CameraIntrinsics& k) {
  const RotationMatrix a = PerturbationMatrix(p);
  const Eigen::Vector3d forward = a * Eigen::Vector3d::UnitZ();
  if (!(forward.z() > 0.0)) {
    throw Error(ErrorCode::kBehindCamera,
                "forward direction maps behind the camera");
  }
  const Eigen::Vector3d vp_h = k.Matrix() * forward;

  // Ground plane normal (camera y axis) after the perturbation, pulled back
  // to an image line l with l . (u, v, 1) = 0.
  const Eigen::Vector3d normal = a * Eigen::Vector3d::UnitY();
  const Eigen::Vector3d line = k.InverseMatrix().transpose() * normal;

  HorizonObservation obs;
  obs.vp = {vp_h.x() / vp_h.z(), vp_h.y() / vp_h.z()};
  obs.horizon.slope = -line.x() / line.y();
  obs.horizon.intercept_v = -(line.x() * k.cx() + line.z()) / line.y();
  return obs;
}

double AngularErrorDegrees(const Eigen::Matrix3d& estimate,
                           const Eigen::Matrix3d& truth) {
  CheckRotation(estimate, "estimate");
  CheckRotation(truth, "truth");
  // atan2 of the sine and cosine parts instead of acos of the trace keeps
  // full precision for nearly identical rotations.
  const Eigen::Matrix3d r = estimate.transpose() * truth;
  const double cos_angle = (r.trace() - 1.0) / 2.0;
  const double sin_angle =
      0.5 * Eigen::Vector3d(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0),
                            r(1, 0) - r(0, 1))
                .norm();
  return std::atan2(sin_angle, cos_angle) * 180.0 / std::numbers::pi;
}

double ExtrinsicRegressionLoss(const RotationMatrix& target,
                               const HorizonObservation& observed,
                               const CameraIntrinsics& k) {
  const RotationMatrix implied = PerturbationMatrix(
      ExtrinsicsFromHorizonVp(observed.horizon, observed.vp, k));
  return (target.matrix() - implied.matrix()).norm();
}

}  // namespace camext
