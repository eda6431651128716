#include "camext/geometry.h"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/LU>

#include "camext/error.h"

namespace camext {

namespace {

constexpr double kPi = std::numbers::pi;

bool AllFinite(std::initializer_list<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

CameraIntrinsics::CameraIntrinsics(double fx, double fy, double cx, double cy,
                                   double skew)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), skew_(skew) {
  if (!AllFinite({fx, fy, cx, cy, skew})) {
    throw Error(ErrorCode::kInvalidArgument, "intrinsics must be finite");
  }
  if (fx <= 0.0 || fy <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "focal lengths must be positive, got fx=" + std::to_string(fx) +
                    " fy=" + std::to_string(fy));
  }
}

Eigen::Matrix3d CameraIntrinsics::Matrix() const {
  Eigen::Matrix3d k;
  k << fx_, skew_, cx_, 0.0, fy_, cy_, 0.0, 0.0, 1.0;
  return k;
}

Eigen::Matrix3d CameraIntrinsics::InverseMatrix() const {
  Eigen::Matrix3d inv;
  inv << 1.0 / fx_, -skew_ / (fx_ * fy_), (skew_ * cy_ - cx_ * fy_) / (fx_ * fy_),
      0.0, 1.0 / fy_, -cy_ / fy_, 0.0, 0.0, 1.0;
  return inv;
}

ExtrinsicPerturbation::ExtrinsicPerturbation(double pitch, double roll)
    : pitch_(pitch), roll_(roll) {
  if (!AllFinite({pitch, roll}) || std::abs(pitch) >= kPi / 2 ||
      std::abs(roll) >= kPi / 2) {
    throw Error(ErrorCode::kOutOfRange,
                "perturbation angles must be finite and within (-pi/2, pi/2), "
                "got pitch=" + std::to_string(pitch) +
                    " roll=" + std::to_string(roll));
  }
}

RotationMatrix RotationMatrix::FromMatrix(const Eigen::Matrix3d& m,
                                          double tolerance) {
  RotationMatrix r(m);
  if (!m.allFinite() || r.OrthogonalityError() > tolerance ||
      std::abs(m.determinant() - 1.0) > tolerance) {
    throw Error(ErrorCode::kNotARotation,
                "matrix is not a proper rotation within " +
                    std::to_string(tolerance));
  }
  return r;
}

double RotationMatrix::OrthogonalityError() const {
  return (m_ * m_.transpose() - Eigen::Matrix3d::Identity()).norm();
}

RotationMatrix RotationX(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix3d m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return RotationMatrix(m);
}

RotationMatrix RotationY(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix3d m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return RotationMatrix(m);
}

RotationMatrix RotationZ(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix3d m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return RotationMatrix(m);
}

Homography::Homography(const Eigen::Matrix3d& m) : m_(m) {
  const double det = m.determinant();
  if (!std::isfinite(det) || std::abs(det) <= 1e-12) {
    throw Error(ErrorCode::kSingularHomography,
                "determinant " + std::to_string(det));
  }
  if (m_(2, 2) != 0.0) m_ /= m_(2, 2);
}

Point2Image Homography::Apply(double u, double v) const {
  const Eigen::Vector3d q = m_ * Eigen::Vector3d(u, v, 1.0);
  return {q.x() / q.z(), q.y() / q.z(), std::nullopt};
}

double WrapAngle(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);
  if (a < -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

RotationMatrix PerturbationMatrix(const ExtrinsicPerturbation& p) {
  return RotationX(p.pitch()) * RotationZ(p.roll());
}

Eigen::Matrix3d PerturbationMatrixLiteral(const ExtrinsicPerturbation& p) {
  const double cp = std::cos(p.pitch()), sp = std::sin(p.pitch());
  const double cr = std::cos(p.roll()), sr = std::sin(p.roll());
  Eigen::Matrix3d a;
  a << cr, sr, 0.0,            //
      cp * sr, cr * cp, sp,    //
      -sp * sr, -sp * cr, cp;
  return a;
}

Point2Image Project(const CameraIntrinsics& k, const Point3Camera& p) {
  if (!(p.z > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth,
                "cannot project point with z=" + std::to_string(p.z));
  }
  const double u = (k.fx() * p.x + k.skew() * p.y) / p.z + k.cx();
  const double v = k.fy() * p.y / p.z + k.cy();
  return {u, v, p.z};
}

Point3Camera Backproject(const CameraIntrinsics& k, const Point2Image& p,
                         double z) {
  if (!(z > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth,
                "cannot backproject to z=" + std::to_string(z));
  }
  const double y = (p.v - k.cy()) * z / k.fy();
  const double x = ((p.u - k.cx()) * z - k.skew() * y) / k.fx();
  return {x, y, z};
}

TransferredKeypoint KeypointTransfer(const CameraIntrinsics& k_i,
                                     const CameraIntrinsics& k_j,
                                     const RotationMatrix& a,
                                     const Point2Image& p, double z_i) {
  const Point3Camera rotated =
      Point3Camera::From(a * Backproject(k_i, p, z_i).vec());
  if (!(rotated.z > 0.0)) {
    throw Error(ErrorCode::kBehindCamera,
                "keypoint rotates to z=" + std::to_string(rotated.z));
  }
  return {Project(k_j, rotated), rotated.z};
}

Eigen::Matrix3d KeypointTransferMatrix(const CameraIntrinsics& k_i,
                                       const CameraIntrinsics& k_j,
                                       const RotationMatrix& a, double z_i,
                                       double z_j) {
  return (z_i / z_j) * k_j.Matrix() * a.matrix() * k_i.InverseMatrix();
}

Homography ImageHomography(const CameraIntrinsics& k, const RotationMatrix& a) {
  return Homography(k.Matrix() * a.matrix() * k.InverseMatrix());
}

Box3D TransformBox(const RotationMatrix& a, const Box3D& b) {
  Box3D out = b;
  out.center = Point3Camera::From(a * b.center.vec());
  const Eigen::Vector3d lateral =
      a * Eigen::Vector3d(std::sin(b.yaw), 0.0, std::cos(b.yaw));
  out.yaw = std::atan2(lateral.x(), lateral.z());
  return out;
}

Point3Camera RectifyCenter(const RotationMatrix& a, const Point3Camera& c) {
  return Point3Camera::From(a * c.vec());
}

Point3Camera RectifyCenterInverse(const RotationMatrix& a,
                                  const Point3Camera& c) {
  return Point3Camera::From(a.matrix().transpose() * c.vec());
}

std::array<Point3Camera, 8> BoxCorners(const Box3D& b) {
  static constexpr double kX[4] = {0.5, 0.5, -0.5, -0.5};
  static constexpr double kZ[4] = {0.5, -0.5, -0.5, 0.5};
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  std::array<Point3Camera, 8> corners;
  for (int face = 0; face < 2; ++face) {
    const double y = face == 0 ? 0.0 : -b.h;
    for (int i = 0; i < 4; ++i) {
      const double x = kX[i] * b.l, z = kZ[i] * b.w;
      corners[face * 4 + i] = {b.center.x + c * x + s * z, b.center.y + y,
                               b.center.z - s * x + c * z};
    }
  }
  return corners;
}

std::array<double, 8> EncodeMultiBin(double alpha) {
  alpha = WrapAngle(alpha);
  std::array<double, 8> code{1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
  if (alpha < kPi / 6.0 || alpha > 5.0 * kPi / 6.0) {
    const double r = alpha + 0.5 * kPi;
    code[0] = 0.0;
    code[1] = 1.0;
    code[2] = std::sin(r);
    code[3] = std::cos(r);
  }
  if (alpha > -kPi / 6.0 || alpha < -5.0 * kPi / 6.0) {
    const double r = alpha - 0.5 * kPi;
    code[4] = 0.0;
    code[5] = 1.0;
    code[6] = std::sin(r);
    code[7] = std::cos(r);
  }
  return code;
}

double DecodeMultiBin(std::span<const double, 8> code) {
  if (code[1] - code[0] > code[5] - code[4]) {
    return WrapAngle(std::atan2(code[2], code[3]) - 0.5 * kPi);
  }
  return WrapAngle(std::atan2(code[6], code[7]) + 0.5 * kPi);
}

}  // namespace camext
