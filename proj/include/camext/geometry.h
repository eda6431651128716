#ifndef CAMEXT_GEOMETRY_H_
#define CAMEXT_GEOMETRY_H_

#include <array>
#include <optional>
#include <span>

#include <Eigen/Core>
#include <Eigen/LU>

namespace camext {

// Camera frame convention used throughout: x right, y down, z forward.
// Image convention: u grows to the right, v grows downward.
//
// Sign convention for perturbations: a positive pitch rotates scene points
// by R_x(pitch), which moves the image of forward rays (the vanishing point)
// upward, i.e. to smaller v. A positive roll rotates by R_z(roll) about the
// optical axis. horizon_vp.h relies on exactly this convention.

// Pinhole intrinsics. The constructor enforces fx, fy > 0 and finiteness.
class CameraIntrinsics {
 public:
  CameraIntrinsics(double fx, double fy, double cx, double cy,
                   double skew = 0.0);

  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  double skew() const { return skew_; }

  // Upper-triangular K.
  Eigen::Matrix3d Matrix() const;
  Eigen::Matrix3d InverseMatrix() const;

  bool operator==(const CameraIntrinsics&) const = default;

 private:
  double fx_, fy_, cx_, cy_, skew_;
};

// Pitch/roll tilt of the ego vehicle with respect to the ground plane, in
// radians. Both angles must be finite with magnitude below pi/2.
class ExtrinsicPerturbation {
 public:
  ExtrinsicPerturbation() = default;
  ExtrinsicPerturbation(double pitch, double roll);

  double pitch() const { return pitch_; }
  double roll() const { return roll_; }

  bool operator==(const ExtrinsicPerturbation&) const = default;

 private:
  double pitch_ = 0.0;
  double roll_ = 0.0;
};

// Proper rotation. Instances built by FromMatrix are checked for
// orthogonality and unit determinant.
class RotationMatrix {
 public:
  RotationMatrix() : m_(Eigen::Matrix3d::Identity()) {}

  static RotationMatrix FromMatrix(const Eigen::Matrix3d& m,
                                   double tolerance = 1e-9);
  static RotationMatrix Identity() { return RotationMatrix(); }

  const Eigen::Matrix3d& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  RotationMatrix Inverse() const { return RotationMatrix(m_.transpose()); }
  RotationMatrix operator*(const RotationMatrix& o) const {
    return RotationMatrix(m_ * o.m_);
  }
  Eigen::Vector3d operator*(const Eigen::Vector3d& v) const { return m_ * v; }

  // Frobenius norm of R * R^T - I.
  double OrthogonalityError() const;

 private:
  explicit RotationMatrix(const Eigen::Matrix3d& m) : m_(m) {}
  friend RotationMatrix RotationX(double);
  friend RotationMatrix RotationY(double);
  friend RotationMatrix RotationZ(double);

  Eigen::Matrix3d m_;
};

RotationMatrix RotationX(double angle);
RotationMatrix RotationY(double angle);
RotationMatrix RotationZ(double angle);

struct Point3Camera {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static Point3Camera From(const Eigen::Vector3d& v) {
    return {v.x(), v.y(), v.z()};
  }
};

struct Point2Image {
  double u = 0.0;
  double v = 0.0;
  std::optional<double> depth;
};

// Planar projective map stored with H(2,2) == 1 whenever that entry is
// nonzero.
class Homography {
 public:
  Homography() : m_(Eigen::Matrix3d::Identity()) {}
  // Throws kSingularHomography when |det| <= 1e-12.
  explicit Homography(const Eigen::Matrix3d& m);

  const Eigen::Matrix3d& matrix() const { return m_; }
  Homography Inverse() const { return Homography(m_.inverse()); }

  // Maps (u, v, 1) and dehomogenizes. The returned point has no depth.
  Point2Image Apply(double u, double v) const;

 private:
  Eigen::Matrix3d m_;
};

// 3D box in KITTI convention: center is the bottom-face center, the box
// spans [center.y - h, center.y] vertically, l runs along the local x axis
// and w along the local z axis, yaw rotates about the camera y axis.
struct Box3D {
  Point3Camera center;
  double h = 0.0;
  double w = 0.0;
  double l = 0.0;
  double yaw = 0.0;
};

// Wraps to [-pi, pi].
double WrapAngle(double angle);

// Canonical perturbation rotation R_x(pitch) * R_z(roll).
RotationMatrix PerturbationMatrix(const ExtrinsicPerturbation& p);

// A commonly transcribed expanded form of the pitch/roll matrix. It is not
// a rotation in general (singular at pitch 0, roll pi/4) and is kept only
// so tests can show why PerturbationMatrix is used instead.
Eigen::Matrix3d PerturbationMatrixLiteral(const ExtrinsicPerturbation& p);

// Throws kNonPositiveDepth when p.z <= 0.
Point2Image Project(const CameraIntrinsics& k, const Point3Camera& p);
Point3Camera Backproject(const CameraIntrinsics& k, const Point2Image& p,
                         double z);

struct TransferredKeypoint {
  Point2Image point;  // depth populated with z_j
  double depth = 0.0;
};

// Moves an image keypoint observed at depth z_i by camera k_i into the view
// of camera k_j after the scene is rotated by a. Throws kBehindCamera when
// the rotated point is not in front of camera j.
TransferredKeypoint KeypointTransfer(const CameraIntrinsics& k_i,
                                     const CameraIntrinsics& k_j,
                                     const RotationMatrix& a,
                                     const Point2Image& p, double z_i);

// M = (z_i / z_j) * K_j * A * K_i^-1.
Eigen::Matrix3d KeypointTransferMatrix(const CameraIntrinsics& k_i,
                                       const CameraIntrinsics& k_j,
                                       const RotationMatrix& a, double z_i,
                                       double z_j);

// H = K * A * K^-1; depth-independent for a pure rotation.
Homography ImageHomography(const CameraIntrinsics& k, const RotationMatrix& a);

// Rotates the bottom-center and re-extracts yaw from the rotated lateral
// axis (sin yaw, 0, cos yaw). Any induced box roll is dropped.
Box3D TransformBox(const RotationMatrix& a, const Box3D& b);

Point3Camera RectifyCenter(const RotationMatrix& a, const Point3Camera& c);
Point3Camera RectifyCenterInverse(const RotationMatrix& a,
                                  const Point3Camera& c);

// Corners ordered: bottom face (4), then top face (4).
std::array<Point3Camera, 8> BoxCorners(const Box3D& b);

// Two-bin orientation code with eight scalars per object:
// [bin0 logit_off, bin0 logit_on, bin0 sin, bin0 cos,
//  bin1 logit_off, bin1 logit_on, bin1 sin, bin1 cos].
// Bin 0 is centered at -pi/2 and bin 1 at +pi/2; the bins overlap by pi/3
// so angles near either boundary activate both.
std::array<double, 8> EncodeMultiBin(double alpha);
double DecodeMultiBin(std::span<const double, 8> code);

}  // namespace camext

#endif  // CAMEXT_GEOMETRY_H_
