#ifndef CAMEXT_HORIZON_VP_H_
#define CAMEXT_HORIZON_VP_H_

#include "camext/geometry.h"

namespace camext {

// Image of the ground plane at infinity, as v = intercept_v + slope * (u - cx).
struct HorizonLine {
  double slope = 0.0;
  double intercept_v = 0.0;
};

// Image of the reference forward direction (0, 0, 1).
struct VanishingPoint {
  double u = 0.0;
  double v = 0.0;
};

struct HorizonObservation {
  HorizonLine horizon;
  VanishingPoint vp;
};

// Recovers pitch from the vertical offset of the vanishing point and roll
// from the horizon tilt. Pitch is solved first because the horizon slope
// for a given roll shrinks by cos(pitch):
//   pitch = atan((cy - vp.v) / fy)
//   roll  = atan(slope * fx * cos(pitch) / (fy - skew * slope))
// which reduces to roll = atan(slope) for square pixels and zero pitch.
// Throws kOutOfRange if either angle is not finite or reaches pi/2.
ExtrinsicPerturbation ExtrinsicsFromHorizonVp(const HorizonLine& gp,
                                              const VanishingPoint& vp,
                                              const CameraIntrinsics& k);

// Synthesizes the observation a perfect detector would report for a camera
// perturbed by p. Exact inverse of ExtrinsicsFromHorizonVp.
HorizonObservation HorizonVpFromExtrinsics(const ExtrinsicPerturbation& p,
                                           const CameraIntrinsics& k);

// Geodesic distance between two rotations, in degrees. Throws kNotARotation
// when either argument deviates from orthogonality by more than 1e-9.
double AngularErrorDegrees(const Eigen::Matrix3d& estimate,
                           const Eigen::Matrix3d& truth);

// Frobenius distance between a target extrinsic and the one implied by an
// observation; the regression loss for the horizon/VP branch.
double ExtrinsicRegressionLoss(const RotationMatrix& target,
                               const HorizonObservation& observed,
                               const CameraIntrinsics& k);

}  // namespace camext

#endif  // CAMEXT_HORIZON_VP_H_
