#ifndef CAMEXT_PERTURB_SIM_H_
#define CAMEXT_PERTURB_SIM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camext/geometry.h"
#include "camext/kitti_io.h"
#include "camext/raster.h"

namespace camext {

inline constexpr double kDegree = 0.017453292519943295;

// Gaussian tilt model. Defaults: 1 degree standard deviation per angle,
// draws clamped to +-10 degrees.
struct PerturbationSpec {
  double sigma_pitch = kDegree;
  double sigma_roll = kDegree;
  uint64_t seed = 0;
  double clamp = 10.0 * kDegree;

  // Throws kInvalidArgument unless sigmas >= 0 and clamp in (0, pi/2).
  void Validate() const;
};

// Deterministic in (spec.seed, frame_id): the frame id is hashed into the
// seed so draws do not depend on iteration order.
ExtrinsicPerturbation SamplePerturbation(const PerturbationSpec& spec,
                                         std::string_view frame_id);

struct ImageSize {
  int width = 1242;
  int height = 375;
};

struct PerturbedLabels {
  std::vector<ObjectLabel> labels;
  int dropped_behind_camera = 0;
  int dropped_out_of_view = 0;

  int dropped() const { return dropped_behind_camera + dropped_out_of_view; }
};

// Moves every non-DontCare label into the rotated viewport: the 3D box goes
// through TransformBox, alpha follows the change in yaw and viewing ray, and
// each edge of the 2D box moves by the change in the hull of the projected
// 3D corners (then is clipped to the image). Objects with any corner at
// z <= 0 after rotation are dropped as behind-camera; objects whose clipped
// box is empty are dropped as out-of-view.
PerturbedLabels PerturbLabels(const std::vector<ObjectLabel>& labels,
                              const CameraIntrinsics& k,
                              const RotationMatrix& a,
                              const ImageSize& image = {});

PerturbedLabels PerturbLabels(const std::vector<ObjectLabel>& labels,
                              const CameraIntrinsics& k,
                              const ExtrinsicPerturbation& p,
                              const ImageSize& image = {});

struct PerturbedFrame {
  std::string frame_id;
  ExtrinsicPerturbation applied;
  std::vector<ObjectLabel> labels;
  Homography homography;
};

struct SimulationInput {
  std::string frame_id;
  std::vector<ObjectLabel> labels;
  CameraIntrinsics intrinsics;
  std::optional<RasterImage> image;
};

struct SimulationOutput {
  PerturbedFrame frame;
  std::optional<RasterImage> warped;
  int dropped_behind_camera = 0;
  int dropped_out_of_view = 0;
  std::optional<std::string> error;
};

struct SimulationReport {
  std::vector<SimulationOutput> frames;  // same order as the input
  int frames_ok = 0;
  int frames_failed = 0;
  int dropped_behind_camera = 0;
  int dropped_out_of_view = 0;
};

SimulationReport SimulateDataset(const std::vector<SimulationInput>& frames,
                                 const PerturbationSpec& spec,
                                 const ImageSize& default_size = {},
                                 int jobs = 1, uint8_t fill = 0);

// One JSON object per line: {"frame_id": ..., "pitch": ..., "roll": ...},
// angles in radians.
struct SidecarRecord {
  std::string frame_id;
  ExtrinsicPerturbation perturbation;
};

std::string WriteSidecar(const std::vector<SidecarRecord>& records);
std::vector<SidecarRecord> ParseSidecar(std::string_view text);

}  // namespace camext

#endif  // CAMEXT_PERTURB_SIM_H_
