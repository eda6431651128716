#include "camext/perturb_sim.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "camext/error.h"
#include "camext/parallel.h"

namespace camext {

namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t Fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Unit-variance normal pair via Box-Muller on the raw 64-bit engine output,
// so draws are identical on every standard library.
std::pair<double, double> StandardNormalPair(std::mt19937_64& rng) {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * kScale;
  const double u2 = static_cast<double>(rng() >> 11) * kScale;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(theta), radius * std::sin(theta)};
}

double Draw(double sigma, double z, double clamp) {
  if (sigma == 0.0) return 0.0;
  return std::clamp(sigma * z, -clamp, clamp);
}

struct Hull {
  double left = std::numeric_limits<double>::infinity();
  double top = std::numeric_limits<double>::infinity();
  double right = -std::numeric_limits<double>::infinity();
  double bottom = -std::numeric_limits<double>::infinity();
};

// Nullopt when a corner is not in front of the camera.
std::optional<Hull> ProjectedHull(const CameraIntrinsics& k, const Box3D& box) {
  Hull hull;
  for (const Point3Camera& c : BoxCorners(box)) {
    if (!(c.z > 0.0)) return std::nullopt;
    const Point2Image p = Project(k, c);
    hull.left = std::min(hull.left, p.u);
    hull.right = std::max(hull.right, p.u);
    hull.top = std::min(hull.top, p.v);
    hull.bottom = std::max(hull.bottom, p.v);
  }
  return hull;
}

}  // namespace

void PerturbationSpec::Validate() const {
  if (!(sigma_pitch >= 0.0) || !(sigma_roll >= 0.0) ||
      !std::isfinite(sigma_pitch) || !std::isfinite(sigma_roll)) {
    throw Error(ErrorCode::kInvalidArgument,
                "sigmas must be finite and non-negative");
  }
  if (!(clamp > 0.0 && clamp < std::numbers::pi / 2)) {
    throw Error(ErrorCode::kInvalidArgument, "clamp must lie in (0, pi/2)");
  }
}

ExtrinsicPerturbation SamplePerturbation(const PerturbationSpec& spec,
                                         std::string_view frame_id) {
  spec.Validate();
  std::mt19937_64 rng(SplitMix64(spec.seed ^ SplitMix64(Fnv1a(frame_id))));
  const auto [z_pitch, z_roll] = StandardNormalPair(rng);
  return ExtrinsicPerturbation(Draw(spec.sigma_pitch, z_pitch, spec.clamp),
                               Draw(spec.sigma_roll, z_roll, spec.clamp));
}

PerturbedLabels PerturbLabels(const std::vector<ObjectLabel>& labels,
                              const CameraIntrinsics& k,
                              const RotationMatrix& a,
                              const ImageSize& image) {
  PerturbedLabels out;
  out.labels.reserve(labels.size());
  const double max_u = image.width - 1.0, max_v = image.height - 1.0;
  for (const ObjectLabel& label : labels) {
    if (label.IsDontCare()) {
      out.labels.push_back(label);
      continue;
    }
    const Box3D before = label.box();
    const Box3D after = TransformBox(a, before);
    const std::optional<Hull> hull_after = ProjectedHull(k, after);
    if (!hull_after) {
      ++out.dropped_behind_camera;
      continue;
    }

    ObjectLabel moved = label;
    moved.set_box(after);
    const double ray_before = std::atan2(before.center.x, before.center.z);
    const double ray_after = std::atan2(after.center.x, after.center.z);
    moved.alpha = WrapAngle(label.alpha + WrapAngle(after.yaw - before.yaw) -
                            WrapAngle(ray_after - ray_before));

    BBox2D box;
    if (const std::optional<Hull> hull_before = ProjectedHull(k, before)) {
      box = {label.bbox.left + hull_after->left - hull_before->left,
             label.bbox.top + hull_after->top - hull_before->top,
             label.bbox.right + hull_after->right - hull_before->right,
             label.bbox.bottom + hull_after->bottom - hull_before->bottom};
    } else {
      box = {hull_after->left, hull_after->top, hull_after->right,
             hull_after->bottom};
    }
    box.left = std::clamp(box.left, 0.0, max_u);
    box.right = std::clamp(box.right, 0.0, max_u);
    box.top = std::clamp(box.top, 0.0, max_v);
    box.bottom = std::clamp(box.bottom, 0.0, max_v);
    if (!(box.right > box.left && box.bottom > box.top)) {
      ++out.dropped_out_of_view;
      continue;
    }
    moved.bbox = box;
    out.labels.push_back(std::move(moved));
  }
  return out;
}

PerturbedLabels PerturbLabels(const std::vector<ObjectLabel>& labels,
                              const CameraIntrinsics& k,
                              const ExtrinsicPerturbation& p,
                              const ImageSize& image) {
  return PerturbLabels(labels, k, PerturbationMatrix(p), image);
}

SimulationReport SimulateDataset(const std::vector<SimulationInput>& frames,
                                 const PerturbationSpec& spec,
                                 const ImageSize& default_size, int jobs,
                                 uint8_t fill) {
  spec.Validate();
  SimulationReport report;
  report.frames.resize(frames.size());
  ParallelFor(frames.size(), jobs, [&](size_t i) {
    const SimulationInput& in = frames[i];
    SimulationOutput& out = report.frames[i];
    out.frame.frame_id = in.frame_id;
    try {
      const ExtrinsicPerturbation p = SamplePerturbation(spec, in.frame_id);
      const RotationMatrix a = PerturbationMatrix(p);
      const ImageSize size =
          in.image ? ImageSize{in.image->width(), in.image->height()}
                   : default_size;
      PerturbedLabels moved = PerturbLabels(in.labels, in.intrinsics, a, size);
      out.frame.applied = p;
      out.frame.labels = std::move(moved.labels);
      out.frame.homography = ImageHomography(in.intrinsics, a);
      out.dropped_behind_camera = moved.dropped_behind_camera;
      out.dropped_out_of_view = moved.dropped_out_of_view;
      if (in.image) out.warped = WarpImage(*in.image, out.frame.homography, fill);
    } catch (const Error& e) {
      out.error = e.what();
    }
  });
  for (const SimulationOutput& out : report.frames) {
    if (out.error) {
      ++report.frames_failed;
    } else {
      ++report.frames_ok;
    }
    report.dropped_behind_camera += out.dropped_behind_camera;
    report.dropped_out_of_view += out.dropped_out_of_view;
  }
  return report;
}

std::string WriteSidecar(const std::vector<SidecarRecord>& records) {
  std::string out;
  for (const SidecarRecord& r : records) {
    nlohmann::ordered_json j;
    j["frame_id"] = r.frame_id;
    j["pitch"] = r.perturbation.pitch();
    j["roll"] = r.perturbation.roll();
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<SidecarRecord> ParseSidecar(std::string_view text) {
  std::vector<SidecarRecord> records;
  int line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      records.push_back({j.at("frame_id").get<std::string>(),
                         ExtrinsicPerturbation(j.at("pitch").get<double>(),
                                               j.at("roll").get<double>())});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(ErrorCode::kMalformedLine, line_no, e.what());
    }
  }
  return records;
}

}  // namespace camext
