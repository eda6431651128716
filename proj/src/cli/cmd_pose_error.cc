#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "camext/cli.h"
#include "camext/error.h"
#include "camext/horizon_vp.h"
#include "commands.h"
#include "dataset.h"

namespace camext::cli {

namespace {

// Splits r = R_y(yaw) * R_x(pitch) * R_z(roll) and keeps the tilt; heading
// changes along the trajectory are not part of the estimate.
ExtrinsicPerturbation TiltOf(const Eigen::Matrix3d& r) {
  const double pitch = std::asin(std::clamp(-r(1, 2), -1.0, 1.0));
  const double roll = std::atan2(r(1, 0), r(1, 1));
  return ExtrinsicPerturbation(pitch, roll);
}

std::vector<std::pair<std::string, ExtrinsicPerturbation>> LoadEstimates(
    const PoseErrorOptions& opts) {
  std::vector<std::pair<std::string, ExtrinsicPerturbation>> est;
  if (!opts.estimates.empty()) {
    RequireFile(opts.estimates, "estimates");
    try {
      for (const SidecarRecord& r : ParseSidecar(ReadFile(opts.estimates))) {
        est.emplace_back(r.frame_id, r.perturbation);
      }
    } catch (const ParseError& e) {
      throw Error(e.code(), opts.estimates + ": " + e.what());
    }
    return est;
  }
  RequireFile(opts.horizon_vp, "horizon/VP");
  RequireFile(opts.calib_file, "calib");
  const CameraIntrinsics k =
      ParseCalibFile(ReadFile(opts.calib_file)).Intrinsics();
  try {
    for (const HorizonVpRecord& r : ParseHorizonVpFile(ReadFile(opts.horizon_vp))) {
      est.emplace_back(r.frame_id, ExtrinsicsFromHorizonVp(
                                       r.observation.horizon, r.observation.vp, k));
    }
  } catch (const ParseError& e) {
    throw Error(e.code(), opts.horizon_vp + ": " + e.what());
  }
  return est;
}

}  // namespace

int RunPoseError(const PoseErrorOptions& opts, std::ostream& out,
                 std::ostream& /*err*/) {
  if (opts.estimates.empty() == opts.horizon_vp.empty()) {
    throw UsageError("exactly one of --estimates and --horizon-vp is required");
  }
  if (!opts.horizon_vp.empty() && opts.calib_file.empty()) {
    throw UsageError("--horizon-vp requires --calib-file");
  }
  const auto estimates = LoadEstimates(opts);
  RequireFile(opts.poses, "poses");
  const std::vector<OdometryPose> poses = [&] {
    try {
      return ParseOdometryPoses(ReadFile(opts.poses));
    } catch (const ParseError& e) {
      throw Error(e.code(), opts.poses + ": " + e.what());
    }
  }();
  if (estimates.size() != poses.size()) {
    throw UsageError("frame count mismatch: " +
                     std::to_string(estimates.size()) + " estimates, " +
                     std::to_string(poses.size()) + " poses");
  }

  std::vector<double> errors;
  double path_length = 0.0;
  for (size_t i = 0; i < poses.size(); ++i) {
    const Eigen::Matrix3d rel =
        poses.front().rotation().transpose() * poses[i].rotation();
    const RotationMatrix truth = PerturbationMatrix(TiltOf(rel));
    errors.push_back(AngularErrorDegrees(
        PerturbationMatrix(estimates[i].second).matrix(), truth.matrix()));
    if (i > 0) {
      path_length += (poses[i].translation() - poses[i - 1].translation()).norm();
    }
  }
  std::optional<double> mean;
  if (!errors.empty()) {
    double sum = 0.0;
    for (double e : errors) sum += e;
    mean = sum / static_cast<double>(errors.size());
  }
  std::optional<double> per_meter;
  if (mean && path_length > 0.0) per_meter = *mean / path_length;

  std::string text;
  if (opts.format == ReportFormat::kCsv) {
    auto value = [](const std::optional<double>& v) {
      return v ? FormatNumber(*v) : std::string("n/a");
    };
    text = "frame_id,angular_error_deg\n";
    for (size_t i = 0; i < errors.size(); ++i) {
      text += estimates[i].first + "," + FormatNumber(errors[i]) + "\n";
    }
    text += "mean," + value(mean) + "\n";
    text += "path_length_m," + FormatNumber(path_length) + "\n";
    text += "deg_per_m," + value(per_meter) + "\n";
  } else {
    auto json_value = [](const std::optional<double>& v) {
      return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    nlohmann::ordered_json j;
    j["frames"] = errors.size();
    j["mean_angular_error_deg"] = json_value(mean);
    j["mean_angular_error_rad"] =
        json_value(mean ? std::optional<double>(*mean * kDegree) : std::nullopt);
    j["path_length_m"] = path_length;
    j["deg_per_m"] = json_value(per_meter);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (size_t i = 0; i < errors.size(); ++i) {
      rows.push_back({{"frame_id", estimates[i].first},
                      {"angular_error_deg", errors[i]}});
    }
    j["per_frame"] = std::move(rows);
    text = j.dump(2) + "\n";
  }
  EmitReport(opts.output, text, out);
  return kExitOk;
}

}  // namespace camext::cli
