#include <map>

#include <nlohmann/json.hpp>

#include "camext/cli.h"
#include "camext/error.h"
#include "camext/horizon_vp.h"
#include "camext/parallel.h"
#include "commands.h"
#include "dataset.h"

namespace camext::cli {

namespace {

std::map<std::string, ExtrinsicPerturbation> SidecarMap(
    const std::string& path) {
  RequireFile(path, "sidecar");
  std::map<std::string, ExtrinsicPerturbation> m;
  try {
    for (const SidecarRecord& r : ParseSidecar(ReadFile(path))) {
      m[r.frame_id] = r.perturbation;
    }
  } catch (const ParseError& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
  return m;
}

std::map<std::string, HorizonObservation> HorizonMap(const std::string& path) {
  RequireFile(path, "horizon/VP");
  std::map<std::string, HorizonObservation> m;
  try {
    for (const HorizonVpRecord& r : ParseHorizonVpFile(ReadFile(path))) {
      m[r.frame_id] = r.observation;
    }
  } catch (const ParseError& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
  return m;
}

struct FrameResult {
  ExtrinsicPerturbation used;
  std::vector<ObjectLabel> labels;
  int dropped = 0;
  std::optional<double> angular_error_deg;
};

}  // namespace

int RunRectify(const RectifyOptions& opts, std::ostream& out,
               std::ostream& /*err*/) {
  if (opts.sidecar.empty() == opts.horizon_vp.empty()) {
    throw UsageError("exactly one of --sidecar and --horizon-vp is required");
  }
  RequireDirectory(opts.det_dir, "detection");
  RequireDirectory(opts.calib_dir, "calib");

  std::map<std::string, ExtrinsicPerturbation> sidecar;
  std::map<std::string, HorizonObservation> horizon;
  std::map<std::string, ExtrinsicPerturbation> truth;
  if (!opts.sidecar.empty()) sidecar = SidecarMap(opts.sidecar);
  if (!opts.horizon_vp.empty()) horizon = HorizonMap(opts.horizon_vp);
  if (!opts.truth.empty()) truth = SidecarMap(opts.truth);

  const std::vector<std::string> ids = ListFrameIds(opts.det_dir);
  const ImageSize size{opts.image_width, opts.image_height};
  std::vector<FrameResult> results(ids.size());
  ParallelFor(ids.size(), opts.jobs, [&](size_t i) {
    const std::string& id = ids[i];
    const CameraIntrinsics k = LoadIntrinsics(opts.calib_dir, id);
    FrameResult& r = results[i];
    if (!opts.sidecar.empty()) {
      const auto it = sidecar.find(id);
      if (it == sidecar.end()) {
        throw Error(ErrorCode::kMissingKey,
                    "no extrinsics for frame " + id + " in " + opts.sidecar);
      }
      r.used = it->second;
    } else {
      const auto it = horizon.find(id);
      if (it == horizon.end()) {
        throw Error(ErrorCode::kMissingKey,
                    "no horizon/VP for frame " + id + " in " + opts.horizon_vp);
      }
      r.used = ExtrinsicsFromHorizonVp(it->second.horizon, it->second.vp, k);
    }
    if (const auto t = truth.find(id); t != truth.end()) {
      r.angular_error_deg =
          AngularErrorDegrees(PerturbationMatrix(r.used).matrix(),
                              PerturbationMatrix(t->second).matrix());
    }
    RotationMatrix a = PerturbationMatrix(r.used);
    if (opts.inverse) a = a.Inverse();
    PerturbedLabels moved =
        PerturbLabels(LoadLabels(opts.det_dir, id, false), k, a, size);
    r.labels = std::move(moved.labels);
    r.dropped = moved.dropped();
  });

  const fs::path out_dir(opts.output_dir);
  nlohmann::ordered_json report;
  report["frames"] = ids.size();
  report["direction"] = opts.inverse ? "inverse" : "forward";
  report["source"] = opts.sidecar.empty() ? "horizon_vp" : "sidecar";
  nlohmann::ordered_json per_frame = nlohmann::ordered_json::array();
  double error_sum = 0.0;
  int error_count = 0;
  int dropped = 0;
  for (size_t i = 0; i < ids.size(); ++i) {
    const FrameResult& r = results[i];
    WriteFile(out_dir / "label_2" / (ids[i] + ".txt"),
              WriteLabelFile(r.labels, opts.decimals));
    nlohmann::ordered_json f;
    f["frame_id"] = ids[i];
    f["pitch"] = r.used.pitch();
    f["roll"] = r.used.roll();
    f["pitch_deg"] = r.used.pitch() / kDegree;
    f["roll_deg"] = r.used.roll() / kDegree;
    f["dropped"] = r.dropped;
    if (r.angular_error_deg) {
      f["angular_error_deg"] = *r.angular_error_deg;
      error_sum += *r.angular_error_deg;
      ++error_count;
    }
    dropped += r.dropped;
    per_frame.push_back(std::move(f));
  }
  report["dropped"] = dropped;
  if (error_count > 0) {
    report["mean_angular_error_deg"] = error_sum / error_count;
  } else {
    report["mean_angular_error_deg"] = nullptr;
  }
  report["per_frame"] = std::move(per_frame);
  WriteFile(out_dir / "rectify_report.json", report.dump(2) + "\n");

  out << "frames: " << ids.size() << "\ndropped objects: " << dropped << "\n";
  if (error_count > 0) {
    out << "mean angular error (deg): " << FormatNumber(error_sum / error_count)
        << "\n";
  }
  return kExitOk;
}

}  // namespace camext::cli
