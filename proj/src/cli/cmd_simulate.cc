#include <cstdio>

#include <nlohmann/json.hpp>

#include "camext/cli.h"
#include "camext/error.h"
#include "camext/horizon_vp.h"
#include "camext/parallel.h"
#include "commands.h"
#include "dataset.h"

namespace camext::cli {

namespace {

struct LoadedFrame {
  std::string frame_id;
  std::optional<SimulationInput> input;
  std::string image_ext;
  std::optional<std::string> error;
};

}  // namespace

int RunSimulate(const SimulateOptions& opts, std::ostream& out,
                std::ostream& err) {
  try {
    opts.spec.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  RequireDirectory(opts.labels_dir, "labels");
  RequireDirectory(opts.calib_dir, "calib");
  if (!opts.image_dir.empty()) RequireDirectory(opts.image_dir, "image");

  const std::vector<std::string> ids = ListFrameIds(opts.labels_dir);
  const fs::path out_dir(opts.output_dir);

  // Loading failures are per-frame; they are reported and skipped.
  std::vector<LoadedFrame> loaded(ids.size());
  ParallelFor(ids.size(), opts.jobs, [&](size_t i) {
    LoadedFrame& f = loaded[i];
    f.frame_id = ids[i];
    try {
      std::vector<ObjectLabel> labels = LoadLabels(opts.labels_dir, ids[i], false);
      f.input.emplace(SimulationInput{ids[i], std::move(labels),
                                      LoadIntrinsics(opts.calib_dir, ids[i]),
                                      std::nullopt});
      if (!opts.image_dir.empty()) {
        if (auto img = LoadImage(opts.image_dir, ids[i])) {
          f.input->image = std::move(img->image);
          f.image_ext = img->extension;
        }
      }
    } catch (const Error& e) {
      f.error = e.what();
    }
  });

  std::vector<SimulationInput> inputs;
  std::vector<size_t> input_slot;
  for (size_t i = 0; i < loaded.size(); ++i) {
    if (loaded[i].error) continue;
    inputs.push_back(std::move(*loaded[i].input));
    input_slot.push_back(i);
  }

  const ImageSize size{opts.image_width, opts.image_height};
  const SimulationReport report = SimulateDataset(
      inputs, opts.spec, size, opts.jobs, static_cast<uint8_t>(opts.fill));

  std::vector<SidecarRecord> sidecar;
  std::vector<HorizonVpRecord> horizon;
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const LoadedFrame& f : loaded) {
    if (f.error) {
      failures.push_back({{"frame_id", f.frame_id}, {"error", *f.error}});
    }
  }
  for (size_t j = 0; j < report.frames.size(); ++j) {
    const SimulationOutput& o = report.frames[j];
    const std::string& id = o.frame.frame_id;
    if (o.error) {
      failures.push_back({{"frame_id", id}, {"error", *o.error}});
      continue;
    }
    WriteFile(out_dir / "label_2" / (id + ".txt"),
              WriteLabelFile(o.frame.labels, opts.decimals));
    if (o.warped) {
      WriteFile(out_dir / "image_2" / (id + loaded[input_slot[j]].image_ext),
                EncodeNetpbm(*o.warped));
    }
    sidecar.push_back({id, o.frame.applied});
    horizon.push_back(
        {id, HorizonVpFromExtrinsics(o.frame.applied, inputs[j].intrinsics)});
  }
  WriteFile(out_dir / "perturbations.jsonl", WriteSidecar(sidecar));
  WriteFile(out_dir / "horizon_vp.jsonl", WriteHorizonVpFile(horizon));

  const int frames_failed =
      static_cast<int>(ids.size()) - report.frames_ok;
  nlohmann::ordered_json summary;
  summary["frames"] = ids.size();
  summary["frames_ok"] = report.frames_ok;
  summary["frames_failed"] = frames_failed;
  summary["dropped_behind_camera"] = report.dropped_behind_camera;
  summary["dropped_out_of_view"] = report.dropped_out_of_view;
  summary["sigma_pitch_rad"] = opts.spec.sigma_pitch;
  summary["sigma_roll_rad"] = opts.spec.sigma_roll;
  summary["sigma_pitch_deg"] = opts.spec.sigma_pitch / kDegree;
  summary["sigma_roll_deg"] = opts.spec.sigma_roll / kDegree;
  summary["clamp_rad"] = opts.spec.clamp;
  summary["seed"] = opts.spec.seed;
  summary["failures"] = failures;
  WriteFile(out_dir / "summary.json", summary.dump(2) + "\n");

  out << "frames: " << ids.size() << " (ok " << report.frames_ok
      << ", failed " << frames_failed << ")\n"
      << "dropped objects: "
      << report.dropped_behind_camera + report.dropped_out_of_view
      << " (behind camera " << report.dropped_behind_camera
      << ", out of view " << report.dropped_out_of_view << ")\n";
  for (const auto& f : failures) {
    err << "frame " << f["frame_id"].get<std::string>() << ": "
        << f["error"].get<std::string>() << "\n";
  }
  if (ids.empty() || report.frames_ok > 0) return kExitOk;
  return kExitIo;
}

}  // namespace camext::cli
