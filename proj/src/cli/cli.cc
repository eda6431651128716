#include "camext/cli.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <memory>

#include "CLI11.hpp"
#include "camext/error.h"
#include "commands.h"
#include "dataset.h"

namespace camext {

namespace {

// Flat `key = value` config files whose keys are the long flag names of the
// active subcommand. Blank lines and lines starting with '#' or ';' are
// skipped.
class FlatConfig : public CLI::Config {
 public:
  explicit FlatConfig(std::string section) : section_(std::move(section)) {}

  std::string to_config(const CLI::App*, bool, bool,
                        std::string) const override {
    return {};
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    std::vector<CLI::ConfigItem> items;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string trimmed = CLI::detail::trim_copy(line);
      if (trimmed.empty() || trimmed[0] == '#' || trimmed[0] == ';') continue;
      const size_t eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw CLI::ConversionError("config line " + std::to_string(line_no) +
                                   " is not key = value");
      }
      CLI::ConfigItem item;
      if (!section_.empty()) item.parents = {section_};
      item.name = CLI::detail::trim_copy(trimmed.substr(0, eq));
      std::string value = CLI::detail::trim_copy(trimmed.substr(eq + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        value = value.substr(1, value.size() - 2);
      }
      item.inputs = {value};
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  std::string section_;
};

bool IsInputError(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
    case ErrorCode::kMalformedLine:
    case ErrorCode::kNonFiniteValue:
    case ErrorCode::kMissingKey:
      return true;
    default:
      return false;
  }
}

cli::ReportFormat ToFormat(const std::string& name) {
  return name == "csv" ? cli::ReportFormat::kCsv : cli::ReportFormat::kJson;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Camera-extrinsic perturbation toolkit", "camext"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key = value file; flags take precedence");
  app.config_formatter(std::make_shared<FlatConfig>(
      args.empty() ? std::string() : args.front()));

  const auto formats = CLI::IsMember({"json", "csv"});
  std::string format_name = "json";

  // simulate
  cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand(
      "simulate", "Apply sampled pitch/roll perturbations to a KITTI split");
  simulate->fallthrough();
  simulate->add_option("--labels", sim.labels_dir, "label_2 directory")->required();
  simulate->add_option("--calib", sim.calib_dir, "calib directory")->required();
  simulate->add_option("--images", sim.image_dir, "PPM/PGM image directory");
  simulate->add_option("--output", sim.output_dir, "Output directory")->required();
  simulate->add_option("--sigma-pitch", sim.spec.sigma_pitch,
                       "Pitch standard deviation (rad)")
      ->capture_default_str();
  simulate->add_option("--sigma-roll", sim.spec.sigma_roll,
                       "Roll standard deviation (rad)")
      ->capture_default_str();
  simulate->add_option("--clamp", sim.spec.clamp, "Max |angle| (rad)")
      ->capture_default_str();
  simulate->add_option("--seed", sim.spec.seed, "Master seed")
      ->capture_default_str();
  simulate->add_option("--jobs", sim.jobs, "Worker threads")->check(CLI::PositiveNumber);
  simulate->add_option("--image-width", sim.image_width,
                       "Image width when no image is given")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--image-height", sim.image_height,
                       "Image height when no image is given")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--fill", sim.fill, "Warp fill value")->check(CLI::Range(0, 255));
  simulate->add_option("--decimals", sim.decimals, "Label output decimals")
      ->check(CLI::Range(0, 12));

  // evaluate
  cli::EvaluateOptions eval;
  auto* evaluate = app.add_subcommand(
      "evaluate", "AP40 / AOS / nuScenes-style error tables");
  evaluate->fallthrough();
  evaluate->add_option("--gt", eval.gt_dir, "Ground-truth label directory")->required();
  evaluate->add_option("--det", eval.det_dir, "Detection label directory")->required();
  evaluate->add_option("--det-disturbed", eval.disturbed_dir,
                       "Second detection set; adds original/disturbed/decrease rows");
  evaluate->add_option("--classes", eval.classes)->delimiter(',');
  evaluate->add_option("--metrics", eval.metrics,
                       "ap2d, apbev, ap3d, aos, nuscenes")
      ->delimiter(',')
      ->check(CLI::IsMember({"ap2d", "apbev", "ap3d", "aos", "nuscenes"}));
  evaluate->add_option("--thresholds", eval.thresholds, "IoU thresholds")
      ->delimiter(',')
      ->check(CLI::Range(1e-9, 1.0));
  evaluate->add_option("--difficulties", eval.difficulties)
      ->delimiter(',')
      ->check(CLI::IsMember({"easy", "moderate", "hard"}));
  evaluate->add_option("--match-radius", eval.match_radius,
                       "nuScenes center-distance radius (m)")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--format", format_name)->check(formats);
  evaluate->add_option("--output", eval.output, "Report path (default stdout)");
  evaluate->add_option("--jobs", eval.jobs)->check(CLI::PositiveNumber);

  // rectify
  cli::RectifyOptions rect;
  auto* rectify = app.add_subcommand(
      "rectify", "Move detections between viewports with known extrinsics");
  rectify->fallthrough();
  rectify->add_option("--det", rect.det_dir, "Label directory to rectify")->required();
  rectify->add_option("--calib", rect.calib_dir, "calib directory")->required();
  rectify->add_option("--sidecar", rect.sidecar, "Per-frame pitch/roll JSON lines");
  rectify->add_option("--horizon-vp", rect.horizon_vp,
                      "Per-frame horizon/vanishing-point JSON lines");
  rectify->add_option("--truth", rect.truth,
                      "Sidecar used to score horizon/VP estimates");
  rectify->add_option("--output", rect.output_dir, "Output directory")->required();
  rectify->add_flag("--inverse", rect.inverse,
                    "Apply the inverse rotation (perturbed -> reference)");
  rectify->add_option("--image-width", rect.image_width)->check(CLI::PositiveNumber);
  rectify->add_option("--image-height", rect.image_height)->check(CLI::PositiveNumber);
  rectify->add_option("--decimals", rect.decimals)->check(CLI::Range(0, 12));
  rectify->add_option("--jobs", rect.jobs)->check(CLI::PositiveNumber);

  // pose-error
  cli::PoseErrorOptions pose;
  auto* pose_error = app.add_subcommand(
      "pose-error", "Geodesic angular error of extrinsic estimates");
  pose_error->fallthrough();
  pose_error->add_option("--estimates", pose.estimates, "Pitch/roll JSON lines");
  pose_error->add_option("--horizon-vp", pose.horizon_vp,
                         "Horizon/VP JSON lines (needs --calib-file)");
  pose_error->add_option("--calib-file", pose.calib_file, "KITTI calib file");
  pose_error->add_option("--poses", pose.poses, "Odometry pose file")->required();
  pose_error->add_option("--format", format_name)->check(formats);
  pose_error->add_option("--output", pose.output);

  // loss
  cli::LossOptions loss;
  auto* loss_cmd =
      app.add_subcommand("loss", "Content/style/total loss on tensor files");
  loss_cmd->fallthrough();
  loss_cmd->add_option("--layers", loss.layers,
                       "Output activations, shallow to deep")
      ->delimiter(',')
      ->required();
  loss_cmd->add_option("--content-target", loss.content_target)->required();
  loss_cmd->add_option("--style-targets", loss.style_targets,
                       "One per layer")
      ->delimiter(',')
      ->required();
  loss_cmd->add_option("--gamma1", loss.gamma1)->check(CLI::NonNegativeNumber);
  loss_cmd->add_option("--gamma2", loss.gamma2)->check(CLI::NonNegativeNumber);
  loss_cmd->add_flag("--grad-check", loss.grad_check,
                     "Compare analytic gradients with central differences");
  loss_cmd->add_option("--grad-step", loss.grad_step)->check(CLI::PositiveNumber);
  loss_cmd->add_option("--format", format_name)->check(formats);
  loss_cmd->add_option("--output", loss.output);

  std::vector<std::string> argv_storage{"camext"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      bool seed_flag = false;
      for (const auto& a : args) {
        if (a == "--seed" || a.rfind("--seed=", 0) == 0) seed_flag = true;
      }
      if (const char* env = std::getenv(kSeedEnvVar); env && !seed_flag) {
        const std::string_view s(env);
        uint64_t seed = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
          throw cli::UsageError(std::string(kSeedEnvVar) +
                                " must be an unsigned integer");
        }
        sim.spec.seed = seed;
      }
      return cli::RunSimulate(sim, out, err);
    }
    if (evaluate->parsed()) {
      eval.format = ToFormat(format_name);
      return cli::RunEvaluate(eval, out, err);
    }
    if (rectify->parsed()) return cli::RunRectify(rect, out, err);
    if (pose_error->parsed()) {
      pose.format = ToFormat(format_name);
      return cli::RunPoseError(pose, out, err);
    }
    if (loss_cmd->parsed()) {
      loss.format = ToFormat(format_name);
      return cli::RunLoss(loss, out, err);
    }
  } catch (const cli::UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return IsInputError(e.code()) ? kExitIo : kExitUsage;
  }
  return kExitUsage;
}

namespace cli {

void EmitReport(const std::string& path, const std::string& text,
                std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    WriteFile(path, text);
  }
}

}  // namespace cli

}  // namespace camext
