#ifndef CAMEXT_CLI_COMMANDS_H_
#define CAMEXT_CLI_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "camext/perturb_sim.h"
#include "report.h"

namespace camext::cli {

// Thrown for invalid flag combinations or values; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimulateOptions {
  std::string labels_dir;
  std::string calib_dir;
  std::string image_dir;  // optional
  std::string output_dir;
  PerturbationSpec spec;
  int jobs = 1;
  int image_width = 1242;
  int image_height = 375;
  int fill = 0;
  int decimals = 2;
};

struct EvaluateOptions {
  std::string gt_dir;
  std::string det_dir;
  std::string disturbed_dir;  // optional second detection set
  std::vector<std::string> classes{"Car"};
  std::vector<std::string> metrics{"ap2d", "apbev", "ap3d", "aos"};
  std::vector<double> thresholds{0.7};
  std::vector<std::string> difficulties{"easy", "moderate", "hard"};
  double match_radius = 2.0;
  ReportFormat format = ReportFormat::kJson;
  std::string output;  // stdout when empty
  int jobs = 1;
};

struct RectifyOptions {
  std::string det_dir;
  std::string calib_dir;
  std::string sidecar;     // per-frame extrinsics
  std::string horizon_vp;  // or horizon/VP annotations
  std::string truth;       // sidecar used to score horizon/VP estimates
  std::string output_dir;
  bool inverse = false;
  int image_width = 1242;
  int image_height = 375;
  int decimals = 2;
  int jobs = 1;
};

struct PoseErrorOptions {
  std::string estimates;   // sidecar JSON lines
  std::string horizon_vp;  // alternative estimate source
  std::string calib_file;  // intrinsics for horizon_vp
  std::string poses;       // odometry ground truth
  ReportFormat format = ReportFormat::kJson;
  std::string output;
};

struct LossOptions {
  std::vector<std::string> layers;
  std::string content_target;
  std::vector<std::string> style_targets;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  bool grad_check = false;
  double grad_step = 1e-4;
  ReportFormat format = ReportFormat::kJson;
  std::string output;
};

int RunSimulate(const SimulateOptions& opts, std::ostream& out,
                std::ostream& err);
int RunEvaluate(const EvaluateOptions& opts, std::ostream& out,
                std::ostream& err);
int RunRectify(const RectifyOptions& opts, std::ostream& out,
               std::ostream& err);
int RunPoseError(const PoseErrorOptions& opts, std::ostream& out,
                 std::ostream& err);
int RunLoss(const LossOptions& opts, std::ostream& out, std::ostream& err);

// Writes `text` to `path`, or to `out` when path is empty.
void EmitReport(const std::string& path, const std::string& text,
                std::ostream& out);

}  // namespace camext::cli

#endif  // CAMEXT_CLI_COMMANDS_H_
