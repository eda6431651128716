// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "camext/cli.h"
#include "camext/error.h"
#include "camext/eval_metrics.h"
#include "camext/geometry.h"
#include "camext/horizon_vp.h"
#include "camext/kitti_io.h"
#include "camext/loss_kernel.h"
#include "camext/perturb_sim.h"
#include "camext/raster.h"
#include "test_util.h"

namespace camext {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::kPi;

// Outcome of one criterion: pass flag plus a short measured summary.
struct Outcome {
  bool pass = true;
  std::string detail;

  void Check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void Note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

Outcome GeometrySuite() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> angle(-0.5, 0.5), pix(0.2, 0.8),
      depth(2.0, 80.0);
  double ortho = 0, det = 0, round_trip = 0, agreement = 0;
  for (int i = 0; i < 10000; ++i) {
    const CameraIntrinsics k = testing::RandomK(rng);
    const RotationMatrix a = PerturbationMatrix({angle(rng), angle(rng)});
    ortho = std::max(ortho, (a.matrix() * a.matrix().transpose() -
                             Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
    det = std::max(det, std::abs(a.matrix().determinant() - 1.0));
    const Point2Image p{pix(rng) * 2 * k.cx(), pix(rng) * 2 * k.cy()};
    const double z = depth(rng);
    const TransferredKeypoint fwd = KeypointTransfer(k, k, a, p, z);
    const TransferredKeypoint back =
        KeypointTransfer(k, k, a.Inverse(), fwd.point, fwd.depth);
    round_trip = std::max({round_trip, std::abs(back.point.u - p.u),
                           std::abs(back.point.v - p.v)});
    const Homography h = ImageHomography(k, a);
    const Point2Image hp = h.Apply(p.u, p.v);
    for (double zi : {1.0, 5.0, 50.0}) {
      const TransferredKeypoint t = KeypointTransfer(k, k, a, p, zi);
      agreement = std::max({agreement, std::abs(t.point.u - hp.u),
                            std::abs(t.point.v - hp.v)});
    }
  }
  const double secs = Seconds(start);
  o.Check(ortho <= 1e-12, "orthogonality");
  o.Check(det <= 1e-12, "determinant");
  o.Check(round_trip <= 1e-9, "transfer round trip");
  o.Check(agreement <= 1e-9, "homography agreement");
  o.Check(secs < 5.0, "runtime");
  o.Note("max |AA^T-I| " + Fmt("%.2e", ortho) + ", round trip " +
         Fmt("%.2e", round_trip) + " px, homography " + Fmt("%.2e", agreement) +
         " px, " + Fmt("%.2f", secs) + " s");
  return o;
}

Outcome LiteralMatrixCheck() {
  Outcome o;
  const ExtrinsicPerturbation p(0.0, kPi / 4);
  const double det = PerturbationMatrixLiteral(p).determinant();
  const Eigen::Matrix3d a = PerturbationMatrix(p).matrix();
  const double ortho =
      (a * a.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  o.Check(std::abs(det) <= 1e-12, "literal matrix not singular");
  o.Check(ortho <= 1e-12 && std::abs(a.determinant() - 1) <= 1e-12,
          "canonical matrix not a rotation");
  o.Note("det(literal) " + Fmt("%.2e", det) + ", canonical |AA^T-I| " +
         Fmt("%.2e", ortho));
  return o;
}

Outcome HorizonRoundTrip() {
  Outcome o;
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> angle(-0.3, 0.3);
  double worst = 0, decouple = 0;
  bool pitch_flat = true;
  for (int i = 0; i < 10000; ++i) {
    const CameraIntrinsics k = testing::RandomK(rng);
    const ExtrinsicPerturbation p(angle(rng), angle(rng));
    const HorizonObservation obs = HorizonVpFromExtrinsics(p, k);
    const ExtrinsicPerturbation back = ExtrinsicsFromHorizonVp(obs.horizon, obs.vp, k);
    worst = std::max({worst, std::abs(back.pitch() - p.pitch()),
                      std::abs(back.roll() - p.roll())});
    const CameraIntrinsics square(k.fx(), k.fx(), k.cx(), k.cy());
    pitch_flat &= HorizonVpFromExtrinsics({p.pitch(), 0}, square).horizon.slope == 0.0;
    const HorizonObservation roll_only = HorizonVpFromExtrinsics({0, p.roll()}, square);
    decouple = std::max(decouple, std::abs(roll_only.vp.v - square.cy()));
  }
  o.Check(worst <= 1e-9, "round trip");
  o.Check(pitch_flat, "pitch changes horizon slope");
  o.Check(decouple <= 1e-9, "roll moves vanishing point row");
  o.Note("max angle error " + Fmt("%.2e", worst) + " rad over 10^4 samples");
  return o;
}

Outcome IouOracles() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> pos(-2, 2), dim(0.5, 4), yaw(-kPi, kPi);
  double worst = 0;
  for (int i = 0; i < 500; ++i) {
    const Box3D a{{pos(rng), 0, pos(rng)}, 1, dim(rng), dim(rng), yaw(rng)};
    const Box3D b{{pos(rng), 0, pos(rng)}, 1, dim(rng), dim(rng), yaw(rng)};
    worst = std::max(worst,
                     std::abs(IouBev(a, b) - testing::MonteCarloBevIou(a, b, 10000000)));
  }
  const Box3D s0{{0, 0, 0}, 1, 1, 1, 0}, s45{{0, 0, 0}, 1, 1, 1, kPi / 4};
  const double octagon = IouBev(s0, s45);
  const double mc_octagon = testing::MonteCarloBevIou(s0, s45, 10000000);
  const Box3D c{{0, 2, 0}, 2, 2, 2, 0};
  const double same = Iou3D(c, c);
  const double raised_full = Iou3D(c, {{0, 0, 0}, 2, 2, 2, 0});
  const double raised_half = Iou3D(c, {{0, 1, 0}, 2, 2, 2, 0});
  o.Check(worst <= 2e-3, "BEV vs Monte-Carlo");
  o.Check(std::abs(octagon - 1 / std::sqrt(2.0)) <= 1e-3 &&
              std::abs(mc_octagon - 1 / std::sqrt(2.0)) <= 1e-3,
          "45 degree squares");
  o.Check(std::abs(same - 1) <= 1e-12 && std::abs(raised_full) <= 1e-12 &&
              std::abs(raised_half - 1.0 / 3.0) <= 1e-12,
          "3D hand cases");
  o.Note("max |BEV - MC| " + Fmt("%.2e", worst) + " over 500 pairs, octagon " +
         Fmt("%.6f", octagon) + ", " + Fmt("%.1f", Seconds(start)) + " s");
  return o;
}

DetectionFrame SimpleFrame(int detections) {
  auto car = [](double left, std::optional<double> score) {
    ObjectLabel l;
    l.type = "Car";
    l.bbox = {left, 100, left + 100, 180};
    l.score = score;
    return l;
  };
  DetectionFrame f{"000000", {car(100, std::nullopt), car(400, std::nullopt)}, {}, {}};
  for (int i = 0; i < detections; ++i) f.detections.push_back(car(100, 0.9));
  return f;
}

Outcome ApOracle() {
  Outcome o;
  std::mt19937_64 rng(104);
  double worst = 0;
  int compared = 0;
  bool aos_ok = true;
  for (int i = 0; i < 200; ++i) {
    const auto frames = testing::RandomApInstance(rng, 5, 20);
    for (IouKind kind : {IouKind::k2D}) {
      for (DifficultyBin bin :
           {DifficultyBin::kEasy, DifficultyBin::kModerate, DifficultyBin::kHard}) {
        for (double thr : {0.5, 0.7}) {
          const ApResult ap = AveragePrecision40(frames, "Car", kind, thr, bin);
          const auto oracle = testing::BruteForceAp40(frames, "Car", kind, thr, bin);
          if (ap.value.has_value() != oracle.has_value()) {
            worst = INFINITY;
            continue;
          }
          if (!oracle) continue;
          ++compared;
          worst = std::max(worst, std::abs(*ap.value - *oracle));
          const ApResult aos = AverageOrientationSimilarity(frames, "Car", thr, bin);
          aos_ok &= *aos.value <= *ap.value + 1e-12;
        }
      }
    }
  }
  const DetectionFrame half = SimpleFrame(1);
  const double half_ap = *AveragePrecision40({&half, 1}, "Car", IouKind::k2D, 0.7,
                                             DifficultyBin::kModerate).value;
  o.Check(worst <= 1e-12, "sweep vs brute force");
  o.Check(half_ap == 50.0, "2-gt/1-TP case");
  o.Check(aos_ok, "AOS <= AP_2D");
  o.Note(std::to_string(compared) + " cells, max diff " + Fmt("%.2e", worst) +
         ", 2-gt/1-TP " + Fmt("%.1f", half_ap));
  return o;
}

struct CliRun {
  int code;
  std::string out, err;
};

CliRun Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

// AP_3D@0.5 per difficulty, in easy/moderate/hard order.
std::vector<std::optional<double>> Ap3d(const fs::path& gt, const fs::path& det) {
  const CliRun r = Cli({"evaluate", "--gt", gt.string(), "--det", det.string(),
                        "--metrics", "ap3d", "--thresholds", "0.5"});
  if (r.code != 0) throw std::runtime_error("evaluate failed: " + r.err);
  std::vector<std::optional<double>> values;
  const json report = json::parse(r.out);
  for (const json& row : report["rows"]) {
    values.push_back(row["value"].is_null() ? std::nullopt
                                            : std::optional(row["value"].get<double>()));
  }
  return values;
}

Outcome PerturbationProtocol() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  testing::TempDir dir("table2");
  testing::WriteSyntheticKitti(dir.path(), 60, 105);
  const CliRun sim = Cli({"simulate", "--labels", (dir / "label_2").string(),
                          "--calib", (dir / "calib").string(), "--output",
                          (dir / "sim").string(), "--seed", "2024"});
  o.Check(sim.code == 0, "simulate: " + sim.err);
  const CliRun rect = Cli({"rectify", "--det", (dir / "det").string(), "--calib",
                           (dir / "calib").string(), "--sidecar",
                           (dir / "sim" / "perturbations.jsonl").string(),
                           "--output", (dir / "rect").string()});
  o.Check(rect.code == 0, "rectify: " + rect.err);
  if (!o.pass) return o;

  const auto before = Ap3d(dir / "label_2", dir / "det");
  const auto disturbed = Ap3d(dir / "sim" / "label_2", dir / "det");
  const auto rectified = Ap3d(dir / "sim" / "label_2", dir / "rect" / "label_2");
  const char* names[] = {"easy", "moderate", "hard"};
  std::string summary;
  for (int i = 0; i < 3; ++i) {
    if (!before[i] || !disturbed[i] || !rectified[i]) {
      o.Check(false, std::string(names[i]) + " undefined");
      continue;
    }
    const double drop = *before[i] - *disturbed[i];
    o.Check(std::abs(*before[i] - 100) <= 1e-9, std::string(names[i]) + " baseline");
    o.Check(*disturbed[i] < 100 && drop >= 10,
            std::string(names[i]) + " drop " + Fmt("%.2f", drop));
    o.Check(std::abs(*rectified[i] - 100) <= 1e-9, std::string(names[i]) + " restored");
    summary += std::string(i ? ", " : "") + names[i] + " " + Fmt("%.2f", *disturbed[i]) +
               " -> " + Fmt("%.2f", *rectified[i]);
  }
  const double secs = Seconds(start);
  o.Check(secs < 30.0, "runtime");
  o.Note("AP_3D@0.5 disturbed -> rectified: " + summary + ", " + Fmt("%.2f", secs) + " s");
  return o;
}

Outcome LossKernels() {
  Outcome o;
  std::mt19937_64 rng(106);
  std::normal_distribution<double> n(0, 1);
  std::uniform_int_distribution<int> d(1, 4), big(1, 8);
  auto random = [&](int c, int h, int w) {
    FeatureTensor t(c, h, w);
    for (double& v : t.data()) v = n(rng);
    return t;
  };
  double gram_diff = 0;
  for (int i = 0; i < 200; ++i) {
    const FeatureTensor t = random(big(rng), big(rng), big(rng));
    gram_diff = std::max(gram_diff, (Gram(t) - GramByReshape(t)).cwiseAbs().maxCoeff());
  }
  GramMatrix expected(2, 2);
  expected << 2, 3, 3, 4.5;
  const FeatureTensor example(2, 1, 1, {2, 3});
  const bool gram_exact = Gram(example) == expected;
  const double style = StyleLoss(example, FeatureTensor(2, 1, 1));

  double worst = 0;
  const double step = 1e-4;
  for (int i = 0; i < 100; ++i) {
    std::vector<FeatureTensor> layers, styles;
    for (int m = 0; m < 3; ++m) {
      const int c = d(rng);
      layers.push_back(random(c, d(rng), d(rng)));
      styles.push_back(random(c, d(rng), d(rng)));
    }
    const FeatureTensor content =
        random(layers.back().c(), layers.back().h(), layers.back().w());
    const auto grads = LossGradients(layers, content, styles);
    for (size_t m = 0; m < layers.size(); ++m) {
      double diff = 0, scale = 0;
      for (size_t j = 0; j < layers[m].size(); ++j) {
        double& v = layers[m].data()[j];
        const double saved = v;
        v = saved + step;
        const double up = TotalLoss(layers, content, styles).total;
        v = saved - step;
        const double down = TotalLoss(layers, content, styles).total;
        v = saved;
        const double fd = (up - down) / (2 * step);
        diff = std::max(diff, std::abs(grads[m].data()[j] - fd));
        scale = std::max({scale, std::abs(grads[m].data()[j]), std::abs(fd)});
      }
      if (scale > 0) worst = std::max(worst, diff / scale);
    }
  }
  o.Check(gram_diff <= 1e-12, "gram forms");
  o.Check(gram_exact, "gram example");
  o.Check(style == 42.25, "style example");
  o.Check(worst < 1e-5, "gradients");
  o.Note("gram forms " + Fmt("%.2e", gram_diff) + ", style " + Fmt("%.2f", style) +
         ", max gradient rel. error " + Fmt("%.2e", worst));
  return o;
}

// Runs parse on n random inputs; counts anything other than a value or a
// camext::Error as a failure.
int Fuzz(const std::function<void(const std::string&)>& parse, uint64_t seed, int n,
         const std::string& prefix) {
  std::mt19937_64 rng(seed);
  const std::string alphabet = "0123456789.-+eE :\nCarP2R0_rectnaif \t\r{}\"";
  std::uniform_int_distribution<int> len(0, 256), byte(0, 255), mode_dist(0, 2);
  std::uniform_int_distribution<size_t> ch(0, alphabet.size() - 1);
  int failures = 0;
  for (int i = 0; i < n; ++i) {
    std::string s(len(rng), '\0');
    const int mode = mode_dist(rng);
    for (char& c : s) c = mode == 0 ? static_cast<char>(byte(rng)) : alphabet[ch(rng)];
    if (mode == 2) s = prefix.substr(0, s.size() % (prefix.size() + 1)) + s;
    try {
      parse(s);
    } catch (const Error&) {
    } catch (...) {
      ++failures;
    }
  }
  return failures;
}

bool Near(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a - b).cwiseAbs().maxCoeff() <= tol;
}

Outcome ParserRobustness() {
  Outcome o;
  const fs::path data = CAMEXT_TEST_DATA;
  // Labels: one write normalizes to the format quantum, after which the
  // text is a fixed point and values moved by at most half a quantum.
  for (const char* name : {"label_golden.txt", "detection_golden.txt"}) {
    const std::string in = testing::Slurp(data / name);
    const auto parsed = ParseLabelFile(in);
    const std::string once = WriteLabelFile(parsed);
    const auto again = ParseLabelFile(once);
    bool near = again.size() == parsed.size();
    for (size_t i = 0; near && i < parsed.size(); ++i) {
      near = std::abs(again[i].location.z - parsed[i].location.z) <= 5e-3 &&
             std::abs(again[i].bbox.left - parsed[i].bbox.left) <= 5e-3 &&
             std::abs(again[i].rotation_y - parsed[i].rotation_y) <= 5e-3;
    }
    o.Check(near && WriteLabelFile(again) == once, std::string(name) + " round trip");
  }
  o.Check(WriteLabelFile(ParseLabelFile(testing::Slurp(data / "label_golden.txt"))) ==
              testing::Slurp(data / "label_golden.expected.txt"),
          "label golden bytes");
  const CalibrationSet calib = ParseCalibFile(testing::Slurp(data / "calib_golden.txt"));
  const std::string calib_once = WriteCalibFile(calib);
  const CalibrationSet calib_again = ParseCalibFile(calib_once);
  bool calib_ok = WriteCalibFile(calib_again) == calib_once;
  for (int i = 0; i < 4; ++i) {
    calib_ok &= Near(*calib.projections[i], *calib_again.projections[i], 1e-2);
  }
  o.Check(calib_ok, "calib round trip");
  const auto poses = ParseOdometryPoses(testing::Slurp(data / "poses_golden.txt"));
  const std::string poses_once = WriteOdometryPoses(poses);
  const auto poses_again = ParseOdometryPoses(poses_once);
  bool poses_ok = WriteOdometryPoses(poses_again) == poses_once &&
                  poses_again.size() == poses.size();
  for (size_t i = 0; poses_ok && i < poses.size(); ++i) {
    poses_ok = Near(poses[i].rotation(), poses_again[i].rotation(), 1e-2) &&
               Near(poses[i].translation(), poses_again[i].translation(), 1e-2);
  }
  o.Check(poses_ok, "pose round trip");

  const int n = 100000;
  const std::string label_prefix =
      "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59\n";
  const std::string calib_prefix = "P2: 7.215377e+02 0 6.095593e+02 0 0 7.215377e+02 ";
  const std::string pose_prefix = "1 0 0 0 0 1 0 0 0 0 1 ";
  int failures = 0;
  failures += Fuzz([](const std::string& s) { ParseLabelFile(s); }, 1, n, label_prefix);
  failures += Fuzz([](const std::string& s) { ParseCalibFile(s); }, 2, n, calib_prefix);
  failures += Fuzz([](const std::string& s) { ParseOdometryPoses(s); }, 3, n, pose_prefix);
  failures += Fuzz([](const std::string& s) { ParseSidecar(s); }, 4, n,
                   "{\"frame_id\":\"000000\",\"pitch\":0.01,\"roll\":");
  failures += Fuzz([](const std::string& s) { DecodeNetpbm(s); }, 5, n, "P5\n4 4\n255\n");
  failures += Fuzz([](const std::string& s) { DecodeTensor(s); }, 6, n,
                   std::string("CXFT\x01\0\0\0\x01\0\0\0\x01\0\0\0", 16));
  o.Check(failures == 0, std::to_string(failures) + " unstructured failures");
  o.Note("goldens stable; 6 parsers x 10^5 fuzz inputs, " + std::to_string(failures) +
         " unstructured failures");
  return o;
}

Outcome Determinism() {
  Outcome o;
  testing::TempDir dir("determinism");
  testing::WriteSyntheticKitti(dir.path(), 20, 107);
  auto snapshot = [](const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = testing::Slurp(e.path());
    }
    return files;
  };
  auto simulate = [&](const std::string& out, const std::string& jobs) {
    return Cli({"simulate", "--labels", (dir / "label_2").string(), "--calib",
                (dir / "calib").string(), "--output", (dir / out).string(), "--seed",
                "77", "--jobs", jobs});
  };
  o.Check(simulate("a", "1").code == 0 && simulate("b", "1").code == 0 &&
              simulate("c", "4").code == 0,
          "simulate exit code");
  const auto a = snapshot(dir / "a");
  o.Check(a == snapshot(dir / "b"), "simulate repeat");
  o.Check(a == snapshot(dir / "c"), "simulate jobs 1 vs 4");
  auto evaluate = [&](const std::string& jobs) {
    return Cli({"evaluate", "--gt", (dir / "a" / "label_2").string(), "--det",
                (dir / "det").string(), "--metrics", "ap2d,apbev,ap3d,aos,nuscenes",
                "--thresholds", "0.5,0.7", "--jobs", jobs})
        .out;
  };
  const std::string e1 = evaluate("1");
  o.Check(!e1.empty() && e1 == evaluate("1"), "evaluate repeat");
  o.Check(e1 == evaluate("4"), "evaluate jobs 1 vs 4");
  o.Note(std::to_string(a.size()) + " simulate artifacts and the evaluate report byte-identical");
  return o;
}

Outcome AngularErrorMetric() {
  Outcome o;
  testing::TempDir dir("pose");
  std::string poses, estimates;
  for (int i = 0; i <= 100; ++i) {
    char line[128];
    std::snprintf(line, sizeof(line), "1 0 0 0 0 1 0 0 0 0 1 %d\n", i);
    poses += line;
    std::snprintf(line, sizeof(line),
                  "{\"frame_id\":\"%06d\",\"pitch\":0.1,\"roll\":0}\n", i);
    estimates += line;
  }
  testing::Spit(dir / "poses.txt", poses);
  testing::Spit(dir / "est.jsonl", estimates);
  const CliRun r = Cli({"pose-error", "--estimates", (dir / "est.jsonl").string(),
                        "--poses", (dir / "poses.txt").string()});
  o.Check(r.code == 0, "pose-error: " + r.err);
  if (!o.pass) return o;
  const double value = json::parse(r.out)["deg_per_m"].get<double>();
  const double derived = 0.1 * 180 / kPi / 100;
  o.Check(std::abs(value - derived) <= 1e-6, "deg/m");
  o.Check(Fmt("%.4f", value) == "0.0573", "rounded value");
  o.Note("deg/m " + Fmt("%.9f", value) + " (0.0573 at 4 decimals)");
  return o;
}

}  // namespace
}  // namespace camext

int main() {
  using camext::Outcome;
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "geometry suite", camext::GeometrySuite},
      {2, "literal perturbation matrix singular, canonical orthogonal",
       camext::LiteralMatrixCheck},
      {3, "horizon/vanishing-point round trip", camext::HorizonRoundTrip},
      {4, "IoU oracles", camext::IouOracles},
      {5, "AP40 sweep equals brute force", camext::ApOracle},
      {6, "perturbation protocol: drop then restore AP_3D", camext::PerturbationProtocol},
      {7, "loss kernels", camext::LossKernels},
      {8, "parser robustness", camext::ParserRobustness},
      {9, "determinism", camext::Determinism},
      {10, "angular error per meter", camext::AngularErrorMetric},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
