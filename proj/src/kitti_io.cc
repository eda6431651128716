#include "camext/kitti_io.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "camext/error.h"

namespace camext {

namespace {

constexpr double kAngleSlack = 1e-2;

// Splits text into lines and each line into whitespace-separated tokens.
// Blank lines are skipped but still advance the line counter.
template <typename Fn>
void ForEachLine(std::string_view text, Fn&& fn) {
  int line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    std::vector<std::string_view> tokens;
    size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    if (!tokens.empty()) fn(line_no, tokens);
    pos = end + 1;
  }
}

double ParseNumber(std::string_view token, int line_no, const char* field) {
  std::string_view t = token;
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec == std::errc::result_out_of_range) {
    throw ParseError(ErrorCode::kNonFiniteValue, line_no,
                     std::string(field) + " out of range: '" +
                         std::string(token) + "'");
  }
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ParseError(ErrorCode::kMalformedLine, line_no,
                     std::string(field) + " is not a number: '" +
                         std::string(token) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(ErrorCode::kNonFiniteValue, line_no,
                     std::string(field) + " is not finite: '" +
                         std::string(token) + "'");
  }
  return value;
}

void Require(bool ok, int line_no, const std::string& what) {
  if (!ok) throw ParseError(ErrorCode::kMalformedLine, line_no, what);
}

bool IsAngle(double a) {
  return std::abs(a) <= std::numbers::pi + kAngleSlack;
}

std::string FormatFixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string FormatSci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

constexpr const char* kProjectionKeys[4] = {"P0", "P1", "P2", "P3"};

template <int R, int C>
Eigen::Matrix<double, R, C> RowMajor(const std::vector<double>& v) {
  Eigen::Matrix<double, R, C> m;
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < C; ++c) m(r, c) = v[r * C + c];
  }
  return m;
}

template <typename M>
void AppendRowMajor(std::string& out, const M& m) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      out += ' ';
      out += FormatSci(m(r, c));
    }
  }
}

}  // namespace

std::vector<ObjectLabel> ParseLabelFile(std::string_view text) {
  static constexpr const char* kFields[16] = {
      "truncated", "occluded", "alpha", "left",  "top",  "right",
      "bottom",    "height",   "width", "length", "x",   "y",
      "z",         "rotation_y", "score", ""};
  std::vector<ObjectLabel> labels;
  ForEachLine(text, [&](int line_no, const std::vector<std::string_view>& tok) {
    Require(tok.size() == 15 || tok.size() == 16, line_no,
            "expected 15 or 16 fields, got " + std::to_string(tok.size()) +
                " (first token '" + std::string(tok.front()) + "')");
    double v[15];
    for (size_t i = 1; i < tok.size(); ++i) {
      v[i - 1] = ParseNumber(tok[i], line_no, kFields[i - 1]);
    }
    ObjectLabel label;
    label.type = std::string(tok[0]);
    label.truncated = v[0];
    Require(v[1] == std::floor(v[1]) && std::abs(v[1]) < 1e6, line_no,
            "occluded must be an integer, got '" + std::string(tok[2]) + "'");
    label.occluded = static_cast<int>(v[1]);
    label.alpha = v[2];
    label.bbox = {v[3], v[4], v[5], v[6]};
    label.h = v[7];
    label.w = v[8];
    label.l = v[9];
    label.location = {v[10], v[11], v[12]};
    label.rotation_y = v[13];
    if (tok.size() == 16) label.score = v[14];

    Require(label.bbox.right > label.bbox.left &&
                label.bbox.bottom > label.bbox.top,
            line_no, "bbox must satisfy right > left and bottom > top");
    // DontCare rows use sentinel values (-1, -10, -1000) for 3D fields.
    if (!label.IsDontCare()) {
      Require(label.truncated >= 0.0 && label.truncated <= 1.0, line_no,
              "truncated outside [0, 1]");
      Require(label.occluded >= 0 && label.occluded <= 3, line_no,
              "occluded outside {0, 1, 2, 3}");
      Require(label.h > 0.0 && label.w > 0.0 && label.l > 0.0, line_no,
              "dimensions must be positive");
      Require(IsAngle(label.alpha) && IsAngle(label.rotation_y), line_no,
              "alpha and rotation_y must lie in [-pi, pi]");
    }
    labels.push_back(std::move(label));
  });
  return labels;
}

std::string WriteLabelFile(const std::vector<ObjectLabel>& labels,
                           int decimals) {
  std::string out;
  for (const ObjectLabel& l : labels) {
    out += l.type;
    out += ' ' + FormatFixed(l.truncated, decimals);
    out += ' ' + std::to_string(l.occluded);
    const double rest[] = {l.alpha,      l.bbox.left,   l.bbox.top,
                           l.bbox.right, l.bbox.bottom, l.h,
                           l.w,          l.l,           l.location.x,
                           l.location.y, l.location.z,  l.rotation_y};
    for (double v : rest) out += ' ' + FormatFixed(v, decimals);
    if (l.score) out += ' ' + FormatFixed(*l.score, decimals);
    out += '\n';
  }
  return out;
}

CameraIntrinsics CalibrationSet::Intrinsics() const {
  const auto& p = p2();
  return CameraIntrinsics(p(0, 0), p(1, 1), p(0, 2), p(1, 2), p(0, 1));
}

CalibrationSet ParseCalibFile(std::string_view text) {
  CalibrationSet calib;
  ForEachLine(text, [&](int line_no, const std::vector<std::string_view>& tok) {
    std::string_view key = tok[0];
    Require(key.size() > 1 && key.back() == ':', line_no,
            "expected 'KEY:' prefix, got '" + std::string(key) + "'");
    key.remove_suffix(1);
    std::vector<double> values;
    for (size_t i = 1; i < tok.size(); ++i) {
      values.push_back(ParseNumber(tok[i], line_no, "value"));
    }
    for (int i = 0; i < 4; ++i) {
      if (key == kProjectionKeys[i]) {
        Require(values.size() == 12, line_no,
                std::string(key) + " needs 12 values, got " +
                    std::to_string(values.size()));
        calib.projections[i] = RowMajor<3, 4>(values);
        return;
      }
    }
    if (key == "R0_rect" || key == "R_rect") {
      Require(values.size() == 9, line_no,
              "R0_rect needs 9 values, got " + std::to_string(values.size()));
      calib.rectification = RowMajor<3, 3>(values);
    } else if (key == "Tr_velo_to_cam" || key == "Tr_velo_cam") {
      Require(values.size() == 12, line_no,
              "Tr_velo_to_cam needs 12 values, got " +
                  std::to_string(values.size()));
      calib.velo_to_cam = RowMajor<3, 4>(values);
    } else {
      calib.extra.emplace_back(std::string(key), std::move(values));
    }
  });
  if (!calib.projections[2]) {
    throw Error(ErrorCode::kMissingKey, "P2");
  }
  const auto& p = calib.p2();
  if (!(p(0, 0) > 0.0 && p(1, 1) > 0.0)) {
    throw Error(ErrorCode::kMalformedLine,
                "P2 must have positive focal lengths on its diagonal");
  }
  return calib;
}

std::string WriteCalibFile(const CalibrationSet& calib) {
  std::string out;
  for (int i = 0; i < 4; ++i) {
    if (!calib.projections[i]) continue;
    out += std::string(kProjectionKeys[i]) + ":";
    AppendRowMajor(out, *calib.projections[i]);
    out += '\n';
  }
  if (calib.rectification) {
    out += "R0_rect:";
    AppendRowMajor(out, *calib.rectification);
    out += '\n';
  }
  if (calib.velo_to_cam) {
    out += "Tr_velo_to_cam:";
    AppendRowMajor(out, *calib.velo_to_cam);
    out += '\n';
  }
  for (const auto& [key, values] : calib.extra) {
    out += key + ":";
    for (double v : values) out += ' ' + FormatSci(v);
    out += '\n';
  }
  return out;
}

std::string CalibFileForIntrinsics(const CameraIntrinsics& k) {
  CalibrationSet calib;
  Eigen::Matrix<double, 3, 4> p = Eigen::Matrix<double, 3, 4>::Zero();
  p.leftCols<3>() = k.Matrix();
  calib.projections[2] = p;
  return WriteCalibFile(calib);
}

std::vector<OdometryPose> ParseOdometryPoses(std::string_view text) {
  std::vector<OdometryPose> poses;
  ForEachLine(text, [&](int line_no, const std::vector<std::string_view>& tok) {
    Require(tok.size() == 12, line_no,
            "expected 12 values, got " + std::to_string(tok.size()));
    std::vector<double> values;
    for (const auto& t : tok) values.push_back(ParseNumber(t, line_no, "pose"));
    OdometryPose pose;
    pose.transform = RowMajor<3, 4>(values);
    pose.frame_index = static_cast<int>(poses.size());
    const Eigen::Matrix3d r = pose.rotation();
    const double err =
        (r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (!(err <= 1e-6) || r.determinant() < 0.0) {
      throw ParseError(ErrorCode::kNotARotation, line_no,
                       "rotation block off by " + std::to_string(err));
    }
    poses.push_back(pose);
  });
  return poses;
}

std::string WriteOdometryPoses(const std::vector<OdometryPose>& poses) {
  std::string out;
  for (const OdometryPose& pose : poses) {
    std::string line;
    AppendRowMajor(line, pose.transform);
    out += line.substr(1);
    out += '\n';
  }
  return out;
}

DifficultyBin DifficultyOf(const ObjectLabel& label) {
  const double height = label.bbox.Height();
  for (int i = 0; i < 3; ++i) {
    const auto& t = kDifficultyThresholds[i];
    if (height >= t.min_height && label.occluded <= t.max_occlusion &&
        label.truncated <= t.max_truncation) {
      return static_cast<DifficultyBin>(i);
    }
  }
  return DifficultyBin::kIgnored;
}

const char* DifficultyName(DifficultyBin bin) {
  switch (bin) {
    case DifficultyBin::kEasy: return "easy";
    case DifficultyBin::kModerate: return "moderate";
    case DifficultyBin::kHard: return "hard";
    case DifficultyBin::kIgnored: return "ignored";
  }
  return "ignored";
}

std::optional<DifficultyBin> ParseDifficulty(std::string_view name) {
  for (int i = 0; i < 4; ++i) {
    const auto bin = static_cast<DifficultyBin>(i);
    if (name == DifficultyName(bin)) return bin;
  }
  return std::nullopt;
}

}  // namespace camext
