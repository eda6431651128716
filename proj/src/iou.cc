#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "camext/error.h"
#include "camext/eval_metrics.h"

namespace camext {

namespace {

double Cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

double SignedArea(std::span<const Eigen::Vector2d> poly) {
  double twice = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    twice += Cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * twice;
}

void CheckFootprint(const Box3D& b) {
  if (!(b.w * b.l >= 1e-12)) {
    throw Error(ErrorCode::kDegenerateBox,
                "footprint area " + std::to_string(b.w * b.l));
  }
}

}  // namespace

double Iou2D(const BBox2D& a, const BBox2D& b) {
  const double iw = std::min(a.right, b.right) - std::max(a.left, b.left);
  const double ih = std::min(a.bottom, b.bottom) - std::max(a.top, b.top);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.Area() + b.Area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::array<Eigen::Vector2d, 4> BevFootprint(const Box3D& b) {
  const auto corners = BoxCorners(b);
  std::array<Eigen::Vector2d, 4> poly;
  for (int i = 0; i < 4; ++i) poly[i] = {corners[i].x, corners[i].z};
  if (SignedArea(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  return poly;
}

double ConvexIntersectionArea(std::span<const Eigen::Vector2d> subject,
                              std::span<const Eigen::Vector2d> clip) {
  std::vector<Eigen::Vector2d> out(subject.begin(), subject.end());
  std::vector<Eigen::Vector2d> in;
  for (size_t e = 0; e < clip.size() && !out.empty(); ++e) {
    const Eigen::Vector2d& c0 = clip[e];
    const Eigen::Vector2d edge = clip[(e + 1) % clip.size()] - c0;
    in.swap(out);
    out.clear();
    for (size_t i = 0; i < in.size(); ++i) {
      const Eigen::Vector2d& p = in[i];
      const Eigen::Vector2d& q = in[(i + 1) % in.size()];
      const double sp = Cross(edge, p - c0);
      const double sq = Cross(edge, q - c0);
      if (sp >= 0.0) out.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        const double t = sp / (sp - sq);
        out.push_back(p + t * (q - p));
      }
    }
  }
  return out.size() < 3 ? 0.0 : std::abs(SignedArea(out));
}

double IouBev(const Box3D& a, const Box3D& b) {
  CheckFootprint(a);
  CheckFootprint(b);
  const auto pa = BevFootprint(a);
  const auto pb = BevFootprint(b);
  const double inter = ConvexIntersectionArea(pa, pb);
  const double uni = a.w * a.l + b.w * b.l - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double Iou3D(const Box3D& a, const Box3D& b) {
  CheckFootprint(a);
  CheckFootprint(b);
  const double vol_a = a.h * a.w * a.l, vol_b = b.h * b.w * b.l;
  if (!(vol_a >= 1e-12) || !(vol_b >= 1e-12)) {
    throw Error(ErrorCode::kDegenerateBox, "box volume below 1e-12");
  }
  const double overlap_h = std::min(a.center.y, b.center.y) -
                           std::max(a.center.y - a.h, b.center.y - b.h);
  if (overlap_h <= 0.0) return 0.0;
  const auto pa = BevFootprint(a);
  const auto pb = BevFootprint(b);
  const double inter = ConvexIntersectionArea(pa, pb) * overlap_h;
  return std::clamp(inter / (vol_a + vol_b - inter), 0.0, 1.0);
}

double AlignedIou(const Box3D& a, const Box3D& b) {
  const double inter = std::min(a.h, b.h) * std::min(a.w, b.w) *
                       std::min(a.l, b.l);
  const double uni = a.h * a.w * a.l + b.h * b.w * b.l - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace camext
