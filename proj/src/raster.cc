#include "camext/raster.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "camext/error.h"

namespace camext {

namespace {

// Reads one whitespace-delimited header integer, skipping '#' comments.
int ReadHeaderInt(std::string_view bytes, size_t& pos) {
  for (;;) {
    while (pos < bytes.size() &&
           std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    }
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  long value = 0;
  size_t digits = 0;
  while (pos < bytes.size() &&
         std::isdigit(static_cast<unsigned char>(bytes[pos])) && digits < 9) {
    value = value * 10 + (bytes[pos] - '0');
    ++pos;
    ++digits;
  }
  if (digits == 0) {
    throw Error(ErrorCode::kMalformedLine, "bad netpbm header");
  }
  return static_cast<int>(value);
}

}  // namespace

RasterImage::RasterImage(int width, int height, int channels, uint8_t value)
    : RasterImage(width, height, channels,
                  std::vector<uint8_t>(static_cast<size_t>(width > 0 ? width : 0) *
                                           (height > 0 ? height : 0) *
                                           (channels > 0 ? channels : 0),
                                       value)) {}

RasterImage::RasterImage(int width, int height, int channels,
                         std::vector<uint8_t> samples)
    : width_(width),
      height_(height),
      channels_(channels),
      samples_(std::move(samples)) {
  if (width <= 0 || height <= 0 || (channels != 1 && channels != 3)) {
    throw Error(ErrorCode::kInvalidArgument, "bad image shape");
  }
  if (samples_.size() != static_cast<size_t>(width) * height * channels) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample count does not match width*height*channels");
  }
}

RasterImage DecodeNetpbm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw Error(ErrorCode::kMalformedLine, "expected P5 or P6 magic");
  }
  const int channels = bytes[1] == '5' ? 1 : 3;
  size_t pos = 2;
  const int width = ReadHeaderInt(bytes, pos);
  const int height = ReadHeaderInt(bytes, pos);
  const int maxval = ReadHeaderInt(bytes, pos);
  if (width <= 0 || height <= 0 || maxval != 255) {
    throw Error(ErrorCode::kMalformedLine,
                "unsupported netpbm size or maxval (need 8-bit)");
  }
  if (pos >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw Error(ErrorCode::kMalformedLine, "missing separator after header");
  }
  ++pos;
  const size_t count = static_cast<size_t>(width) * height * channels;
  if (bytes.size() - pos < count) {
    throw Error(ErrorCode::kMalformedLine, "truncated netpbm pixel data");
  }
  std::vector<uint8_t> samples(bytes.begin() + pos, bytes.begin() + pos + count);
  return RasterImage(width, height, channels, std::move(samples));
}

std::string EncodeNetpbm(const RasterImage& img) {
  std::string out = img.channels() == 1 ? "P5\n" : "P6\n";
  out += std::to_string(img.width()) + " " + std::to_string(img.height()) +
         "\n255\n";
  out.append(img.samples().begin(), img.samples().end());
  return out;
}

RasterImage WarpImage(const RasterImage& img, const Homography& h,
                      uint8_t fill) {
  const Eigen::Matrix3d inv = h.matrix().inverse();
  const int w = img.width(), ht = img.height(), ch = img.channels();
  RasterImage out(w, ht, ch, fill);
  auto sample = [&](long x, long y, int c) -> double {
    if (x < 0 || y < 0 || x >= w || y >= ht) return fill;
    return img.at(static_cast<int>(x), static_cast<int>(y), c);
  };
  for (int v = 0; v < ht; ++v) {
    for (int u = 0; u < w; ++u) {
      const Eigen::Vector3d q = inv * Eigen::Vector3d(u, v, 1.0);
      if (!(q.z() > 0.0)) continue;
      const double sx = q.x() / q.z(), sy = q.y() / q.z();
      if (!(sx > -1.0 && sy > -1.0 && sx < w && sy < ht)) continue;
      const double fx0 = std::floor(sx), fy0 = std::floor(sy);
      const long x0 = static_cast<long>(fx0), y0 = static_cast<long>(fy0);
      const double ax = sx - fx0, ay = sy - fy0;
      for (int c = 0; c < ch; ++c) {
        const double top =
            (1.0 - ax) * sample(x0, y0, c) + ax * sample(x0 + 1, y0, c);
        const double bottom = (1.0 - ax) * sample(x0, y0 + 1, c) +
                              ax * sample(x0 + 1, y0 + 1, c);
        const double value = (1.0 - ay) * top + ay * bottom;
        out.at(u, v, c) =
            static_cast<uint8_t>(std::lround(std::clamp(value, 0.0, 255.0)));
      }
    }
  }
  return out;
}

}  // namespace camext
