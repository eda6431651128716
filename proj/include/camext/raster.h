#ifndef CAMEXT_RASTER_H_
#define CAMEXT_RASTER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "camext/geometry.h"

namespace camext {

// 8-bit row-major image with 1 (gray) or 3 (RGB) interleaved channels.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, int channels, uint8_t value = 0);
  RasterImage(int width, int height, int channels,
              std::vector<uint8_t> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  const std::vector<uint8_t>& samples() const { return samples_; }

  uint8_t at(int x, int y, int c) const {
    return samples_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }
  uint8_t& at(int x, int y, int c) {
    return samples_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }

  bool operator==(const RasterImage&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<uint8_t> samples_;
};

// Binary PGM (P5) or PPM (P6) with maxval 255.
RasterImage DecodeNetpbm(std::string_view bytes);
std::string EncodeNetpbm(const RasterImage& img);

// Output pixel (u, v) samples the input at H^-1 (u, v, 1) bilinearly;
// neighbors outside the input contribute `fill`.
RasterImage WarpImage(const RasterImage& img, const Homography& h,
                      uint8_t fill = 0);

}  // namespace camext

#endif  // CAMEXT_RASTER_H_
