#include "camext/loss_kernel.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>

#include <nlohmann/json.hpp>

#include "camext/error.h"

namespace camext {

namespace {

constexpr char kMagic[4] = {'C', 'X', 'F', 'T'};

void CheckShape(int c, int h, int w, size_t n) {
  if (c < 1 || h < 1 || w < 1) {
    throw Error(ErrorCode::kInvalidArgument, "tensor dimensions must be >= 1");
  }
  if (n != static_cast<size_t>(c) * h * w) {
    throw Error(ErrorCode::kShapeMismatch, "data size does not match c*h*w");
  }
}

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t GetU32(std::string_view bytes, size_t pos) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  return v;
}

// Throws unless the layer and target lists agree in count and shape.
void CheckLayers(std::span<const FeatureTensor> layers,
                 const FeatureTensor& content_target,
                 std::span<const FeatureTensor> style_targets) {
  if (layers.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "at least one layer is required");
  }
  if (style_targets.size() != layers.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "got " + std::to_string(style_targets.size()) +
                    " style targets for " + std::to_string(layers.size()) +
                    " layers");
  }
  if (!layers.back().SameShape(content_target)) {
    throw Error(ErrorCode::kShapeMismatch,
                "content layer " + layers.back().ShapeString() +
                    " vs target " + content_target.ShapeString());
  }
  for (size_t m = 0; m < layers.size(); ++m) {
    if (layers[m].c() != style_targets[m].c()) {
      throw Error(ErrorCode::kChannelMismatch,
                  "layer " + std::to_string(m) + ": " +
                      layers[m].ShapeString() + " vs style target " +
                      style_targets[m].ShapeString());
    }
  }
}

}  // namespace

FeatureTensor::FeatureTensor(int c, int h, int w, double value)
    : FeatureTensor(c, h, w,
                    std::vector<double>(c > 0 && h > 0 && w > 0
                                            ? static_cast<size_t>(c) * h * w
                                            : 0,
                                        value)) {}

FeatureTensor::FeatureTensor(int c, int h, int w, std::vector<double> data)
    : c_(c), h_(h), w_(w), data_(std::move(data)) {
  CheckShape(c, h, w, data_.size());
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFiniteValue, "tensor samples must be finite");
    }
  }
}

std::string FeatureTensor::ShapeString() const {
  return "(" + std::to_string(c_) + ", " + std::to_string(h_) + ", " +
         std::to_string(w_) + ")";
}

GramMatrix Gram(const FeatureTensor& t) {
  const size_t spatial = static_cast<size_t>(t.h()) * t.w();
  const long double norm = static_cast<long double>(t.size());
  const auto data = t.data();
  GramMatrix g(t.c(), t.c());
  for (int a = 0; a < t.c(); ++a) {
    const double* ra = data.data() + a * spatial;
    for (int b = a; b < t.c(); ++b) {
      const double* rb = data.data() + b * spatial;
      long double sum = 0.0L;
      for (size_t i = 0; i < spatial; ++i) {
        sum += static_cast<long double>(ra[i]) * rb[i];
      }
      g(a, b) = g(b, a) = static_cast<double>(sum / norm);
    }
  }
  return g;
}

GramMatrix GramByReshape(const FeatureTensor& t) {
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      psi(t.data().data(), t.c(), static_cast<Eigen::Index>(t.h()) * t.w());
  return psi * psi.transpose() / static_cast<double>(t.size());
}

double ContentLoss(const FeatureTensor& out, const FeatureTensor& target) {
  if (!out.SameShape(target)) {
    throw Error(ErrorCode::kShapeMismatch,
                out.ShapeString() + " vs " + target.ShapeString());
  }
  long double sum = 0.0L;
  const auto a = out.data(), b = target.data();
  for (size_t i = 0; i < a.size(); ++i) {
    const long double d = static_cast<long double>(a[i]) - b[i];
    sum += d * d;
  }
  return static_cast<double>(sum / a.size());
}

double StyleLoss(const FeatureTensor& in, const FeatureTensor& style_target) {
  if (in.c() != style_target.c()) {
    throw Error(ErrorCode::kChannelMismatch,
                in.ShapeString() + " vs " + style_target.ShapeString());
  }
  const GramMatrix diff = Gram(in) - Gram(style_target);
  long double sum = 0.0L;
  for (Eigen::Index i = 0; i < diff.size(); ++i) {
    sum += static_cast<long double>(diff.data()[i]) * diff.data()[i];
  }
  return static_cast<double>(sum);
}

LossBreakdown TotalLoss(std::span<const FeatureTensor> layers,
                        const FeatureTensor& content_target,
                        std::span<const FeatureTensor> style_targets,
                        const LossWeights& weights) {
  CheckLayers(layers, content_target, style_targets);
  LossBreakdown loss;
  loss.content = ContentLoss(layers.back(), content_target);
  for (size_t m = 0; m < layers.size(); ++m) {
    loss.style += StyleLoss(layers[m], style_targets[m]);
  }
  loss.total = weights.content * loss.content + weights.style * loss.style;
  return loss;
}

std::vector<FeatureTensor> LossGradients(
    std::span<const FeatureTensor> layers, const FeatureTensor& content_target,
    std::span<const FeatureTensor> style_targets, const LossWeights& weights) {
  CheckLayers(layers, content_target, style_targets);
  std::vector<FeatureTensor> grads;
  grads.reserve(layers.size());
  for (size_t m = 0; m < layers.size(); ++m) {
    const FeatureTensor& out = layers[m];
    FeatureTensor grad(out.c(), out.h(), out.w());
    const double n = static_cast<double>(out.size());
    const size_t spatial = static_cast<size_t>(out.h()) * out.w();
    if (weights.style != 0.0) {
      const GramMatrix diff = Gram(out) - Gram(style_targets[m]);
      const auto src = out.data();
      auto dst = grad.data();
      for (int a = 0; a < out.c(); ++a) {
        for (size_t i = 0; i < spatial; ++i) {
          double acc = 0.0;
          for (int b = 0; b < out.c(); ++b) acc += diff(a, b) * src[b * spatial + i];
          dst[a * spatial + i] = weights.style * 4.0 * acc / n;
        }
      }
    }
    if (m + 1 == layers.size() && weights.content != 0.0) {
      const auto a = out.data(), b = content_target.data();
      auto dst = grad.data();
      for (size_t i = 0; i < a.size(); ++i) {
        dst[i] += weights.content * 2.0 * (a[i] - b[i]) / n;
      }
    }
    grads.push_back(std::move(grad));
  }
  return grads;
}

std::string EncodeTensor(const FeatureTensor& t) {
  std::string out(kMagic, 4);
  PutU32(out, static_cast<uint32_t>(t.c()));
  PutU32(out, static_cast<uint32_t>(t.h()));
  PutU32(out, static_cast<uint32_t>(t.w()));
  for (double v : t.data()) {
    PutU32(out, std::bit_cast<uint32_t>(static_cast<float>(v)));
  }
  return out;
}

FeatureTensor DecodeTensor(std::string_view bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kMalformedLine, "not a CXFT tensor container");
  }
  const uint32_t c = GetU32(bytes, 4), h = GetU32(bytes, 8), w = GetU32(bytes, 12);
  if (c == 0 || h == 0 || w == 0 || c > (1u << 20) || h > (1u << 20) ||
      w > (1u << 20)) {
    throw Error(ErrorCode::kMalformedLine, "bad tensor dimensions");
  }
  const uint64_t count = static_cast<uint64_t>(c) * h * w;
  if ((bytes.size() - 16) / 4 != count || (bytes.size() - 16) % 4 != 0) {
    throw Error(ErrorCode::kMalformedLine,
                "payload holds " + std::to_string((bytes.size() - 16) / 4) +
                    " samples, header says " + std::to_string(count));
  }
  std::vector<double> data(count);
  for (uint64_t i = 0; i < count; ++i) {
    data[i] = std::bit_cast<float>(GetU32(bytes, 16 + 4 * i));
  }
  return FeatureTensor(static_cast<int>(c), static_cast<int>(h),
                       static_cast<int>(w), std::move(data));
}

std::string TensorMetadataJson(const FeatureTensor& t) {
  nlohmann::ordered_json j;
  j["format"] = "CXFT";
  j["c"] = t.c();
  j["h"] = t.h();
  j["w"] = t.w();
  j["dtype"] = "float32";
  j["byte_order"] = "little";
  j["layout"] = "chw";
  return j.dump(2) + "\n";
}

}  // namespace camext
