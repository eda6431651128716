#ifndef CAMEXT_LOSS_KERNEL_H_
#define CAMEXT_LOSS_KERNEL_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace camext {

// Dense channels x height x width activations, channel-major.
class FeatureTensor {
 public:
  FeatureTensor(int c, int h, int w, double value = 0.0);
  FeatureTensor(int c, int h, int w, std::vector<double> data);

  int c() const { return c_; }
  int h() const { return h_; }
  int w() const { return w_; }
  size_t size() const { return data_.size(); }
  std::string ShapeString() const;

  double operator()(int ch, int y, int x) const {
    return data_[(static_cast<size_t>(ch) * h_ + y) * w_ + x];
  }
  double& operator()(int ch, int y, int x) {
    return data_[(static_cast<size_t>(ch) * h_ + y) * w_ + x];
  }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool SameShape(const FeatureTensor& o) const {
    return c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
  }

 private:
  int c_, h_, w_;
  std::vector<double> data_;
};

using GramMatrix = Eigen::MatrixXd;

// G[a, b] = sum_{y, x} t[a, y, x] * t[b, y, x] / (c * h * w), accumulated in
// long double.
GramMatrix Gram(const FeatureTensor& t);

// Same quantity as psi * psi^T / (c * h * w) with psi the c x (h * w)
// reshape of t.
GramMatrix GramByReshape(const FeatureTensor& t);

// ||out - target||^2 / (c * h * w). Throws kShapeMismatch.
double ContentLoss(const FeatureTensor& out, const FeatureTensor& target);

// ||Gram(in) - Gram(style)||_F^2. Spatial sizes may differ; throws
// kChannelMismatch when channel counts differ.
double StyleLoss(const FeatureTensor& in, const FeatureTensor& style_target);

struct LossWeights {
  double content = 1.0;  // gamma_1
  double style = 1.0;    // gamma_2
};

struct LossBreakdown {
  double content = 0.0;
  double style = 0.0;  // summed over layers
  double total = 0.0;
};

// `layers` holds the loss-network activations of the output, shallow to
// deep. Content is measured on the last layer only; style_targets[m] is
// compared against layers[m] and summed.
LossBreakdown TotalLoss(std::span<const FeatureTensor> layers,
                        const FeatureTensor& content_target,
                        std::span<const FeatureTensor> style_targets,
                        const LossWeights& weights = {});

// Closed-form dL/d layers[m], one tensor per layer:
//   content: 2 (out - target) / (c h w) on the last layer
//   style:   4 (G_out - G_target) psi / (c h w) on every layer
std::vector<FeatureTensor> LossGradients(
    std::span<const FeatureTensor> layers, const FeatureTensor& content_target,
    std::span<const FeatureTensor> style_targets,
    const LossWeights& weights = {});

// Binary container: "CXFT", then little-endian uint32 c, h, w, then c*h*w
// little-endian float32 samples in channel-major order.
std::string EncodeTensor(const FeatureTensor& t);
FeatureTensor DecodeTensor(std::string_view bytes);
// JSON metadata written next to a container.
std::string TensorMetadataJson(const FeatureTensor& t);

}  // namespace camext

#endif  // CAMEXT_LOSS_KERNEL_H_
