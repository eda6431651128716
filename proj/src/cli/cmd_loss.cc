#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "camext/cli.h"
#include "camext/error.h"
#include "camext/loss_kernel.h"
#include "commands.h"
#include "dataset.h"

namespace camext::cli {

namespace {

// At most this many entries per layer are perturbed in the gradient check;
// larger layers are sampled at a fixed stride.
constexpr size_t kMaxCheckedEntries = 256;

FeatureTensor LoadTensor(const std::string& path) {
  RequireFile(path, "tensor");
  try {
    return DecodeTensor(ReadFile(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(ErrorCode::kMalformedLine, path + ": " + e.what());
  }
}

struct GradCheck {
  double max_relative_error = 0.0;
  size_t entries = 0;
};

// Norm-wise relative error max|a - f| / max(|a|_inf, |f|_inf) between the
// closed-form gradient a and central differences f.
GradCheck CheckGradients(std::vector<FeatureTensor> layers,
                         const FeatureTensor& content,
                         std::span<const FeatureTensor> styles,
                         const LossWeights& w, double step) {
  const std::vector<FeatureTensor> analytic =
      LossGradients(layers, content, styles, w);
  double max_diff = 0.0, max_a = 0.0, max_f = 0.0;
  GradCheck out;
  for (size_t m = 0; m < layers.size(); ++m) {
    const size_t n = layers[m].size();
    const size_t stride = std::max<size_t>(1, n / kMaxCheckedEntries);
    for (size_t i = 0; i < n; i += stride) {
      double& x = layers[m].data()[i];
      const double saved = x;
      x = saved + step;
      const double up = TotalLoss(layers, content, styles, w).total;
      x = saved - step;
      const double down = TotalLoss(layers, content, styles, w).total;
      x = saved;
      const double f = (up - down) / (2.0 * step);
      const double a = analytic[m].data()[i];
      max_diff = std::max(max_diff, std::abs(a - f));
      max_a = std::max(max_a, std::abs(a));
      max_f = std::max(max_f, std::abs(f));
      ++out.entries;
    }
  }
  const double scale = std::max(max_a, max_f);
  out.max_relative_error = scale > 0.0 ? max_diff / scale : 0.0;
  return out;
}

}  // namespace

int RunLoss(const LossOptions& opts, std::ostream& out,
            std::ostream& /*err*/) {
  if (opts.layers.size() != opts.style_targets.size()) {
    throw UsageError("got " + std::to_string(opts.style_targets.size()) +
                     " style targets for " + std::to_string(opts.layers.size()) +
                     " layers");
  }
  std::vector<FeatureTensor> layers, styles;
  for (const std::string& p : opts.layers) layers.push_back(LoadTensor(p));
  for (const std::string& p : opts.style_targets) styles.push_back(LoadTensor(p));
  const FeatureTensor content = LoadTensor(opts.content_target);

  const LossWeights w{opts.gamma1, opts.gamma2};
  const LossBreakdown loss = TotalLoss(layers, content, styles, w);
  std::optional<GradCheck> check;
  if (opts.grad_check) {
    check = CheckGradients(layers, content, styles, w, opts.grad_step);
  }

  std::string text;
  if (opts.format == ReportFormat::kCsv) {
    text = "quantity,value\n";
    text += "content," + FormatNumber(loss.content) + "\n";
    text += "style," + FormatNumber(loss.style) + "\n";
    text += "total," + FormatNumber(loss.total) + "\n";
    if (check) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.3e", check->max_relative_error);
      text += std::string("grad_max_relative_error,") + buf + "\n";
    }
  } else {
    nlohmann::ordered_json j;
    j["content"] = loss.content;
    j["style"] = loss.style;
    j["total"] = loss.total;
    j["gamma1"] = w.content;
    j["gamma2"] = w.style;
    if (check) {
      j["grad_check"] = {{"step", opts.grad_step},
                         {"entries", check->entries},
                         {"max_relative_error", check->max_relative_error}};
    }
    text = j.dump(2) + "\n";
  }
  EmitReport(opts.output, text, out);
  return kExitOk;
}

}  // namespace camext::cli
