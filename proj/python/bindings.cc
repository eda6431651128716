#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "camext/cli.h"
#include "camext/error.h"
#include "camext/eval_metrics.h"
#include "camext/geometry.h"
#include "camext/horizon_vp.h"
#include "camext/kitti_io.h"
#include "camext/loss_kernel.h"
#include "camext/perturb_sim.h"

namespace py = pybind11;

namespace camext {
namespace {

// Boxes cross the boundary as (x, y, z, h, w, l, yaw).
using BoxTuple = std::array<double, 7>;

Box3D ToBox(const BoxTuple& t) {
  return {{t[0], t[1], t[2]}, t[3], t[4], t[5], t[6]};
}

BoxTuple FromBox(const Box3D& b) {
  return {b.center.x, b.center.y, b.center.z, b.h, b.w, b.l, b.yaw};
}

RotationMatrix ToRotation(const Eigen::Matrix3d& m) {
  return RotationMatrix::FromMatrix(m);
}

FeatureTensor ToTensor(const py::array_t<double, py::array::c_style |
                                                     py::array::forcecast>& a) {
  if (a.ndim() != 3) throw py::value_error("expected a (c, h, w) array");
  std::vector<double> data(a.data(), a.data() + a.size());
  return FeatureTensor(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                       static_cast<int>(a.shape(2)), std::move(data));
}

std::vector<FeatureTensor> ToTensors(const py::list& arrays) {
  std::vector<FeatureTensor> out;
  for (const auto& a : arrays) {
    out.push_back(ToTensor(
        a.cast<py::array_t<double, py::array::c_style | py::array::forcecast>>()));
  }
  return out;
}

py::array_t<double> FromTensor(const FeatureTensor& t) {
  py::array_t<double> a({t.c(), t.h(), t.w()});
  std::copy(t.data().begin(), t.data().end(), a.mutable_data());
  return a;
}

py::dict LabelToDict(const ObjectLabel& l) {
  py::dict d;
  d["type"] = l.type;
  d["truncated"] = l.truncated;
  d["occluded"] = l.occluded;
  d["alpha"] = l.alpha;
  d["bbox"] = std::array<double, 4>{l.bbox.left, l.bbox.top, l.bbox.right,
                                    l.bbox.bottom};
  d["dimensions"] = std::array<double, 3>{l.h, l.w, l.l};
  d["location"] =
      std::array<double, 3>{l.location.x, l.location.y, l.location.z};
  d["rotation_y"] = l.rotation_y;
  d["score"] = l.score ? py::cast(*l.score) : py::none();
  return d;
}

ObjectLabel LabelFromDict(const py::dict& d) {
  ObjectLabel l;
  l.type = d["type"].cast<std::string>();
  l.truncated = d["truncated"].cast<double>();
  l.occluded = d["occluded"].cast<int>();
  l.alpha = d["alpha"].cast<double>();
  const auto bbox = d["bbox"].cast<std::array<double, 4>>();
  l.bbox = {bbox[0], bbox[1], bbox[2], bbox[3]};
  const auto dims = d["dimensions"].cast<std::array<double, 3>>();
  l.h = dims[0];
  l.w = dims[1];
  l.l = dims[2];
  const auto loc = d["location"].cast<std::array<double, 3>>();
  l.location = {loc[0], loc[1], loc[2]};
  l.rotation_y = d["rotation_y"].cast<double>();
  if (d.contains("score") && !d["score"].is_none()) {
    l.score = d["score"].cast<double>();
  }
  return l;
}

}  // namespace
}  // namespace camext

PYBIND11_MODULE(_camext, m) {
  using namespace camext;
  m.doc() = "Camera-extrinsic perturbation toolkit";
  m.attr("__version__") = "0.1.0";

  static py::exception<Error> error_type(m, "CamextError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, e.what());
    }
  });

  py::class_<CameraIntrinsics>(m, "Intrinsics")
      .def(py::init<double, double, double, double, double>(), py::arg("fx"),
           py::arg("fy"), py::arg("cx"), py::arg("cy"), py::arg("skew") = 0.0)
      .def_property_readonly("fx", &CameraIntrinsics::fx)
      .def_property_readonly("fy", &CameraIntrinsics::fy)
      .def_property_readonly("cx", &CameraIntrinsics::cx)
      .def_property_readonly("cy", &CameraIntrinsics::cy)
      .def_property_readonly("skew", &CameraIntrinsics::skew)
      .def("matrix", &CameraIntrinsics::Matrix);

  // Geometry.
  m.def(
      "perturbation_matrix",
      [](double pitch, double roll) {
        return PerturbationMatrix(ExtrinsicPerturbation(pitch, roll)).matrix();
      },
      py::arg("pitch"), py::arg("roll"));
  m.def(
      "image_homography",
      [](const CameraIntrinsics& k, const Eigen::Matrix3d& rotation) {
        return ImageHomography(k, ToRotation(rotation)).matrix();
      },
      py::arg("k"), py::arg("rotation"));
  m.def(
      "project",
      [](const CameraIntrinsics& k, double x, double y, double z) {
        const Point2Image p = Project(k, {x, y, z});
        return std::make_pair(p.u, p.v);
      },
      py::arg("k"), py::arg("x"), py::arg("y"), py::arg("z"));
  m.def(
      "keypoint_transfer",
      [](const CameraIntrinsics& k_i, const CameraIntrinsics& k_j,
         const Eigen::Matrix3d& rotation, double u, double v, double z_i) {
        const TransferredKeypoint t =
            KeypointTransfer(k_i, k_j, ToRotation(rotation), {u, v, z_i}, z_i);
        return std::make_tuple(t.point.u, t.point.v, t.depth);
      },
      py::arg("k_i"), py::arg("k_j"), py::arg("rotation"), py::arg("u"),
      py::arg("v"), py::arg("z_i"));
  m.def(
      "transform_box",
      [](const Eigen::Matrix3d& rotation, const BoxTuple& box) {
        return FromBox(TransformBox(ToRotation(rotation), ToBox(box)));
      },
      py::arg("rotation"), py::arg("box"));
  m.def(
      "box_corners",
      [](const BoxTuple& box) {
        Eigen::Matrix<double, 8, 3, Eigen::RowMajor> out;
        const auto corners = BoxCorners(ToBox(box));
        for (int i = 0; i < 8; ++i) out.row(i) = corners[i].vec().transpose();
        return out;
      },
      py::arg("box"));
  m.def("wrap_angle", &WrapAngle, py::arg("angle"));
  m.def("encode_multibin", &EncodeMultiBin, py::arg("alpha"));
  m.def(
      "decode_multibin",
      [](const std::array<double, 8>& code) {
        return DecodeMultiBin(std::span<const double, 8>(code));
      },
      py::arg("code"));

  // Horizon / vanishing point.
  m.def(
      "extrinsics_from_horizon_vp",
      [](double slope, double intercept_v, double vp_u, double vp_v,
         const CameraIntrinsics& k) {
        const ExtrinsicPerturbation p =
            ExtrinsicsFromHorizonVp({slope, intercept_v}, {vp_u, vp_v}, k);
        return std::make_pair(p.pitch(), p.roll());
      },
      py::arg("slope"), py::arg("intercept_v"), py::arg("vp_u"),
      py::arg("vp_v"), py::arg("k"));
  m.def(
      "horizon_vp_from_extrinsics",
      [](double pitch, double roll, const CameraIntrinsics& k) {
        const HorizonObservation o =
            HorizonVpFromExtrinsics(ExtrinsicPerturbation(pitch, roll), k);
        py::dict d;
        d["slope"] = o.horizon.slope;
        d["intercept_v"] = o.horizon.intercept_v;
        d["vp_u"] = o.vp.u;
        d["vp_v"] = o.vp.v;
        return d;
      },
      py::arg("pitch"), py::arg("roll"), py::arg("k"));
  m.def("angular_error_deg", &AngularErrorDegrees, py::arg("estimate"),
        py::arg("truth"));

  // IoU.
  m.def(
      "iou_2d",
      [](const std::array<double, 4>& a, const std::array<double, 4>& b) {
        return Iou2D({a[0], a[1], a[2], a[3]}, {b[0], b[1], b[2], b[3]});
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "iou_bev",
      [](const BoxTuple& a, const BoxTuple& b) {
        return IouBev(ToBox(a), ToBox(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "iou_3d",
      [](const BoxTuple& a, const BoxTuple& b) {
        return Iou3D(ToBox(a), ToBox(b));
      },
      py::arg("a"), py::arg("b"));

  // Labels and simulation.
  m.def(
      "parse_labels",
      [](const std::string& text) {
        py::list out;
        for (const ObjectLabel& l : ParseLabelFile(text)) {
          out.append(LabelToDict(l));
        }
        return out;
      },
      py::arg("text"));
  m.def(
      "write_labels",
      [](const py::list& labels, int decimals) {
        std::vector<ObjectLabel> v;
        for (const auto& d : labels) v.push_back(LabelFromDict(d.cast<py::dict>()));
        return WriteLabelFile(v, decimals);
      },
      py::arg("labels"), py::arg("decimals") = 2);
  m.def(
      "sample_perturbation",
      [](const std::string& frame_id, double sigma_pitch, double sigma_roll,
         uint64_t seed, double clamp) {
        PerturbationSpec spec{sigma_pitch, sigma_roll, seed, clamp};
        const ExtrinsicPerturbation p = SamplePerturbation(spec, frame_id);
        return std::make_pair(p.pitch(), p.roll());
      },
      py::arg("frame_id"), py::arg("sigma_pitch") = kDegree,
      py::arg("sigma_roll") = kDegree, py::arg("seed") = 0,
      py::arg("clamp") = 10.0 * kDegree);
  m.def(
      "perturb_labels",
      [](const py::list& labels, const CameraIntrinsics& k, double pitch,
         double roll, int width, int height) {
        std::vector<ObjectLabel> v;
        for (const auto& d : labels) v.push_back(LabelFromDict(d.cast<py::dict>()));
        const PerturbedLabels r = PerturbLabels(
            v, k, ExtrinsicPerturbation(pitch, roll), ImageSize{width, height});
        py::list out;
        for (const ObjectLabel& l : r.labels) out.append(LabelToDict(l));
        return py::make_tuple(out, r.dropped_behind_camera,
                              r.dropped_out_of_view);
      },
      py::arg("labels"), py::arg("k"), py::arg("pitch"), py::arg("roll"),
      py::arg("width") = 1242, py::arg("height") = 375);

  // Evaluation on label-file text, one (gt, det) pair per frame.
  m.def(
      "average_precision_40",
      [](const std::vector<std::pair<std::string, std::string>>& frames,
         const std::string& cls, const std::string& kind, double threshold,
         const std::string& difficulty) {
        const auto k = ParseIouKind(kind);
        const auto bin = ParseDifficulty(difficulty);
        if (!k || !bin) throw py::value_error("unknown iou kind or difficulty");
        std::vector<DetectionFrame> v;
        for (size_t i = 0; i < frames.size(); ++i) {
          DetectionFrame f;
          f.frame_id = std::to_string(i);
          f.ground_truth = ParseLabelFile(frames[i].first);
          f.detections = ParseLabelFile(frames[i].second);
          for (ObjectLabel& d : f.detections) {
            if (!d.score) d.score = 1.0;
          }
          v.push_back(std::move(f));
        }
        const ApResult r = AveragePrecision40(v, cls, *k, threshold, *bin);
        return r.value;
      },
      py::arg("frames"), py::arg("cls"), py::arg("kind"),
      py::arg("threshold"), py::arg("difficulty") = "moderate");

  // Loss kernels on (c, h, w) arrays.
  m.def(
      "gram",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& t) {
        return Eigen::MatrixXd(Gram(ToTensor(t)));
      },
      py::arg("tensor"));
  m.def(
      "content_loss",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& b) {
        return ContentLoss(ToTensor(a), ToTensor(b));
      },
      py::arg("out"), py::arg("target"));
  m.def(
      "style_loss",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& b) {
        return StyleLoss(ToTensor(a), ToTensor(b));
      },
      py::arg("features"), py::arg("style_target"));
  m.def(
      "total_loss",
      [](const py::list& layers,
         const py::array_t<double, py::array::c_style | py::array::forcecast>&
             content_target,
         const py::list& style_targets, double gamma1, double gamma2) {
        const auto l = ToTensors(layers);
        const auto s = ToTensors(style_targets);
        const LossBreakdown r =
            TotalLoss(l, ToTensor(content_target), s, {gamma1, gamma2});
        py::dict d;
        d["content"] = r.content;
        d["style"] = r.style;
        d["total"] = r.total;
        return d;
      },
      py::arg("layers"), py::arg("content_target"), py::arg("style_targets"),
      py::arg("gamma1") = 1.0, py::arg("gamma2") = 1.0);
  m.def(
      "loss_gradients",
      [](const py::list& layers,
         const py::array_t<double, py::array::c_style | py::array::forcecast>&
             content_target,
         const py::list& style_targets, double gamma1, double gamma2) {
        const auto l = ToTensors(layers);
        const auto s = ToTensors(style_targets);
        py::list out;
        for (const FeatureTensor& g :
             LossGradients(l, ToTensor(content_target), s, {gamma1, gamma2})) {
          out.append(FromTensor(g));
        }
        return out;
      },
      py::arg("layers"), py::arg("content_target"), py::arg("style_targets"),
      py::arg("gamma1") = 1.0, py::arg("gamma2") = 1.0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = RunCli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
