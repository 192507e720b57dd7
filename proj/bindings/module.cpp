#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "multicup/cli.hpp"
#include "multicup/conv.hpp"
#include "multicup/oracle.hpp"
#include "multicup/planner.hpp"
#include "multicup/report.hpp"
#include "multicup/synth.hpp"

namespace py = pybind11;
using namespace multicup;

namespace {

Image<float> image_from_array(const py::array_t<float>& arr) {
  const auto buf = arr.request();
  if (buf.ndim != 2) throw std::invalid_argument("expected a 2-D float array");
  Image<float> img(static_cast<int>(buf.shape[0]),
                   static_cast<int>(buf.shape[1]));
  const auto view = arr.unchecked<2>();
  for (int v = 0; v < img.rows; ++v)
    for (int u = 0; u < img.cols; ++u) img.at(v, u) = view(v, u);
  return img;
}

py::array_t<float> array_from_image(const Image<float>& img) {
  py::array_t<float> arr({img.rows, img.cols});
  auto view = arr.mutable_unchecked<2>();
  for (int v = 0; v < img.rows; ++v)
    for (int u = 0; u < img.cols; ++u) view(v, u) = img.at(v, u);
  return arr;
}

/// Eigen values headed into Python containers must be copied: the default
/// cast policy would hand Python a non-owning view of C++ memory.
template <typename T>
py::object copy_cast(const T& v) {
  return py::cast(v, py::return_value_policy::copy);
}

CameraIntrinsics intrinsics_from_dict(const py::dict& d) {
  CameraIntrinsics cam;
  cam.fx = d["fx"].cast<double>();
  cam.fy = d["fy"].cast<double>();
  cam.cx = d["cx"].cast<double>();
  cam.cy = d["cy"].cast<double>();
  cam.width = d["width"].cast<int>();
  cam.height = d["height"].cast<int>();
  if (d.contains("camera_to_world"))
    cam.camera_to_world = d["camera_to_world"].cast<Mat4>();
  cam.validate();
  return cam;
}

GripperSpec gripper_from_args(const std::vector<std::array<double, 3>>& cups,
                              double cup_radius) {
  GripperSpec g;
  for (const auto& c : cups) g.cup_centers_local.emplace_back(c[0], c[1], c[2]);
  g.cup_radius = cup_radius;
  g.validate();
  return g;
}

PlannerConfig config_from_kwargs(const py::kwargs& kwargs) {
  PlannerConfig c;
  for (const auto& [key_obj, value] : kwargs) {
    const std::string key = py::cast<std::string>(key_obj);
    if (key == "voxel_size") c.voxel_size = value.cast<double>();
    else if (key == "angle_interval") c.angle_interval = value.cast<double>();
    else if (key == "eps_normal") c.eps_normal = value.cast<double>();
    else if (key == "eps_dist") c.eps_dist = value.cast<double>();
    else if (key == "min_points_per_voxel")
      c.min_points_per_voxel = value.cast<int>();
    else if (key == "normal_k") c.normal_k = value.cast<int>();
    else if (key == "top_fraction") c.top_fraction = value.cast<double>();
    else if (key == "min_cluster_size")
      c.min_cluster_size = value.cast<int>();
    else if (key == "w_dist") c.w_dist = value.cast<double>();
    else if (key == "w_var") c.w_var = value.cast<double>();
    else if (key == "w_orient") c.w_orient = value.cast<double>();
    else if (key == "threads") continue;  // handled by the caller
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
  c.validate();
  return c;
}

py::dict grasp_to_dict(const GraspCandidate& cand, const ScoreBreakdown* score,
                       const std::vector<int>* labels) {
  py::dict g;
  g["position"] = copy_cast(cand.position);
  g["orientation"] = copy_cast(cand.orientation);
  py::list cups;
  for (const Vec3& c : cand.cup_centers_world) cups.append(copy_cast(c));
  g["cup_centers"] = cups;
  py::list act;
  for (uint8_t a : cand.activation) act.append(static_cast<int>(a));
  g["activation"] = act;
  g["source"] = to_string(cand.source);
  if (score) {
    g["max_obj"] = score->max_obj;
    g["j"] = score->j;
    g["j_dist"] = score->j_dist;
    g["j_var"] = score->j_var;
    g["j_orient"] = score->j_orient;
  }
  if (labels) {
    py::list ls;
    for (int l : *labels) ls.append(l);
    g["contact_labels"] = ls;
  }
  return g;
}

py::dict outcome_to_dict(const PlanOutcome& outcome) {
  py::dict out;
  out["outcome"] = to_string(outcome.status);
  if (outcome.status == PlanStatus::kMultiCup) {
    const RankedEntry& top = outcome.plan.ranking.front();
    out["optimal"] =
        grasp_to_dict(top.candidate, &top.score, &top.contact_labels);
    py::list ranking;
    for (const RankedEntry& e : outcome.plan.ranking)
      ranking.append(grasp_to_dict(e.candidate, &e.score, &e.contact_labels));
    out["ranking"] = ranking;
  } else if (outcome.status == PlanStatus::kFallback) {
    out["optimal"] = grasp_to_dict(outcome.plan.optimal, nullptr, nullptr);
    out["ranking"] = py::list();
  } else {
    out["ranking"] = py::list();
  }
  py::dict counters;
  counters["occupied_cells"] = outcome.occupied_cells;
  counters["orientations"] = outcome.orientation_count;
  counters["kernels_built"] = outcome.kernels_built;
  counters["cells_convolved"] = outcome.cells_convolved;
  counters["raw_candidates"] = outcome.raw_candidates;
  counters["checked_candidates"] = outcome.checked_candidates;
  counters["clusters"] = outcome.cluster_count;
  out["counters"] = counters;
  py::dict timings;
  timings["voxelize_ms"] = outcome.t_voxelize_ms;
  timings["orientations_ms"] = outcome.t_orientations_ms;
  timings["kernels_ms"] = outcome.t_kernels_ms;
  timings["conv_ms"] = outcome.t_conv_ms;
  timings["decode_ms"] = outcome.t_decode_ms;
  timings["rank_ms"] = outcome.t_rank_ms;
  timings["total_ms"] = outcome.t_total_ms;
  out["timings"] = timings;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "multi-cup suction grasp planning";

  m.def(
      "plan",
      [](const py::array_t<float>& depth, const py::array_t<float>& affordance,
         const py::dict& intrinsics,
         const std::vector<std::array<double, 3>>& cup_centers,
         double cup_radius, const py::kwargs& kwargs) {
        PlanRequest request;
        request.gripper = gripper_from_args(cup_centers, cup_radius);
        request.config = config_from_kwargs(kwargs);
        if (kwargs.contains("threads"))
          request.threads = kwargs["threads"].cast<int>();
        const AffordanceScene scene =
            make_scene(image_from_array(depth), image_from_array(affordance),
                       intrinsics_from_dict(intrinsics),
                       request.config.normal_k);
        PlanOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = plan(scene, request);
        }
        return outcome_to_dict(outcome);
      },
      py::arg("depth"), py::arg("affordance"), py::arg("intrinsics"),
      py::arg("cup_centers"), py::arg("cup_radius") = 0.0,
      "Run the full grasp-planning pipeline on a depth + affordance image "
      "pair. Config fields (voxel_size, angle_interval, eps_normal, ...) "
      "pass as keyword arguments in radians/meters.");

  m.def(
      "render_preset",
      [](const std::string& name) {
        const RenderedScene rendered = render_scene(preset_scene(name));
        py::dict out;
        out["depth"] = array_from_image(rendered.gt.depth);
        out["affordance"] = array_from_image(rendered.gt.affordance);
        py::dict cam;
        cam["fx"] = rendered.gt.camera.fx;
        cam["fy"] = rendered.gt.camera.fy;
        cam["cx"] = rendered.gt.camera.cx;
        cam["cy"] = rendered.gt.camera.cy;
        cam["width"] = rendered.gt.camera.width;
        cam["height"] = rendered.gt.camera.height;
        cam["camera_to_world"] = copy_cast(rendered.gt.camera.camera_to_world);
        out["intrinsics"] = cam;
        out["argmax_pixel"] =
            py::make_tuple(rendered.gt.argmax_v, rendered.gt.argmax_u);
        return out;
      },
      py::arg("name"),
      "Render a named synthetic scene (see preset_names()) to depth, "
      "affordance, and intrinsics.");

  m.def("preset_names", &preset_names,
        "Names accepted by render_preset().");

  m.def(
      "validate_random",
      [](int instances, int max_dim, int max_orientations, unsigned seed) {
        py::gil_scoped_release release;
        std::mt19937 rng(seed);
        for (int i = 0; i < instances; ++i) {
          const RandomInstance inst =
              random_instance(rng, max_dim, max_orientations);
          const EncodedKernelSet kernels = build_encoded_kernels(
              inst.gripper, inst.samples.rotations, inst.grid.voxel_size);
          const ConvResult conv = conv3d_sparse(inst.grid, kernels);
          const auto decoded =
              decode(conv, inst.grid, inst.samples, inst.gripper);
          const auto oracle =
              brute_force_candidates(inst.grid, inst.samples, inst.gripper);
          if (candidate_keys(decoded) != candidate_keys(oracle)) return false;
        }
        return true;
      },
      py::arg("instances") = 10, py::arg("max_dim") = 24,
      py::arg("max_orientations") = 8, py::arg("seed") = 0,
      "True when conv+decode matches the brute-force oracle on every random "
      "instance.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"multicup"};
        for (const auto& a : args) argv.push_back(a.c_str());
        return run_cli(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"),
      "Invoke the command-line interface in-process; returns its exit code.");
}
