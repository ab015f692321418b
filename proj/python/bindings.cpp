#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "panotrack/assignment.hpp"
#include "panotrack/errors.hpp"
#include "panotrack/geometry.hpp"
#include "panotrack/io.hpp"
#include "panotrack/metrics.hpp"
#include "panotrack/pipeline.hpp"
#include "panotrack/sim.hpp"

namespace py = pybind11;
using namespace panotrack;

namespace {

using Pixel = std::pair<double, double>;

ImagePoint pixel(const Pixel& p) { return {p.first, p.second}; }

// Runs a scenario through detection, tracking and evaluation. Both arguments
// and the result are JSON text; the Python wrapper handles conversion.
std::string run_json(const std::string& scenario_text, const std::string& config_text) {
  const Scenario s = scenario_from_json(parse_json(scenario_text, "scenario"));
  RunConfig run = config_text.empty() ? RunConfig{} : run_config_from_json(parse_json(config_text, "config"));
  PipelineConfig cfg = run.pipeline;
  cfg.cam = s.cam;
  const SyntheticDetector det(s);
  Pipeline pipeline(cfg, det);

  std::vector<GroundTruthFrame> gt;
  std::vector<TracksFrame> tracks;
  json frames = json::array();
  for (std::int64_t f = 0; f < s.frame_count(); ++f) {
    const Frame frame = make_frame(s, f);
    if (s.annotated(f)) gt.push_back(ground_truth(*frame.world));
    const FrameOutput out = pipeline.process(frame, 1.0 / s.fps);
    frames.push_back(tracks_frame_to_json(out.tracks));
    tracks.push_back(out.tracks);
  }
  json result = {{"report", eval_report_to_json(evaluate(gt, tracks))}, {"tracks", frames}};
  return result.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Person tracking on a 360 degree equirectangular camera";

  // Translators are tried newest first, so base classes go first.
  py::register_exception<Error>(m, "PanotrackError", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<CameraModel>(m, "CameraModel")
      .def(py::init<>())
      .def_readwrite("image_width", &CameraModel::image_width)
      .def_readwrite("image_height", &CameraModel::image_height)
      .def_readwrite("fov_h", &CameraModel::fov_h)
      .def_readwrite("fov_v", &CameraModel::fov_v)
      .def_readwrite("mount_height", &CameraModel::mount_height)
      .def_readwrite("ankle_height", &CameraModel::ankle_height)
      .def("validate", &CameraModel::validate);

  m.def(
      "image_to_polar",
      [](const Pixel& p, const CameraModel& cam) {
        const PolarDirection d = image_to_polar(pixel(p), cam);
        return std::make_pair(d.theta, d.phi);
      },
      py::arg("point"), py::arg("cam") = CameraModel{}, "(x, y) pixel to (theta, phi) in degrees.");
  m.def(
      "world_to_image",
      [](const std::tuple<double, double, double>& w, const CameraModel& cam) {
        const auto [x, y, z] = w;
        const ImagePoint p = world_to_image({x, y, z}, cam);
        return std::make_pair(p.x, p.y);
      },
      py::arg("point"), py::arg("cam") = CameraModel{});
  m.def(
      "localize",
      [](const Pixel& ankle_mid, const Pixel& neck, const CameraModel& cam) {
        const WorldPoint w = localize(pixel(ankle_mid), pixel(neck), cam);
        return std::make_tuple(w.x, w.y, w.z);
      },
      py::arg("ankle_mid"), py::arg("neck"), py::arg("cam") = CameraModel{},
      "Ground position and neck height from the ankle midpoint and neck pixels.");
  m.def(
      "wrap_distance",
      [](const Pixel& a, const Pixel& b, double width) { return wrap_distance(pixel(a), pixel(b), width); },
      py::arg("a"), py::arg("b"), py::arg("image_width") = 1920.0);
  m.def("localization_sensitivity", &localization_sensitivity, py::arg("distance"), py::arg("pixel_error"),
        py::arg("cam") = CameraModel{});
  m.def(
      "solve_assignment",
      [](const std::vector<std::vector<double>>& cost, double gate) {
        const Assignment a = solve_assignment(cost, gate);
        return std::make_pair(a.pairs, a.total_cost);
      },
      py::arg("cost"), py::arg("gate"), "Returns (pairs, total_cost).");
  m.def("_run_json", &run_json, py::arg("scenario"), py::arg("config") = std::string{},
        py::call_guard<py::gil_scoped_release>());
}
