#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "fdtp/disparity.hpp"
#include "fdtp/dtt.hpp"
#include "fdtp/io.hpp"
#include "fdtp/mclt.hpp"
#include "fdtp/synth.hpp"

namespace py = pybind11;
using namespace fdtp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_numpy(const Image& img) {
  Array a({img.height(), img.width()});
  std::memcpy(a.mutable_data(), img.data().data(), img.data().size() * sizeof(double));
  return a;
}

Image from_numpy(const Array& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2D array");
  Image img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::memcpy(img.data().data(), a.data(), img.data().size() * sizeof(double));
  return img;
}

template <class T>
Array grid(const TileGridShape& shape, const std::vector<T>& v) {
  Array a({shape.rows, shape.cols});
  for (std::size_t i = 0; i < v.size(); ++i) a.mutable_data()[i] = static_cast<double>(v[i]);
  return a;
}

Tile16 tile_from(const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != kTileSize || a.shape(1) != kTileSize) {
    throw std::invalid_argument("expected a 16x16 array");
  }
  Tile16 t;
  std::memcpy(t.px.data(), a.data(), sizeof(double) * kTileSize * kTileSize);
  return t;
}

Array fd_to_numpy(const FdTile& fd) {
  Array a({4, 8, 8});
  for (int q = 0; q < 4; ++q) std::memcpy(a.mutable_data() + 64 * q, fd.quadrants[q].data(), 64 * sizeof(double));
  return a;
}

FdTile fd_from(const Array& a) {
  if (a.ndim() != 3 || a.shape(0) != 4 || a.shape(1) != 8 || a.shape(2) != 8) {
    throw std::invalid_argument("expected a 4x8x8 array (CC, SC, CS, SS)");
  }
  FdTile fd;
  for (int q = 0; q < 4; ++q) std::memcpy(fd.quadrants[q].data(), a.data() + 64 * q, 64 * sizeof(double));
  return fd;
}

py::dict estimate(const QuadFrameSet& frames, int workers, bool coarse) {
  EstimateParams p;
  p.workers = workers;
  p.coarse = coarse;
  const DisparityMap m = estimate_frame(frames, p);
  std::vector<double> d, s, it, conv, valid;
  for (const DisparityEstimate& e : m.tiles) {
    d.push_back(e.disparity);
    s.push_back(e.valid ? e.strength : 0.0);
    it.push_back(e.iterations);
    conv.push_back(e.converged);
    valid.push_back(e.valid);
  }
  py::dict out;
  out["disparity"] = grid(m.shape, d);
  out["strength"] = grid(m.shape, s);
  out["iterations"] = grid(m.shape, it);
  out["converged"] = grid(m.shape, conv);
  out["valid"] = grid(m.shape, valid);
  return out;
}

}  // namespace

PYBIND11_MODULE(_fdtp, m) {
  m.doc() = "Frequency-domain quad-camera tile processor";

  py::register_exception<io::FormatError>(m, "FormatError", PyExc_ValueError);

  py::class_<QuadFrameSet>(m, "QuadFrameSet")
      .def_property_readonly("width", &QuadFrameSet::width)
      .def_property_readonly("height", &QuadFrameSet::height)
      .def("image", [](const QuadFrameSet& f, int cam) { return to_numpy(f.images.at(cam)); }, py::arg("camera"))
      .def("set_image", [](QuadFrameSet& f, int cam, const Array& a) { f.images.at(cam) = from_numpy(a); },
           py::arg("camera"), py::arg("image"))
      .def("validate", &QuadFrameSet::validate);

  py::class_<synth::GroundTruth>(m, "GroundTruth")
      .def_property_readonly("disparity", [](const synth::GroundTruth& g) { return grid(g.shape, g.disparity); })
      .def_property_readonly("valid", [](const synth::GroundTruth& g) { return grid(g.shape, g.valid); })
      .def_property_readonly("mixed", [](const synth::GroundTruth& g) { return grid(g.shape, g.mixed); });

  m.def(
      "render",
      [](const std::string& spec_json) {
        const io::SceneFile f = io::parse_scene(spec_json);
        synth::Rendered r = synth::render(f.spec, f.geometry);
        return py::make_tuple(std::move(r.frames), std::move(r.truth));
      },
      py::arg("spec_json"), "Render a scene spec (JSON text); returns (frames, ground_truth).");

  m.def("estimate", &estimate, py::arg("frames"), py::arg("workers") = 1, py::arg("coarse") = true,
        "Per-tile disparity; returns a dict of tile-grid arrays.");

  m.def(
      "features",
      [](const QuadFrameSet& frames, const Array& targets) {
        const TileGridShape shape = tile_grid_shape(frames.width(), frames.height());
        if (targets.size() != shape.count()) throw std::invalid_argument("targets must cover the tile grid");
        const std::vector<double> t(targets.data(), targets.data() + targets.size());
        const FeatureSet fs = export_features(process_frame(frames, t), t);
        py::array_t<float> rec({static_cast<py::ssize_t>(fs.records.size()), static_cast<py::ssize_t>(kFeatureLength)});
        for (std::size_t i = 0; i < fs.records.size(); ++i) {
          std::memcpy(rec.mutable_data() + i * kFeatureLength, fs.records[i].data(), sizeof(float) * kFeatureLength);
        }
        return py::make_tuple(rec, fs.tile_index);
      },
      py::arg("frames"), py::arg("targets"), "Feature records (n, 325) float32 and their tile indices.");

  m.def(
      "mclt_forward",
      [](const Array& tile, double shift_h, double shift_v) {
        return fd_to_numpy(mclt_forward(tile_from(tile), Window1D::make(shift_h), Window1D::make(shift_v)));
      },
      py::arg("tile"), py::arg("shift_h") = 0.0, py::arg("shift_v") = 0.0);
  m.def(
      "imclt",
      [](const Array& fd, double shift_h, double shift_v) {
        const Tile16 t = imclt(fd_from(fd), Window1D::make(shift_h), Window1D::make(shift_v));
        Array a({kTileSize, kTileSize});
        std::memcpy(a.mutable_data(), t.px.data(), sizeof(double) * kTileSize * kTileSize);
        return a;
      },
      py::arg("fd"), py::arg("shift_h") = 0.0, py::arg("shift_v") = 0.0);
  m.def(
      "phase_rotate", [](const Array& fd, double dx, double dy) { return fd_to_numpy(phase_rotate(fd_from(fd), dx, dy)); },
      py::arg("fd"), py::arg("dx"), py::arg("dy"));

  m.def("load_frames", [](const std::filesystem::path& dir) { return io::load_frames(dir); }, py::arg("directory"));
  m.def("save_frames", &io::save_frames, py::arg("directory"), py::arg("frames"));

  m.attr("FEATURE_LENGTH") = kFeatureLength;
}
