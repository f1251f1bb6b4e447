// Python bindings for the main operations: embedding, blind detection,
// transforms, variance-model fitting, attacks and the experiment runner.
// Images cross the boundary as 2D numpy arrays (float64 grids or uint8).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <stdexcept>

#include "ctmark/attacks.hpp"
#include "ctmark/contourlet.hpp"
#include "ctmark/detector.hpp"
#include "ctmark/dwt.hpp"
#include "ctmark/experiment.hpp"
#include "ctmark/garch.hpp"
#include "ctmark/grid.hpp"
#include "ctmark/pgm.hpp"
#include "ctmark/watermark.hpp"

namespace py = pybind11;

namespace {

ctmark::Grid2D grid_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2D array");
    ctmark::Grid2D g(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    std::memcpy(g.data(), a.data(), sizeof(double) * g.size());
    return g;
}

py::array_t<double> array_from_grid(const ctmark::Grid2D& g) {
    py::array_t<double> a({g.rows(), g.cols()});
    std::memcpy(a.mutable_data(), g.data(), sizeof(double) * g.size());
    return a;
}

ctmark::ImageU8 image_from_array(const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2D uint8 array");
    ctmark::ImageU8 img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::memcpy(img.pixels.data(), a.data(), img.pixels.size());
    return img;
}

py::array_t<uint8_t> array_from_image(const ctmark::ImageU8& img) {
    py::array_t<uint8_t> a({img.height, img.width});
    std::memcpy(a.mutable_data(), img.pixels.data(), img.pixels.size());
    return a;
}

}  // namespace

PYBIND11_MODULE(_ctmark, m) {
    m.doc() = "Contourlet-domain blind watermarking with a 2D-GARCH detector";

    // --- image I/O ---
    m.def("load_pgm", [](const std::string& path) { return array_from_image(ctmark::load_pgm(path)); },
          py::arg("path"));
    m.def("save_pgm",
          [](const std::string& path, const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& a) {
              ctmark::save_pgm(path, image_from_array(a));
          },
          py::arg("path"), py::arg("image"));

    // --- transforms ---
    m.def("contourlet_analyze",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
             const std::vector<int>& dir_levels) {
              ctmark::ContourletDecomp d = ctmark::contourlet_analyze(grid_from_array(a), dir_levels);
              py::list scales;
              for (const auto& s : d.scales) {
                  py::list bands;
                  for (const auto& b : s) bands.append(array_from_grid(b));
                  scales.append(bands);
              }
              return py::make_tuple(array_from_grid(d.lowpass), scales);
          },
          py::arg("image"), py::arg("dir_levels") = std::vector<int>{2, 3});
    m.def("contourlet_synthesize",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& lowpass,
             const py::list& scales, const std::vector<int>& dir_levels) {
              ctmark::ContourletDecomp d;
              d.lowpass = grid_from_array(py::cast<py::array_t<double>>(lowpass));
              for (const auto& s : scales) {
                  std::vector<ctmark::Grid2D> bands;
                  for (const auto& b : py::cast<py::list>(s))
                      bands.push_back(grid_from_array(py::cast<py::array_t<double>>(b)));
                  d.scales.push_back(std::move(bands));
              }
              d.dir_levels = dir_levels;
              return array_from_grid(ctmark::contourlet_synthesize(d));
          },
          py::arg("lowpass"), py::arg("scales"), py::arg("dir_levels") = std::vector<int>{2, 3});

    // --- watermarking ---
    m.def("embed",
          [](const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& a, uint64_t key,
             double wdr_db, const std::vector<int>& dir_levels) {
              auto [img, rec] = ctmark::embed(image_from_array(a), key, wdr_db, dir_levels);
              py::dict r;
              r["key"] = rec.key;
              r["wdr_db"] = rec.wdr_db;
              r["gamma"] = rec.gamma;
              r["scale_index"] = rec.scale_index;
              r["subband_index"] = rec.subband_index;
              r["rows"] = rec.rows;
              r["cols"] = rec.cols;
              return py::make_tuple(array_from_image(img), r);
          },
          py::arg("image"), py::arg("key"), py::arg("wdr_db"),
          py::arg("dir_levels") = std::vector<int>{2, 3});
    m.def("detect",
          [](const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& a, uint64_t key,
             double wdr_db, double pf_target, const std::vector<int>& dir_levels) {
              ctmark::DetectionReport rep =
                  ctmark::detect(image_from_array(a), key, wdr_db, pf_target, dir_levels);
              py::dict r;
              r["statistic"] = rep.statistic;
              r["threshold"] = rep.threshold;
              r["decision"] = rep.decision;
              r["pf_target"] = rep.pf_target;
              r["mu0"] = rep.mu0;
              r["mu1"] = rep.mu1;
              r["sigma0_sq"] = rep.sigma0_sq;
              r["sigma1_sq"] = rep.sigma1_sq;
              r["fit_converged"] = rep.fit_converged;
              r["scale_index"] = rep.scale_index;
              r["subband_index"] = rep.subband_index;
              r["gamma"] = rep.gamma;
              return r;
          },
          py::arg("image"), py::arg("key"), py::arg("wdr_db"), py::arg("pf_target") = 0.05,
          py::arg("dir_levels") = std::vector<int>{2, 3});
    m.def("psnr",
          [](const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& a,
             const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& b) {
              return ctmark::psnr(image_from_array(a), image_from_array(b));
          },
          py::arg("a"), py::arg("b"));

    // --- variance model ---
    m.def("garch_fit",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a, int p1, int p2,
             int q1, int q2) {
              ctmark::GarchFit fit =
                  ctmark::fit_mle(grid_from_array(a), ctmark::Garch2DOrder{p1, p2, q1, q2});
              return ctmark::garch_fit_to_json_string(fit);
          },
          py::arg("field"), py::arg("p1") = 1, py::arg("p2") = 1, py::arg("q1") = 1,
          py::arg("q2") = 1);
    m.def("garch_simulate",
          [](const std::string& params_json, int rows, int cols, uint64_t seed) {
              return array_from_grid(ctmark::simulate_garch(
                  ctmark::garch_params_from_json_string(params_json), rows, cols, seed));
          },
          py::arg("params_json"), py::arg("rows"), py::arg("cols"), py::arg("seed"));

    // --- attacks ---
    m.def("apply_attack",
          [](const py::array_t<uint8_t, py::array::c_style | py::array::forcecast>& a,
             const std::string& spec_json) {
              return array_from_image(ctmark::apply_attack(
                  image_from_array(a), ctmark::attack_spec_from_json_string(spec_json)));
          },
          py::arg("image"), py::arg("spec_json"));

    // --- experiment runner ---
    m.def("run_experiment",
          [](const std::string& config_json, const std::string& out_dir) {
              ctmark::ExperimentReport rep = ctmark::run_experiment(
                  ctmark::experiment_config_from_json_string(config_json));
              if (!out_dir.empty()) ctmark::write_report(rep, out_dir);
              return ctmark::experiment_report_to_json_string(rep);
          },
          py::arg("config_json"), py::arg("out_dir") = std::string());
}
