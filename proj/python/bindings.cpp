/*
 * Copyright 2026 The linksim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "linksim/accel.hpp"
#include "linksim/analysis.hpp"
#include "linksim/config.hpp"
#include "linksim/errors.hpp"
#include "linksim/experiments.hpp"
#include "linksim/smmu.hpp"
#include "linksim/system.hpp"

namespace py = pybind11;
using namespace linksim;

namespace {

using Settings = std::map<std::string, std::string>;

RunConfig make_config(const Settings& settings) {
  RunConfig cfg;
  for (const auto& [k, v] : settings) cfg.set(k, v);
  return cfg;
}

IntMatrix to_matrix(const std::vector<std::vector<std::int32_t>>& rows) {
  IntMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols) throw ConfigError("ragged matrix rows");
    for (std::size_t c = 0; c < m.cols; ++c) m.at(r, c) = rows[r][c];
  }
  return m;
}

std::vector<std::vector<std::int32_t>> from_matrix(const IntMatrix& m) {
  std::vector<std::vector<std::int32_t>> out(m.rows, std::vector<std::int32_t>(m.cols));
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) out[r][c] = m.at(r, c);
  }
  return out;
}

py::dict figure_dict(const FigureResult& f) {
  py::dict series;
  for (const auto& s : f.series) series[py::str(s.name)] = s.points;
  py::dict d;
  d["name"] = f.name;
  d["summary"] = f.summary;
  d["series"] = series;
  d["reports"] = f.reports;
  d["csv"] = to_csv(f.reports);
  return d;
}

}  // namespace

PYBIND11_MODULE(_linksim, m) {
  m.doc() = "Discrete-event simulator for host-accelerator interconnects";

  auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SimulationFault>(m, "SimulationFault", PyExc_RuntimeError);
  (void)config_error;

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def(py::init(&make_config), py::arg("settings"))
      .def_static("parse", &RunConfig::parse, py::arg("text"), py::arg("source") = "<config>")
      .def_static("load", &RunConfig::load, py::arg("path"))
      .def("set", &RunConfig::set)
      .def("get", &RunConfig::get)
      .def("echo", &RunConfig::echo)
      .def("values", &RunConfig::values)
      .def("with_overrides", [](const RunConfig& c, const Settings& s) {
        RunConfig out = c;
        for (const auto& [k, v] : s) out.set(k, v);
        return out;
      })
      .def(py::self == py::self)
      .def("__repr__", [](const RunConfig& c) { return "RunConfig(" + std::to_string(c.values().size()) + " keys)"; });

  m.def("config_keys", [] {
    std::vector<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& k : config_keys()) out.emplace_back(k.name, k.default_value, k.help);
    return out;
  });

  py::class_<TranslationStats>(m, "TranslationStats")
      .def_readonly("footprint_pages", &TranslationStats::footprint_pages)
      .def_readonly("translation_count", &TranslationStats::translation_count)
      .def_readonly("translation_mean_cycles", &TranslationStats::translation_mean_cycles)
      .def_readonly("ptw_count", &TranslationStats::ptw_count)
      .def_readonly("ptw_mean_cycles", &TranslationStats::ptw_mean_cycles)
      .def_readonly("utlb_lookups", &TranslationStats::utlb_lookups)
      .def_readonly("utlb_misses", &TranslationStats::utlb_misses)
      .def_readonly("overhead_percent", &TranslationStats::overhead_percent);

  py::class_<SimReport>(m, "SimReport")
      .def_readonly("total_ns", &SimReport::total_ns)
      .def_readonly("gemm_ns", &SimReport::gemm_ns)
      .def_readonly("nongemm_ns", &SimReport::nongemm_ns)
      .def_readonly("other_ns", &SimReport::other_ns)
      .def_readonly("bytes_h2d", &SimReport::bytes_h2d)
      .def_readonly("bytes_d2h", &SimReport::bytes_d2h)
      .def_readonly("compute_bound_ns", &SimReport::compute_bound_ns)
      .def_readonly("transfer_bound_ns", &SimReport::transfer_bound_ns)
      .def_readonly("gemm_ops", &SimReport::gemm_ops)
      .def_readonly("nongemm_ops", &SimReport::nongemm_ops)
      .def_readonly("translation", &SimReport::translation)
      .def_readonly("config", &SimReport::config)
      .def("__repr__", [](const SimReport& r) { return "SimReport(total_ns=" + format_number(r.total_ns) + ")"; });

  m.def("simulate", &simulate, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "simulate", [](const Settings& s) { return simulate(make_config(s)); }, py::arg("settings"));

  m.def(
      "sweep",
      [](const RunConfig& base, const std::vector<std::pair<std::string, std::vector<std::string>>>& axes,
         unsigned jobs) {
        std::vector<Axis> parsed;
        for (const auto& [k, vs] : axes) parsed.push_back(Axis{k, vs});
        const auto cfgs = expand_sweep(base, parsed);
        py::gil_scoped_release release;
        return run_all(cfgs, jobs);
      },
      py::arg("base"), py::arg("axes"), py::arg("jobs") = 1);
  m.def("to_csv", &to_csv, py::arg("reports"));
  m.def("csv_columns", &csv_columns);

  m.def("figure_names", &figure_names);
  m.def(
      "run_figure",
      [](const std::string& name, const RunConfig& base, bool quick, unsigned jobs) {
        FigureResult f;
        {
          py::gil_scoped_release release;
          f = run_figure(name, base, FigureOptions{quick, jobs});
        }
        return figure_dict(f);
      },
      py::arg("name"), py::arg("base") = RunConfig{}, py::arg("quick") = false, py::arg("jobs") = 1);

  m.def("footprint_pages", &footprint_pages, py::arg("n"));
  m.def(
      "gemm",
      [](const std::vector<std::vector<std::int32_t>>& a, const std::vector<std::vector<std::int32_t>>& b) {
        return from_matrix(gemm_functional(to_matrix(a), to_matrix(b)));
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "mix_time",
      [](double t_other, double p_gemm, double p_nongemm, double w_gemm) {
        return mix_time(MixModel{t_other, w_gemm, p_gemm, p_nongemm}, w_gemm);
      },
      py::arg("t_other"), py::arg("p_gemm"), py::arg("p_nongemm"), py::arg("w_gemm"));
  m.def(
      "devmem_threshold",
      [](const SimReport& dev, const SimReport& pcie) {
        const ThresholdResult t = devmem_threshold(PhaseTimes::from(dev), PhaseTimes::from(pcie));
        py::dict d;
        d["crossing"] = t.crossing;
        d["w_gemm"] = t.w_gemm;
        d["w_gemm_grid"] = t.w_gemm_grid;
        d["w_nongemm"] = t.w_nongemm();
        d["dominant"] = t.dominant;
        return d;
      },
      py::arg("devmem"), py::arg("pcie"));
}
