// Copyright 2026 The Featbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "featbench/builtin_fuzzers.hpp"
#include "featbench/codegen.hpp"
#include "featbench/feature_model.hpp"
#include "featbench/ground_truth.hpp"
#include "featbench/stats.hpp"

namespace py = pybind11;
using namespace featbench;

namespace {

// Exact probabilities cross the boundary as (numerator, denominator)
// strings; the python side wraps them in fractions.Fraction.
py::tuple rational_parts(const Rational& r) {
  return py::make_tuple(boost::multiprecision::numerator(r).str(),
                        boost::multiprecision::denominator(r).str());
}

py::bytes to_bytes(const std::vector<uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

}  // namespace

PYBIND11_MODULE(_featbench, m) {
  m.doc() = "feature-parameterized fuzzing benchmark toolchain";

  py::class_<ProgramSpec>(m, "ProgramSpec")
      .def_property_readonly("name", &ProgramSpec::name)
      .def_property_readonly(
          "family",
          [](const ProgramSpec& s) { return family_name(s.family); })
      .def_readonly("input_len", &ProgramSpec::input_len)
      .def("__repr__",
           [](const ProgramSpec& s) {
             return "<ProgramSpec " + s.name() + ">";
           })
      .def("__eq__", [](const ProgramSpec& a, const ProgramSpec& b) {
        return a == b;
      });

  m.def("parse_name", &parse_name, py::arg("name"),
        "Program spec from its canonical name.");
  m.def(
      "format_name", [](const ProgramSpec& s) { return s.name(); },
      py::arg("spec"));
  m.def("default_grid", &default_grid, "The frozen 153-program grid.");
  m.def(
      "grid_version",
      []() { return grid_version(default_grid()); },
      "Fingerprint of the default grid manifest.");
  m.def(
      "leaf_count",
      [](uint32_t width, uint32_t depth) {
        return leaf_count(BranchTreeParams{width, depth, 2, 1});
      },
      py::arg("width"), py::arg("depth"));

  m.def(
      "emit_source",
      [](const ProgramSpec& spec) { return emit_source(spec).code; },
      py::arg("spec"), "C99 source text of the benchmark target.");
  m.def(
      "bug_marker",
      [](const ProgramSpec& spec) { return bug_marker_for(spec.name()); },
      py::arg("spec"));

  m.def(
      "analytic_probability",
      [](const ProgramSpec& spec) -> py::object {
        auto p = analytic_probability(spec);
        if (!p) return py::none();
        return rational_parts(*p);
      },
      py::arg("spec"),
      "Exact bug probability as a (numerator, denominator) string pair.");
  m.def(
      "witness_input",
      [](const ProgramSpec& spec) { return to_bytes(witness_input(spec)); },
      py::arg("spec"), "An input that triggers the planted bug.");

  m.def(
      "spearman",
      [](const std::vector<double>& xs, const std::vector<double>& ys) {
        auto r = spearman(xs, ys);
        return py::make_tuple(r.rho, r.p_value);
      },
      py::arg("xs"), py::arg("ys"),
      "Tie-aware Spearman rank correlation and two-tailed p-value.");
  m.def(
      "completion_rate",
      [](const std::vector<bool>& completed) {
        std::vector<CampaignResult> results(completed.size());
        for (size_t i = 0; i < completed.size(); ++i)
          results[i].completed = completed[i];
        return completion_rate(results);
      },
      py::arg("completed"));

  m.def(
      "run_random_fuzzer",
      [](const std::filesystem::path& target, uint32_t input_len,
         uint64_t max_execs, double timeout_s, uint64_t seed) {
        auto o = run_random_fuzzer(target, input_len,
                                   FuzzBudget{max_execs, timeout_s}, seed);
        return py::make_tuple(o.found, o.executions,
                              to_bytes(o.crashing_input));
      },
      py::arg("target"), py::arg("input_len"), py::arg("max_execs"),
      py::arg("timeout_s"), py::arg("seed"),
      "Built-in random fuzzer against a compiled target binary.");

  // Translators run newest-first, so the base class goes in first.
  py::register_exception<Error>(m, "FeatbenchError", PyExc_RuntimeError);
  py::register_exception<InvalidSpec>(m, "InvalidSpecError", PyExc_ValueError);
  py::register_exception<MalformedName>(m, "MalformedNameError",
                                        PyExc_ValueError);
}
