#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dosefind/api.hpp"
#include "dosefind/service.hpp"

namespace py = pybind11;
using namespace dosefind;

namespace {

Alphabet alphabet_from(const std::string &name) {
  if (name == "binary") return Alphabet::binary;
  if (name == "quaternary") return Alphabet::quaternary;
  throw ValidationError("alphabet must be binary or quaternary", "alphabet");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian dose-finding core";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<SamplerError>(m, "SamplerError", PyExc_RuntimeError);

  // Same request and response bytes as POST /v1/<endpoint>. The GIL is
  // released for the duration of the fit.
  m.def(
      "call",
      [](const std::string &endpoint, const std::string &request) {
        py::gil_scoped_release release;
        return service::render(api::call(endpoint, api::parse_request(request)));
      },
      py::arg("endpoint"), py::arg("request"));

  m.def(
      "parse_outcomes",
      [](const std::string &text, const std::string &alphabet) {
        std::vector<std::tuple<int, int, char>> out;
        const auto seq = parse_outcomes(text, alphabet_from(alphabet));
        for (const auto &r : seq.records())
          out.emplace_back(r.patient, r.dose_level, event_code(r.event));
        return out;
      },
      py::arg("text"), py::arg("alphabet") = "binary");

  m.def(
      "enumerate_cohort_outcomes",
      [](int n, const std::string &alphabet) { return enumerate_cohort_outcomes(n, alphabet_from(alphabet)); },
      py::arg("cohort_size"), py::arg("alphabet") = "binary");

  m.def(
      "clopper_pearson",
      [](int x, int n, double conf) {
        const auto e = clopper_pearson(x, n, conf);
        return py::make_tuple(e.lower, e.upper);
      },
      py::arg("x"), py::arg("n"), py::arg("conf") = 0.95);

  m.def("joint_prob", &joint_prob, py::arg("a"), py::arg("b"), py::arg("prob_eff"), py::arg("prob_tox"),
        py::arg("psi"));

  m.def(
      "solve_contour_exponent",
      [](double eff0, double tox1, double eff_star, double tox_star) {
        return solve_contour_exponent({eff0, tox1, eff_star, tox_star});
      },
      py::arg("eff0"), py::arg("tox1"), py::arg("eff_star"), py::arg("tox_star"));
}
