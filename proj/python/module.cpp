#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "bcsynth/bench.hpp"
#include "bcsynth/groebner.hpp"
#include "bcsynth/parse.hpp"
#include "bcsynth/pipeline.hpp"

namespace py = pybind11;
using namespace bcsynth;

namespace {

VarList vars_of(const std::vector<std::string>& names) { return make_vars(names); }

Poly parse_with(const std::string& text, const std::vector<std::string>& vars) {
  return parse_poly(text, vars_of(vars));
}

VectorField field_of(const std::vector<std::string>& components,
                     const std::vector<std::string>& vars) {
  VarList v = vars_of(vars);
  VectorField f{v, {}};
  for (const auto& c : components) f.components.push_back(parse_poly(c, v));
  return f;
}

py::dict report_dict(const ValidationReport& report) {
  py::dict d;
  d["pass"] = report.pass;
  py::list conds;
  for (const auto& c : report.conditions) {
    py::dict e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["vacuous"] = c.vacuous;
    e["samples"] = c.samples;
    e["worst"] = c.worst;
    e["witness"] = c.witness;
    conds.append(e);
  }
  d["conditions"] = conds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_bcsynth, m) {
  m.doc() = "barrier-certificate synthesis for polynomial ODE systems";

  py::class_<Poly>(m, "Poly")
      .def("__str__", &Poly::str)
      .def("__eq__", [](const Poly& a, const Poly& b) { return a == b; })
      .def("degree", &Poly::degree)
      .def("is_zero", &Poly::is_zero)
      .def("eval",
           [](const Poly& p, const std::vector<double>& x) {
             return p.eval(std::span<const double>(x.data(), x.size()));
           })
      .def("__add__", [](const Poly& a, const Poly& b) { return a + b; })
      .def("__sub__", [](const Poly& a, const Poly& b) { return a - b; })
      .def("__mul__", [](const Poly& a, const Poly& b) { return a * b; })
      .def("__neg__", [](const Poly& a) { return -a; });

  m.def("parse_poly", &parse_with, py::arg("text"), py::arg("vars"),
        "Parse an expression into an exact-rational polynomial");

  m.def(
      "lie_derivative",
      [](const std::string& B, const std::vector<std::string>& field,
         const std::vector<std::string>& vars, unsigned k) {
        VectorField f = field_of(field, vars);
        return lie_derivative(parse_poly(B, f.vars), f, k);
      },
      py::arg("B"), py::arg("field"), py::arg("vars"), py::arg("k") = 1);

  m.def(
      "groebner_basis",
      [](const std::vector<std::string>& gens, const std::vector<std::string>& vars) {
        VarList v = vars_of(vars);
        std::vector<Poly> polys;
        for (const auto& g : gens) polys.push_back(parse_poly(g, v));
        std::vector<std::string> out;
        for (const auto& p : groebner_basis(polys)) out.push_back(p.str());
        return out;
      },
      py::arg("generators"), py::arg("vars"));

  m.def(
      "ideal_member",
      [](const std::string& candidate, const std::vector<std::string>& gens,
         const std::vector<std::string>& vars) {
        VarList v = vars_of(vars);
        std::vector<Poly> polys;
        for (const auto& g : gens) polys.push_back(parse_poly(g, v));
        return ideal_contains(groebner_basis(polys), parse_poly(candidate, v));
      },
      py::arg("candidate"), py::arg("generators"), py::arg("vars"));

  m.def(
      "completeness_threshold",
      [](const std::string& B, const std::vector<std::string>& field,
         const std::vector<std::string>& vars, unsigned max_order) {
        VectorField f = field_of(field, vars);
        auto t = completeness_threshold(parse_poly(B, f.vars), f, max_order);
        return py::make_tuple(t.order, t.reached);
      },
      py::arg("B"), py::arg("field"), py::arg("vars"), py::arg("max_order") = 6);

  m.def(
      "synthesize",
      [](const std::string& problem_file, double timeout, std::uint64_t seed,
         int lie_order, const std::string& backend) {
        ProblemSpec spec = load_problem(problem_file);
        SynthesisOptions opts;
        opts.timeout_sec = timeout;
        opts.seed = seed;
        opts.backend = backend;
        if (lie_order > 0) opts.lie_order = static_cast<unsigned>(lie_order);
        SynthesisResult r = synthesize(spec, opts);
        py::dict d;
        d["found"] = r.found;
        d["iterations"] = r.iterations;
        if (r.found) {
          d["certificate"] = r.certificate.B.str();
          d["lambda"] = r.certificate.lambda;
          d["report"] = report_dict(r.report);
        } else {
          d["failure_reason"] = r.failure_reason;
        }
        return d;
      },
      py::arg("problem_file"), py::arg("timeout") = 120.0, py::arg("seed") = 20210415,
      py::arg("lie_order") = 0, py::arg("backend") = "native");

  m.def(
      "validate",
      [](const std::string& problem_file, const std::string& certificate, int lie_order,
         std::size_t n_samples) {
        ProblemSpec spec = load_problem(problem_file);
        ValidateOptions opts;
        opts.n_samples = n_samples;
        unsigned order = lie_order > 0 ? static_cast<unsigned>(lie_order) : spec.lie_order;
        return report_dict(check_certificate(spec, certificate, order, opts));
      },
      py::arg("problem_file"), py::arg("certificate"), py::arg("lie_order") = 0,
      py::arg("n_samples") = 100000);

  m.def(
      "simulate",
      [](const std::vector<std::string>& field, const std::vector<std::string>& vars,
         const std::vector<double>& x0, double step, std::size_t steps) {
        VectorField f = field_of(field, vars);
        Eigen::VectorXd start(static_cast<int>(x0.size()));
        for (std::size_t i = 0; i < x0.size(); ++i) start[static_cast<int>(i)] = x0[i];
        std::vector<std::vector<double>> out;
        for (const auto& x : simulate_trajectory(f, start, step, steps))
          out.emplace_back(x.data(), x.data() + x.size());
        return out;
      },
      py::arg("field"), py::arg("vars"), py::arg("x0"), py::arg("step") = 1e-3,
      py::arg("steps") = 1000);

  m.def(
      "export_smt",
      [](const std::string& problem_file, const std::string& certificate, int lie_order) {
        ProblemSpec spec = load_problem(problem_file);
        Certificate cert;
        cert.B = parse_poly(certificate, spec.vars);
        cert.lie_order = lie_order > 0 ? static_cast<unsigned>(lie_order) : spec.lie_order;
        std::map<std::string, std::string> out;
        for (const auto& [name, text] : export_smt(spec, cert)) out[name] = text;
        return out;
      },
      py::arg("problem_file"), py::arg("certificate"), py::arg("lie_order") = 0);
}
