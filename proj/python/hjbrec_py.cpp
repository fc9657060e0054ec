#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hjbrec/cli.hpp"
#include "hjbrec/control.hpp"
#include "hjbrec/errors.hpp"
#include "hjbrec/galerkin.hpp"
#include "hjbrec/pipeline.hpp"
#include "hjbrec/quadrature.hpp"

namespace py = pybind11;
using namespace hjbrec;

namespace {

OperatorFile ops_for(const std::string& problem, const std::optional<std::string>& path) {
  if (path) return load_operator_file(*path);
  if (auto p = default_operator_file(problem)) return load_operator_file(*p);
  throw UsageError("no operator file for '" + problem + "'");
}

py::array_t<double> as_array(const IntegralTable& t) {
  std::vector<py::ssize_t> shape(static_cast<std::size_t>(t.rank()), t.n());
  py::array_t<double> out(shape);
  std::copy(t.values().begin(), t.values().end(), out.mutable_data());
  return out;
}

py::dict counts_dict(const ProvenanceCounts& c) {
  py::dict d;
  d["seed"] = c.seed;
  d["derived"] = c.derived;
  d["fallback"] = c.fallback;
  d["quadrature"] = c.quadrature;
  d["unset"] = c.unset;
  return d;
}

GalerkinSystem system_for(int n, const std::string& problem, bool oracle) {
  const ProblemSpec spec = problem_by_label(problem);
  std::optional<OperatorFile> ops;
  if (!oracle) {
    if (auto p = default_operator_file(problem)) ops = load_operator_file(*p);
  }
  const TableSet t = build_tables(n, spec, ops ? &*ops : nullptr);
  return assemble(t.a.table, t.b.table, t.c.table);
}

}  // namespace

PYBIND11_MODULE(_hjbrec, m) {
  m.doc() = "Galerkin HJB solver with recurrence-filled integral tables";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_IndexError);
  py::register_exception<SingularityError>(m, "SingularityError", PyExc_ArithmeticError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);

  m.def("problem_labels", &problem_labels);
  m.def("data_dir", [] { return data_dir().string(); });

  m.def("mellin", [](const std::string& text, std::vector<std::string> s_vars, std::vector<std::string> i_vars,
                     std::vector<std::string> params) {
    return mellin(DiffOp::parse(text, std::move(s_vars), std::move(params)), i_vars).str();
  }, py::arg("expr"), py::arg("s_vars"), py::arg("i_vars"), py::arg("params") = std::vector<std::string>{});
  m.def("inverse_mellin", [](const std::string& text, std::vector<std::string> i_vars, std::vector<std::string> s_vars,
                             std::vector<std::string> params) {
    return inverse_mellin(ShiftOp::parse(text, std::move(i_vars), std::move(params)), s_vars).str();
  }, py::arg("expr"), py::arg("i_vars"), py::arg("s_vars"), py::arg("params") = std::vector<std::string>{});

  m.def("seed_integral", [](const std::string& kind, std::vector<int> idx, const std::string& problem) {
    return seed_integral(table_kind_from_string(kind), idx, problem_by_label(problem));
  }, py::arg("kind"), py::arg("index"), py::arg("problem") = "sin-system");

  m.def("quadrature_table", [](const std::string& kind, int n, const std::string& problem) {
    return as_array(full_table_quadrature(table_kind_from_string(kind), n, problem_by_label(problem)).table);
  }, py::arg("kind"), py::arg("n"), py::arg("problem") = "sin-system");

  m.def("fill_table", [](const std::string& kind, int n, const std::string& problem,
                         std::optional<std::string> ops_path) {
    const TableKind k = table_kind_from_string(kind);
    const OperatorFile ops = ops_for(problem, ops_path);
    const RecurrenceSystem* sys = ops.family(k);
    if (sys == nullptr) throw UsageError("operator file has no family for this kind");
    const TableBuild b = build_table(k, n, problem_by_label(problem), sys);
    py::dict d;
    d["values"] = as_array(b.table);
    d["counts"] = counts_dict(b.table.counts());
    d["seconds_recurrence"] = b.seconds_recurrence;
    d["seconds_seeds"] = b.seconds_seeds;
    return d;
  }, py::arg("kind"), py::arg("n"), py::arg("problem") = "sin-system", py::arg("ops") = py::none());

  m.def("verify", [](int n, const std::string& problem, std::optional<std::string> ops_path, double tol) {
    const OperatorFile ops = ops_for(problem, ops_path);
    const ProblemSpec spec = problem_by_label(problem);
    py::list out;
    for (const auto& fam : ops.families) {
      const auto t = full_table_quadrature(fam.kind, n, spec).table;
      for (const auto& op : verify_annihilation(fam, t, tol).operators) {
        py::dict d;
        d["id"] = op.id;
        d["enabled"] = op.enabled;
        d["passed"] = op.passed;
        d["max_residual"] = op.max_residual;
        d["bases_checked"] = op.bases_checked;
        d["violations"] = op.violations;
        out.append(d);
      }
    }
    return out;
  }, py::arg("n") = 8, py::arg("problem") = "sin-system", py::arg("ops") = py::none(), py::arg("tol") = 1e-6);

  m.def("sga", [](int n, const std::string& problem, double eps, int l_max, bool oracle) {
    const GalerkinSystem sys = system_for(n, problem, oracle);
    const SgaResult r = sga_run(sys, SgaConfig{default_initial_guess(n), eps, l_max});
    py::dict d;
    d["v_star"] = r.v_star;
    d["iterations"] = r.iterations;
    d["residual_history"] = r.residual_history;
    d["converged"] = r.converged;
    d["initial_residual"] = r.initial_residual;
    return d;
  }, py::arg("n"), py::arg("problem") = "sin-system", py::arg("eps") = 1e-9, py::arg("l_max") = 50,
     py::arg("oracle") = false);

  m.def("value", [](const Eigen::VectorXd& v, double x) { return ValueFunction(v).value(x); });
  m.def("feedback", [](const Eigen::VectorXd& v, double x, const std::string& problem) {
    return feedback(ValueFunction(v), x, problem_by_label(problem));
  }, py::arg("v"), py::arg("x"), py::arg("problem") = "sin-system");
  m.def("hjb_residual", [](const Eigen::VectorXd& v, double x, const std::string& problem) {
    return hjb_residual(ValueFunction(v), x, problem_by_label(problem));
  }, py::arg("v"), py::arg("x"), py::arg("problem") = "sin-system");

  m.def("simulate", [](const Eigen::VectorXd& v, const std::string& problem, double x0, double t_end, double dt) {
    const Trajectory tr = simulate(ValueFunction(v), problem_by_label(problem), x0, t_end, dt);
    py::dict d;
    d["t"] = py::array_t<double>(static_cast<py::ssize_t>(tr.times.size()), tr.times.data());
    d["x"] = py::array_t<double>(static_cast<py::ssize_t>(tr.states.size()), tr.states.data());
    d["u"] = py::array_t<double>(static_cast<py::ssize_t>(tr.inputs.size()), tr.inputs.data());
    return d;
  }, py::arg("v"), py::arg("problem") = "sin-system", py::arg("x0") = 4.0, py::arg("t_end") = 10.0,
     py::arg("dt") = 1e-3);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
