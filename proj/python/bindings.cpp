#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "pdelab/ann.hpp"
#include "pdelab/commands.hpp"
#include "pdelab/costs.hpp"
#include "pdelab/errors.hpp"
#include "pdelab/linalg.hpp"
#include "pdelab/pde.hpp"
#include "pdelab/regress.hpp"

namespace py = pybind11;
using namespace pdelab;

namespace {

using Rows = std::vector<std::vector<double>>;

DenseMatrix to_matrix(const Rows& rows) {
  if (rows.empty() || rows.front().empty()) throw ShapeError("matrix must be non-empty");
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw ShapeError("ragged matrix rows");
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Rows from_matrix(const DenseMatrix& m) {
  Rows rows(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c);
  return rows;
}

py::dict field_dict(const SolutionField& f) {
  py::dict d;
  d["x"] = f.nodes;
  d["y"] = f.values;
  d["provenance"] = std::string(to_string(f.provenance));
  return d;
}

using Command = int (*)(const CommandOptions&, std::ostream&, std::ostream&);

py::tuple run_command(Command cmd, const std::filesystem::path& config, std::optional<std::filesystem::path> out,
                      std::optional<std::uint64_t> seed, std::optional<std::string> format) {
  CommandOptions o{config, std::move(out), seed, std::move(format)};
  std::ostringstream so;
  std::ostringstream se;
  int code;
  {
    py::gil_scoped_release release;
    code = cmd(o, so, se);
  }
  return py::make_tuple(code, so.str(), se.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "pdelab core: Poisson solvers, least squares, steepest-descent MLPs, cost accounting";
  m.attr("__version__") = PDELAB_VERSION;

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<InvalidGridError>(m, "InvalidGridError", PyExc_ValueError);
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError", PyExc_ArithmeticError);
  py::register_exception<SingularSystemError>(m, "SingularSystemError", PyExc_ArithmeticError);

  m.def("pseudoinverse", [](const Rows& x) { return from_matrix(pseudoinverse(to_matrix(x))); }, py::arg("x"));
  m.def(
      "solve_tridiagonal",
      [](std::vector<double> sub, std::vector<double> diag, std::vector<double> sup, std::vector<double> rhs) {
        const auto v = solve_tridiagonal({std::move(sub), std::move(diag), std::move(sup), std::move(rhs)});
        return std::vector<double>(v.begin(), v.end());
      },
      py::arg("sub"), py::arg("diag"), py::arg("sup"), py::arg("rhs"));

  m.def(
      "solve_analytic",
      [](double g, double y0, double y1, double x0, double x1, std::size_t n) {
        return field_dict(solve_analytic({g, x0, x1, y0, y1}, n));
      },
      py::arg("g"), py::arg("y0"), py::arg("y1"), py::arg("x0") = 0.0, py::arg("x1") = 1.0,
      py::arg("n_nodes") = kDefaultNodes);
  m.def(
      "solve_fdm",
      [](double g, double y0, double y1, double x0, double x1, std::size_t n) {
        return field_dict(solve_fdm({g, x0, x1, y0, y1}, n));
      },
      py::arg("g"), py::arg("y0"), py::arg("y1"), py::arg("x0") = 0.0, py::arg("x1") = 1.0,
      py::arg("n_nodes") = kDefaultNodes);

  m.def(
      "generate_synthetic",
      [](std::size_t n, double w, double b, std::pair<double, double> x_range, double noise, std::uint64_t seed) {
        SyntheticSpec s{n, w, b, x_range.first, x_range.second, noise, seed};
        const auto d = generate_synthetic(s);
        return py::make_tuple(d.inputs(), d.targets());
      },
      py::arg("n") = 100, py::arg("true_w") = 2.0, py::arg("true_b") = -4.0,
      py::arg("x_range") = std::pair{-4.0, 4.0}, py::arg("noise_amplitude") = 2.0, py::arg("seed") = 1);
  m.def(
      "fit_least_squares",
      [](std::vector<double> x, std::vector<double> y) {
        const auto f = fit_least_squares(RegressionDataset(std::move(x), std::move(y)));
        return py::make_tuple(f.w, f.b);
      },
      py::arg("x"), py::arg("y"));

  m.def(
      "train_line",
      [](std::vector<double> x, std::vector<double> y, double w0, double b0, double lr, double tol,
         std::size_t max_epochs) {
        TrainConfig cfg;
        cfg.learning_rate = lr;
        cfg.stop_tolerance = tol;
        cfg.max_epochs = max_epochs;
        cfg.init_scheme = InitScheme::given;
        const auto r = train_steepest_descent(MlpModel::siso(w0, b0), RegressionDataset(std::move(x), std::move(y)), cfg);
        py::dict d;
        d["w"] = r.model.layers()[0].weights(0, 0);
        d["b"] = r.model.layers()[0].biases[0];
        d["loss"] = r.report.loss_history;
        d["epochs_run"] = r.report.epochs_run;
        d["stop_reason"] = std::string(to_string(r.report.stop_reason));
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("w0") = 1.0, py::arg("b0") = -1.0, py::arg("learning_rate") = 0.001,
      py::arg("stop_tolerance") = 1e-6, py::arg("max_epochs") = 100);

  m.def(
      "check_gradients",
      [](std::vector<std::size_t> sizes, std::vector<std::string> transfers, std::uint64_t seed, const Rows& inputs,
         const Rows& targets, double step) {
        std::vector<Transfer> t;
        for (const auto& s : transfers) t.push_back(transfer_from_string(s));
        const auto model = MlpModel::uniform_init(std::move(sizes), std::move(t), seed);
        return check_gradients(model, Batch{to_matrix(inputs), to_matrix(targets)}, step);
      },
      py::arg("layer_sizes"), py::arg("transfers"), py::arg("seed"), py::arg("inputs"), py::arg("targets"),
      py::arg("step") = 1e-6);

  m.def(
      "total_time",
      [](double t_dg, double t_nt, double t_pr, double t_solve, std::uint64_t n) {
        CostLedger l;
        l.t_dg = t_dg;
        l.t_nt = t_nt;
        l.t_pr = t_pr;
        l.t_solve = t_solve;
        l.n_predictions = n;
        return total_time(l);
      },
      py::arg("t_dg"), py::arg("t_nt"), py::arg("t_pr"), py::arg("t_solve"), py::arg("n_predictions"));
  m.def(
      "break_even",
      [](double t_dg, double t_nt, double t_pr, double t_solve) {
        CostLedger l;
        l.t_dg = t_dg;
        l.t_nt = t_nt;
        l.t_pr = t_pr;
        l.t_solve = t_solve;
        return break_even(l);
      },
      py::arg("t_dg"), py::arg("t_nt"), py::arg("t_pr"), py::arg("t_solve"));

  // CLI subcommands in-process; each returns (exit_code, stdout, stderr).
  for (const auto& [name, fn] : {std::pair<const char*, Command>{"solve", cmd_solve}, {"fit", cmd_fit},
                                 {"train_ann", cmd_train_ann}, {"surrogate", cmd_surrogate},
                                 {"breakeven", cmd_breakeven}}) {
    m.def(
        name,
        [fn = fn](const std::filesystem::path& config, std::optional<std::filesystem::path> out,
                  std::optional<std::uint64_t> seed, std::optional<std::string> format) {
          return run_command(fn, config, std::move(out), seed, std::move(format));
        },
        py::arg("config"), py::arg("out") = py::none(), py::arg("seed") = py::none(), py::arg("format") = py::none());
  }
  m.def(
      "report",
      [](const std::filesystem::path& run_dir) {
        std::ostringstream so;
        std::ostringstream se;
        const int code = cmd_report(run_dir, so, se);
        return py::make_tuple(code, so.str(), se.str());
      },
      py::arg("run_dir"));
}
