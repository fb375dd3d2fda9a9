#include "pdelab/pde.hpp"

#include <cmath>
#include <sstream>

#include "pdelab/errors.hpp"
#include "pdelab/linalg.hpp"
#include "pdelab/textio.hpp"

namespace pdelab {

void PoissonProblem::validate() const {
  for (double v : {g, x0, x1, y0, y1})
    if (!std::isfinite(v)) throw ParameterError("PoissonProblem: non-finite field");
  if (!(x0 < x1)) throw ParameterError("PoissonProblem: require x0 < x1");
}

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::analytic: return "analytic";
    case Provenance::fdm: return "fdm";
    case Provenance::surrogate: return "surrogate";
  }
  return "unknown";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "analytic") return Provenance::analytic;
  if (s == "fdm") return Provenance::fdm;
  if (s == "surrogate") return Provenance::surrogate;
  throw ParameterError("unknown provenance '" + std::string(s) + "'");
}

std::vector<double> uniform_grid(double x0, double x1, std::size_t n) {
  if (n < 2) throw InvalidGridError("uniform_grid: need at least 2 nodes");
  std::vector<double> x(n);
  const double h = (x1 - x0) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) x[i] = x0 + static_cast<double>(i) * h;
  x[n - 1] = x1;
  return x;
}

SolutionField solve_analytic(const PoissonProblem& p, std::size_t n_nodes) {
  p.validate();
  if (n_nodes < 2) throw InvalidGridError("solve_analytic: n_nodes must be >= 2");
  SolutionField f{uniform_grid(p.x0, p.x1, n_nodes), std::vector<double>(n_nodes), Provenance::analytic};
  const double len = p.x1 - p.x0;
  const double slope = (p.y1 - p.y0 + 0.5 * p.g * len * len) / len;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const double s = f.nodes[i] - p.x0;
    f.values[i] = -0.5 * p.g * s * s + slope * s + p.y0;
  }
  f.values.front() = p.y0;
  f.values.back() = p.y1;
  return f;
}

SolutionField solve_fdm(const PoissonProblem& p, std::size_t n_nodes) {
  p.validate();
  if (n_nodes < 3) throw InvalidGridError("solve_fdm: n_nodes must be >= 3, got " + std::to_string(n_nodes));
  SolutionField f{uniform_grid(p.x0, p.x1, n_nodes), std::vector<double>(n_nodes), Provenance::fdm};
  const double h = (p.x1 - p.x0) / static_cast<double>(n_nodes - 1);

  // Interior unknowns u_1..u_{n-2}; rows scaled by h^2.
  const std::size_t m = n_nodes - 2;
  TridiagonalSystem sys{std::vector<double>(m - 1, -1.0), std::vector<double>(m, 2.0),
                        std::vector<double>(m - 1, -1.0), std::vector<double>(m, h * h * p.g)};
  sys.rhs.front() += p.y0;
  sys.rhs.back() += p.y1;
  const DenseVector u = solve_tridiagonal(sys);

  f.values.front() = p.y0;
  for (std::size_t i = 0; i < m; ++i) f.values[i + 1] = u[i];
  f.values.back() = p.y1;
  return f;
}

std::vector<SolutionField> sweep_figure1(const std::vector<PoissonProblem>& problems, std::size_t n_nodes) {
  if (problems.empty()) throw ParameterError("sweep_figure1: empty problem list");
  std::vector<SolutionField> out;
  out.reserve(problems.size());
  for (const auto& p : problems) out.push_back(solve_analytic(p, n_nodes));
  return out;
}

std::vector<PoissonProblem> figure1_demo_problems() {
  return {{0.0, 0.0, 1.0, 0.0, 1.0}, {2.0, 0.0, 1.0, 0.0, 0.0}, {-2.0, 0.0, 1.0, 1.0, 0.0}, {4.0, 0.0, 1.0, 1.0, 1.0}};
}

std::string to_csv(const SolutionField& f) {
  std::ostringstream os;
  os << "x,y,provenance\n";
  for (std::size_t i = 0; i < f.size(); ++i)
    os << format_real(f.nodes[i]) << ',' << format_real(f.values[i]) << ',' << to_string(f.provenance) << '\n';
  return os.str();
}

}  // namespace pdelab
