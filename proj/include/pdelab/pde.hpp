#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pdelab {

/// -y'' = g on [x0, x1] with y(x0) = y0, y(x1) = y1; g is constant.
struct PoissonProblem {
  double g = 0.0;
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 0.0;

  /// Throws ParameterError unless x0 < x1 and every field is finite.
  void validate() const;
  bool operator==(const PoissonProblem&) const = default;
};

enum class Provenance { analytic, fdm, surrogate };

std::string_view to_string(Provenance p) noexcept;
Provenance provenance_from_string(std::string_view s);

/// Nodal solution on a strictly increasing grid.
struct SolutionField {
  std::vector<double> nodes;
  std::vector<double> values;
  Provenance provenance = Provenance::analytic;

  std::size_t size() const noexcept { return nodes.size(); }
  bool operator==(const SolutionField&) const = default;
};

inline constexpr std::size_t kDefaultNodes = 101;

/// Uniform grid of n points; the last node is exactly x1.
std::vector<double> uniform_grid(double x0, double x1, std::size_t n);

/// Closed form y = -g (x-x0)^2 / 2 + a (x-x0) + y0 sampled on a uniform grid.
SolutionField solve_analytic(const PoissonProblem& p, std::size_t n_nodes = kDefaultNodes);

/// Second-order central differences with Dirichlet elimination, solved with
/// the Thomas algorithm. Requires n_nodes >= 3 (InvalidGridError otherwise).
SolutionField solve_fdm(const PoissonProblem& p, std::size_t n_nodes = kDefaultNodes);

/// Analytic solutions for each problem, in order.
std::vector<SolutionField> sweep_figure1(const std::vector<PoissonProblem>& problems,
                                         std::size_t n_nodes = kDefaultNodes);

/// Four source/boundary combinations on [0, 1] used for the solution-family
/// demo: (g, y0, y1) = (0,0,1), (2,0,0), (-2,1,0), (4,1,1). Chosen by this
/// project, not taken from published values.
std::vector<PoissonProblem> figure1_demo_problems();

/// CSV with header `x,y,provenance`.
std::string to_csv(const SolutionField& f);

}  // namespace pdelab
