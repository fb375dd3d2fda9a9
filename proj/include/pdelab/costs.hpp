#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

namespace pdelab {

/// Timings for one surrogate deployment, in seconds.
struct CostLedger {
  double t_dg = 0.0;     // data generation
  double t_nt = 0.0;     // network training
  double t_pr = 0.0;     // one warm prediction (median)
  double t_solve = 0.0;  // one high-fidelity solve (median)
  std::uint64_t n_predictions = 0;
  std::size_t repetitions = 1;
  std::vector<double> prediction_samples;
  std::vector<double> solve_samples;
  /// First prediction in the process, kept apart from the warm median.
  std::optional<double> t_pr_cold;

  /// Throws ParameterError on negative or non-finite times.
  void validate() const;
  bool operator==(const CostLedger&) const = default;
};

/// T_t = T_dg + T_nt + N T_pr
double total_time(const CostLedger& l);

/// Smallest N >= 1 with t_dg + t_nt + N t_pr < N t_solve, or nullopt when
/// t_pr >= t_solve. Throws ParameterError unless t_solve > 0.
std::optional<std::uint64_t> break_even(const CostLedger& l);

double median(std::vector<double> samples);

/// Pipeline timings that are recorded rather than re-measured.
struct CostDraft {
  double t_dg = 0.0;
  double t_nt = 0.0;
  std::uint64_t n_predictions = 0;
};

/// Times `predict` and `solve` `repetitions` times each and takes medians.
/// One extra `predict` call runs first and is stored as the cold start.
CostLedger measure(const CostDraft& draft, const std::function<void()>& predict, const std::function<void()>& solve,
                   std::size_t repetitions);

nlohmann::json to_json(const CostLedger& l);
CostLedger ledger_from_json(const nlohmann::json& j);

}  // namespace pdelab
