#include "pdelab/costs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pdelab/errors.hpp"

namespace pdelab {

void CostLedger::validate() const {
  for (double t : {t_dg, t_nt, t_pr, t_solve})
    if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("CostLedger: times must be finite and >= 0");
  if (repetitions < 1) throw ParameterError("CostLedger: repetitions must be >= 1");
}

double total_time(const CostLedger& l) { return l.t_dg + l.t_nt + static_cast<double>(l.n_predictions) * l.t_pr; }

std::optional<std::uint64_t> break_even(const CostLedger& l) {
  l.validate();
  if (!(l.t_solve > 0.0)) throw ParameterError("break_even: t_solve must be > 0");
  if (l.t_pr >= l.t_solve) return std::nullopt;

  CostLedger probe = l;
  const auto beneficial = [&](std::uint64_t n) {
    probe.n_predictions = n;
    return total_time(probe) < static_cast<double>(n) * l.t_solve;
  };

  const double estimate = std::floor((l.t_dg + l.t_nt) / (l.t_solve - l.t_pr)) + 1.0;
  if (!(estimate < 9.0e18)) return std::nullopt;
  auto n = static_cast<std::uint64_t>(estimate);
  // The closed form can be off by one ulp-sized step; settle on the exact
  // predicate so the answer matches a direct scan.
  while (!beneficial(n)) ++n;
  while (n > 1 && beneficial(n - 1)) --n;
  return n;
}

double median(std::vector<double> samples) {
  if (samples.empty()) throw ParameterError("median: no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

namespace {

double time_once(const std::function<void()>& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

CostLedger measure(const CostDraft& draft, const std::function<void()>& predict, const std::function<void()>& solve,
                   std::size_t repetitions) {
  if (repetitions < 1) throw ParameterError("measure: repetitions must be >= 1");
  CostLedger l;
  l.t_dg = draft.t_dg;
  l.t_nt = draft.t_nt;
  l.n_predictions = draft.n_predictions;
  l.repetitions = repetitions;
  l.t_pr_cold = time_once(predict);
  for (std::size_t i = 0; i < repetitions; ++i) l.prediction_samples.push_back(time_once(predict));
  for (std::size_t i = 0; i < repetitions; ++i) l.solve_samples.push_back(time_once(solve));
  l.t_pr = median(l.prediction_samples);
  l.t_solve = median(l.solve_samples);
  return l;
}

nlohmann::json to_json(const CostLedger& l) {
  nlohmann::json j{{"t_dg", l.t_dg},
                   {"t_nt", l.t_nt},
                   {"t_pr", l.t_pr},
                   {"t_solve", l.t_solve},
                   {"n_predictions", l.n_predictions},
                   {"repetitions", l.repetitions},
                   {"prediction_samples", l.prediction_samples},
                   {"solve_samples", l.solve_samples},
                   {"t_pr_cold", l.t_pr_cold ? nlohmann::json(*l.t_pr_cold) : nlohmann::json(nullptr)},
                   {"total_time", total_time(l)}};
  if (l.t_solve > 0.0) {
    const auto n = break_even(l);
    j["break_even"] = n ? nlohmann::json(*n) : nlohmann::json("never");
  } else {
    j["break_even"] = nullptr;
  }
  return j;
}

CostLedger ledger_from_json(const nlohmann::json& j) {
  CostLedger l;
  l.t_dg = j.at("t_dg").get<double>();
  l.t_nt = j.at("t_nt").get<double>();
  l.t_pr = j.at("t_pr").get<double>();
  l.t_solve = j.at("t_solve").get<double>();
  l.n_predictions = j.value("n_predictions", std::uint64_t{0});
  l.repetitions = j.value("repetitions", std::size_t{1});
  l.prediction_samples = j.value("prediction_samples", std::vector<double>{});
  l.solve_samples = j.value("solve_samples", std::vector<double>{});
  if (j.contains("t_pr_cold") && !j["t_pr_cold"].is_null()) l.t_pr_cold = j["t_pr_cold"].get<double>();
  l.validate();
  return l;
}

}  // namespace pdelab
