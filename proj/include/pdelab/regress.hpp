#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdelab/linalg.hpp"

namespace pdelab {

struct DatasetMeta {
  std::uint64_t seed = 0;
  double noise_amplitude = 0.0;
  std::optional<double> true_w;
  std::optional<double> true_b;

  bool operator==(const DatasetMeta&) const = default;
};

/// Paired (x, y) samples, N >= 2.
class RegressionDataset {
 public:
  RegressionDataset(std::vector<double> inputs, std::vector<double> targets, DatasetMeta meta = {});

  const std::vector<double>& inputs() const noexcept { return inputs_; }
  const std::vector<double>& targets() const noexcept { return targets_; }
  const DatasetMeta& meta() const noexcept { return meta_; }
  std::size_t size() const noexcept { return inputs_.size(); }

  bool operator==(const RegressionDataset&) const = default;

 private:
  std::vector<double> inputs_;
  std::vector<double> targets_;
  DatasetMeta meta_;
};

/// y = w x + b
struct LinearModel {
  double w = 0.0;
  double b = 0.0;

  double operator()(double x) const noexcept { return w * x + b; }
  bool operator==(const LinearModel&) const = default;
};

struct SyntheticSpec {
  std::size_t n = 100;
  double true_w = 2.0;
  double true_b = -4.0;
  double x_lo = -4.0;
  double x_hi = 4.0;
  double noise_amplitude = 2.0;
  std::uint64_t seed = 1;

  bool operator==(const SyntheticSpec&) const = default;
};

/// All n inputs are drawn first, then all n noise values, from one seeded
/// stream: x ~ U[lo, hi), e ~ U[-amp, amp), y = w x + b + e.
RegressionDataset generate_synthetic(const SyntheticSpec& spec);

/// N x 2 matrix with columns [x, 1].
DenseMatrix build_design_matrix(const RegressionDataset& d);

/// beta = X^+ y. Identical inputs raise SingularMatrixError.
LinearModel fit_least_squares(const RegressionDataset& d);

/// Sum of squared residuals of a linear model.
double sse(const LinearModel& m, const RegressionDataset& d);

/// CSV `x,y`.
std::string to_csv(const RegressionDataset& d);
/// Reads `x,y` CSV; meta is left default.
RegressionDataset dataset_from_csv(std::string_view text);

nlohmann::json meta_to_json(const DatasetMeta& meta);
nlohmann::json to_json(const LinearModel& m);
LinearModel linear_model_from_json(const nlohmann::json& j);

}  // namespace pdelab
