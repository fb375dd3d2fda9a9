#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pdelab/ann.hpp"
#include "pdelab/linalg.hpp"
#include "pdelab/pde.hpp"

namespace pdelab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double mid() const noexcept { return 0.5 * (lo + hi); }
  /// Same midpoint, half-width multiplied by `factor`.
  Interval scaled(double factor) const noexcept;
  bool operator==(const Interval&) const = default;
};

enum class Sampling { uniform_random, grid };

std::string_view to_string(Sampling s) noexcept;
Sampling sampling_from_string(std::string_view s);

/// Box of (g, y0, y1) values on a fixed domain [x0, x1].
struct ParameterSpace {
  Interval g_range{0.0, 4.0};
  Interval y0_range{0.0, 0.0};
  Interval y1_range{0.0, 0.0};
  double x0 = 0.0;
  double x1 = 1.0;
  Sampling sampling = Sampling::uniform_random;
  /// For grid sampling this must be a perfect cube k^3 (k points per axis).
  std::size_t n_samples = 64;
  std::uint64_t master_seed = 0;

  void validate() const;
  bool operator==(const ParameterSpace&) const = default;
};

using SurrogateInput = std::array<double, 3>;  // (g, y0, y1)

/// Deterministic sample list. Uniform sampling draws sample i from its own
/// stream seeded with derive_seed(master_seed, i).
std::vector<SurrogateInput> sample_parameters(const ParameterSpace& space);

enum class SplitTag { train, val, test };

std::string_view to_string(SplitTag t) noexcept;
SplitTag split_from_string(std::string_view s);

struct SurrogateDataset {
  DenseMatrix inputs;   // n x 3
  DenseMatrix outputs;  // n x M
  std::vector<double> grid;
  std::vector<SplitTag> split;
  double generation_time_s = 0.0;

  std::size_t size() const noexcept { return inputs.rows(); }
  std::size_t nodes() const noexcept { return grid.size(); }
  std::vector<std::size_t> rows_in(SplitTag t) const;
  /// Batch of the rows tagged `t`; nullopt if there are none.
  std::optional<Batch> batch(SplitTag t) const;
};

/// Worker count for data generation: PDELAB_THREADS if set (>= 1), otherwise
/// the hardware concurrency.
std::size_t generation_threads();

/// Runs solve_fdm for every sample on the shared grid; all rows start tagged
/// train. `threads == 0` means generation_threads(). Output does not depend on
/// the worker count.
SurrogateDataset generate_dataset(const ParameterSpace& space, std::size_t n_nodes = kDefaultNodes,
                                  std::size_t threads = 0);

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;

  void validate() const;
  bool operator==(const SplitRatios&) const = default;
};

/// Seeded permutation, then contiguous train/val/test blocks. val and test
/// get floor(n * ratio) rows, the rounding residue goes to train.
SurrogateDataset split_dataset(SurrogateDataset d, const SplitRatios& ratios, std::uint64_t seed);

struct ArchSpec {
  std::vector<std::size_t> hidden;
  Transfer hidden_transfer = Transfer::tanh;
  Transfer output_transfer = Transfer::purelin;

  bool operator==(const ArchSpec&) const = default;
};

/// Layer sizes [3, hidden..., n_outputs].
std::vector<std::size_t> layer_sizes(const ArchSpec& arch, std::size_t n_outputs, std::size_t n_inputs = 3);
std::string describe(const ArchSpec& arch, std::size_t n_outputs, std::size_t n_inputs = 3);

/// Trains on the train rows only. Inputs are standardized with the train
/// rows' mean and range (range 0 maps to scale 1); the standardization lives
/// inside the returned model.
TrainResult train_surrogate(const SurrogateDataset& d, const ArchSpec& arch, const TrainConfig& cfg);

struct EvalOptions {
  std::vector<double> extrap_multipliers{1.0, 1.5, 2.0, 4.0};
  std::vector<double> perturbations{0.0, 0.01, 0.1};
  std::size_t n_extrap_samples = 32;
  std::uint64_t seed = 0;

  bool operator==(const EvalOptions&) const = default;
};

struct ExtrapolationPoint {
  double multiplier = 1.0;
  double rmse = 0.0;
};

struct SensitivityRow {
  double perturbation = 0.0;
  double max_output_deviation = 0.0;
  /// Same perturbation applied to the solver, for comparison.
  double max_truth_deviation = 0.0;
};

struct EvalReport {
  std::optional<double> rmse_train;
  std::optional<double> rmse_val;
  std::optional<double> rmse_test;
  std::vector<ExtrapolationPoint> extrapolation_curve;
  std::vector<SensitivityRow> sensitivity_table;
  /// RMSE of predictions resampled onto a 2x finer solver grid.
  std::optional<double> discretization_transfer;
  std::size_t fine_nodes = 0;
  /// Mean |prediction - boundary value| at the two end nodes.
  double boundary_violation = 0.0;
  /// "test", or "all" when the test split is empty.
  std::string probe_rows = "test";
};

/// Root mean square over all entries of predicted vs target rows.
double rmse(const MlpModel& m, const Batch& data);

EvalReport evaluate(const MlpModel& m, const SurrogateDataset& d, const ParameterSpace& space,
                    const EvalOptions& opts);

/// Piecewise-linear resampling of nodal values onto new coordinates.
std::vector<double> resample_linear(std::span<const double> nodes, std::span<const double> values,
                                    std::span<const double> at);

struct DataCurvePoint {
  std::size_t n_samples = 0;
  double mean_test_rmse = 0.0;
  std::vector<double> per_seed;
};

/// Test RMSE against dataset size, averaged over seeds. For each seed the
/// space's master seed, the split seed and the init seed are all replaced by
/// derived values.
std::vector<DataCurvePoint> data_curve(const ParameterSpace& space, std::size_t n_nodes,
                                       const std::vector<std::size_t>& sample_counts,
                                       const std::vector<std::uint64_t>& seeds, const ArchSpec& arch,
                                       const TrainConfig& cfg, const SplitRatios& ratios);

struct ArchSweepRow {
  ArchSpec arch;
  std::optional<double> rmse_train;
  std::optional<double> rmse_val;
  std::optional<double> rmse_test;
  std::size_t epochs_run = 0;
  StopReason stop_reason = StopReason::max_epochs;
};

std::vector<ArchSweepRow> arch_sweep(const SurrogateDataset& d, const std::vector<ArchSpec>& archs,
                                     const TrainConfig& cfg);

/// The default sweep ladder: [3,M], [3,8,M], [3,16,16,M].
std::vector<ArchSpec> default_arch_ladder();

std::string inputs_csv(const SurrogateDataset& d);
std::string outputs_csv(const SurrogateDataset& d);
SurrogateDataset dataset_from_csv(std::string_view inputs, std::string_view outputs, std::vector<double> grid);

nlohmann::json to_json(const EvalReport& r);
std::string extrapolation_csv(const EvalReport& r);
std::string sensitivity_csv(const EvalReport& r);
std::string data_curve_csv(const std::vector<DataCurvePoint>& curve);
std::string arch_sweep_csv(const std::vector<ArchSweepRow>& rows, std::size_t n_outputs);

}  // namespace pdelab
