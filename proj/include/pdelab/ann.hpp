#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pdelab/linalg.hpp"
#include "pdelab/regress.hpp"

namespace pdelab {

enum class Transfer { purelin, tanh };

std::string_view to_string(Transfer t) noexcept;
Transfer transfer_from_string(std::string_view s);

/// f(n)
double transfer_value(Transfer t, double n) noexcept;
/// f'(n) expressed through the activation a = f(n): 1 for purelin, 1 - a^2 for tanh.
double transfer_slope(Transfer t, double activation) noexcept;

/// One fully connected layer: a = f(W a_prev + b), W is (size x prev_size).
struct Layer {
  DenseMatrix weights;
  std::vector<double> biases;
  Transfer transfer = Transfer::purelin;

  bool operator==(const Layer&) const = default;
};

/// Multi-layer perceptron. Optional per-input affine standardization
/// (x - shift) / scale is applied before the first layer; empty vectors mean
/// identity.
class MlpModel {
 public:
  MlpModel(std::vector<std::size_t> layer_sizes, std::vector<Layer> layers,
           std::vector<double> input_shift = {}, std::vector<double> input_scale = {});

  /// Zero weights and biases for the given sizes [n_in, h1, ..., n_out].
  static MlpModel zeros(std::vector<std::size_t> layer_sizes, std::vector<Transfer> transfers);
  /// Every parameter drawn uniform on [-0.5, 0.5) from `seed`, layer by layer,
  /// weights row-major before biases.
  static MlpModel uniform_init(std::vector<std::size_t> layer_sizes, std::vector<Transfer> transfers,
                               std::uint64_t seed);
  /// Single neuron y = f(w x + b).
  static MlpModel siso(double w, double b, Transfer t = Transfer::purelin);

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::vector<Layer>& layers() noexcept { return layers_; }
  std::size_t input_size() const noexcept { return sizes_.front(); }
  std::size_t output_size() const noexcept { return sizes_.back(); }

  const std::vector<double>& input_shift() const noexcept { return shift_; }
  const std::vector<double>& input_scale() const noexcept { return scale_; }
  void set_standardization(std::vector<double> shift, std::vector<double> scale);

  std::size_t parameter_count() const noexcept;
  /// Flat parameter view in the uniform_init order.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> p);

  bool operator==(const MlpModel&) const = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<Layer> layers_;
  std::vector<double> shift_;
  std::vector<double> scale_;
};

/// Row-per-sample inputs (N x n_in) and targets (N x n_out).
struct Batch {
  DenseMatrix inputs;
  DenseMatrix targets;

  std::size_t size() const noexcept { return inputs.rows(); }
};

Batch to_batch(const RegressionDataset& d);

DenseVector forward(const MlpModel& m, std::span<const double> input);

/// Sum over samples and outputs of squared errors.
double loss_sse(const MlpModel& m, const Batch& data);
double loss_sse(const MlpModel& m, const RegressionDataset& data);

struct LayerGradient {
  DenseMatrix d_weights;
  std::vector<double> d_biases;
};

/// dL/dW and dL/db for every layer, keeping the factor 2 of the unnormalized
/// squared-error loss. For one purelin neuron: dL/dw = -2 e^T x, dL/db = -2 e^T 1.
std::vector<LayerGradient> gradients(const MlpModel& m, const Batch& data);
std::vector<LayerGradient> gradients(const MlpModel& m, const RegressionDataset& data);

enum class InitScheme { uniform, given };

std::string_view to_string(InitScheme s) noexcept;
InitScheme init_scheme_from_string(std::string_view s);

struct TrainConfig {
  double learning_rate = 0.001;
  double stop_tolerance = 1.0e-6;
  std::size_t max_epochs = 100;
  std::uint64_t init_seed = 0;
  /// uniform: re-draw parameters from init_seed; given: start from the model as passed.
  InitScheme init_scheme = InitScheme::uniform;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

enum class StopReason { converged, max_epochs, diverged };

std::string_view to_string(StopReason r) noexcept;

struct TrainReport {
  std::vector<double> loss_history;
  std::size_t epochs_run = 0;
  StopReason stop_reason = StopReason::max_epochs;
  double wall_time_s = 0.0;
};

struct TrainResult {
  MlpModel model;
  TrainReport report;
};

/// Full-batch steepest descent. Each epoch records the loss of the current
/// parameters, stops if it is non-finite (diverged) or if it changed by less
/// than stop_tolerance since the previous epoch (converged), and otherwise
/// applies theta <- theta - alpha dL/dtheta.
TrainResult train_steepest_descent(MlpModel m, const Batch& data, const TrainConfig& cfg);
TrainResult train_steepest_descent(MlpModel m, const RegressionDataset& data, const TrainConfig& cfg);

/// Worst |analytic - central difference| / max(1, |analytic|, |numeric|)
/// over every parameter.
double check_gradients(const MlpModel& m, const Batch& data, double step);
double check_gradients(const MlpModel& m, const RegressionDataset& data, double step);

nlohmann::json to_json(const MlpModel& m);
MlpModel mlp_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainReport& r);
nlohmann::json to_json(const TrainConfig& c);
/// CSV `epoch,loss`, epochs counted from 1.
std::string loss_csv(const TrainReport& r);

}  // namespace pdelab
