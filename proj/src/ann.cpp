#include "pdelab/ann.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "pdelab/errors.hpp"
#include "pdelab/random.hpp"
#include "pdelab/textio.hpp"

namespace pdelab {

std::string_view to_string(Transfer t) noexcept { return t == Transfer::tanh ? "tanh" : "purelin"; }

Transfer transfer_from_string(std::string_view s) {
  if (s == "purelin") return Transfer::purelin;
  if (s == "tanh") return Transfer::tanh;
  throw ParameterError("unknown transfer function '" + std::string(s) + "'");
}

double transfer_value(Transfer t, double n) noexcept { return t == Transfer::tanh ? std::tanh(n) : n; }

double transfer_slope(Transfer t, double activation) noexcept {
  return t == Transfer::tanh ? 1.0 - activation * activation : 1.0;
}

std::string_view to_string(InitScheme s) noexcept { return s == InitScheme::given ? "given" : "uniform"; }

InitScheme init_scheme_from_string(std::string_view s) {
  if (s == "uniform") return InitScheme::uniform;
  if (s == "given") return InitScheme::given;
  throw ParameterError("unknown init scheme '" + std::string(s) + "'");
}

std::string_view to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_epochs: return "max_epochs";
    case StopReason::diverged: return "diverged";
  }
  return "unknown";
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ParameterError("TrainConfig: learning rate must be > 0");
  if (!(stop_tolerance > 0.0)) throw ParameterError("TrainConfig: stop tolerance must be > 0");
  if (max_epochs < 1) throw ParameterError("TrainConfig: max_epochs must be >= 1");
}

// ---------------------------------------------------------------------------
// MlpModel

MlpModel::MlpModel(std::vector<std::size_t> layer_sizes, std::vector<Layer> layers, std::vector<double> input_shift,
                   std::vector<double> input_scale)
    : sizes_(std::move(layer_sizes)), layers_(std::move(layers)) {
  if (sizes_.size() < 2) throw ShapeError("MlpModel: need at least input and output sizes");
  if (layers_.size() != sizes_.size() - 1)
    throw ShapeError("MlpModel: " + std::to_string(layers_.size()) + " layers for " + std::to_string(sizes_.size()) +
                     " sizes");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    if (l.weights.rows() != sizes_[k + 1] || l.weights.cols() != sizes_[k] || l.biases.size() != sizes_[k + 1])
      throw ShapeError("MlpModel: layer " + std::to_string(k) + " shape inconsistent with layer sizes");
  }
  set_standardization(std::move(input_shift), std::move(input_scale));
}

void MlpModel::set_standardization(std::vector<double> shift, std::vector<double> scale) {
  if (shift.size() != scale.size() || (!shift.empty() && shift.size() != input_size()))
    throw ShapeError("MlpModel: standardization vectors must be empty or match the input size");
  for (double s : scale)
    if (!(s > 0.0)) throw ParameterError("MlpModel: standardization scale must be > 0");
  shift_ = std::move(shift);
  scale_ = std::move(scale);
}

MlpModel MlpModel::zeros(std::vector<std::size_t> layer_sizes, std::vector<Transfer> transfers) {
  if (layer_sizes.size() < 2 || transfers.size() != layer_sizes.size() - 1)
    throw ShapeError("MlpModel::zeros: need one transfer per layer");
  std::vector<Layer> layers;
  for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
    if (layer_sizes[k] == 0 || layer_sizes[k + 1] == 0) throw ShapeError("MlpModel: layer sizes must be >= 1");
    layers.push_back({DenseMatrix(layer_sizes[k + 1], layer_sizes[k]), std::vector<double>(layer_sizes[k + 1], 0.0),
                      transfers[k]});
  }
  return MlpModel(std::move(layer_sizes), std::move(layers));
}

MlpModel MlpModel::uniform_init(std::vector<std::size_t> layer_sizes, std::vector<Transfer> transfers,
                                std::uint64_t seed) {
  MlpModel m = zeros(std::move(layer_sizes), std::move(transfers));
  Rng rng(seed);
  std::vector<double> p(m.parameter_count());
  for (auto& v : p) v = rng.uniform(-0.5, 0.5);
  m.set_parameters(p);
  return m;
}

MlpModel MlpModel::siso(double w, double b, Transfer t) {
  return MlpModel({1, 1}, {Layer{DenseMatrix(1, 1, w), {b}, t}});
}

std::size_t MlpModel::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.values().size() + l.biases.size();
  return n;
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  for (const auto& l : layers_) {
    p.insert(p.end(), l.weights.values().begin(), l.weights.values().end());
    p.insert(p.end(), l.biases.begin(), l.biases.end());
  }
  return p;
}

void MlpModel::set_parameters(std::span<const double> p) {
  if (p.size() != parameter_count()) throw ShapeError("MlpModel::set_parameters: wrong parameter count");
  std::size_t at = 0;
  for (auto& l : layers_) {
    for (auto& w : l.weights.values()) w = p[at++];
    for (auto& b : l.biases) b = p[at++];
  }
}

// ---------------------------------------------------------------------------
// Forward / backward

Batch to_batch(const RegressionDataset& d) {
  return {DenseMatrix(d.size(), 1, d.inputs()), DenseMatrix(d.size(), 1, d.targets())};
}

namespace {

void check_batch(const MlpModel& m, const Batch& data) {
  if (data.inputs.cols() != m.input_size() || data.targets.cols() != m.output_size() ||
      data.inputs.rows() != data.targets.rows())
    throw ShapeError("model " + std::to_string(m.input_size()) + "->" + std::to_string(m.output_size()) +
                     " does not match batch " + std::to_string(data.inputs.cols()) + "->" +
                     std::to_string(data.targets.cols()));
}

// Activations per layer for one sample; acts[0] is the (standardized) input.
class Workspace {
 public:
  explicit Workspace(const MlpModel& m) {
    for (std::size_t s : m.layer_sizes()) acts.emplace_back(s, 0.0);
    for (std::size_t k = 1; k < m.layer_sizes().size(); ++k) deltas.emplace_back(m.layer_sizes()[k], 0.0);
  }

  void run(const MlpModel& m, std::span<const double> input) {
    auto& a0 = acts[0];
    const auto& shift = m.input_shift();
    const auto& scale = m.input_scale();
    for (std::size_t i = 0; i < a0.size(); ++i) a0[i] = shift.empty() ? input[i] : (input[i] - shift[i]) / scale[i];
    for (std::size_t k = 0; k < m.layers().size(); ++k) {
      const Layer& l = m.layers()[k];
      const auto& prev = acts[k];
      auto& out = acts[k + 1];
      for (std::size_t r = 0; r < out.size(); ++r) {
        double n = l.biases[r];
        const auto row = l.weights.row(r);
        for (std::size_t c = 0; c < prev.size(); ++c) n += row[c] * prev[c];
        out[r] = transfer_value(l.transfer, n);
      }
    }
  }

  std::vector<std::vector<double>> acts;
  std::vector<std::vector<double>> deltas;
};

std::vector<LayerGradient> zero_gradients(const MlpModel& m) {
  std::vector<LayerGradient> g;
  for (const auto& l : m.layers())
    g.push_back({DenseMatrix(l.weights.rows(), l.weights.cols()), std::vector<double>(l.biases.size(), 0.0)});
  return g;
}

// Loss over the batch; accumulates gradients when `grads` is non-null.
double evaluate(const MlpModel& m, const Batch& data, std::vector<LayerGradient>* grads) {
  check_batch(m, data);
  Workspace ws(m);
  const std::size_t n_layers = m.layers().size();
  double loss = 0.0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    ws.run(m, data.inputs.row(s));
    const auto& out = ws.acts.back();
    const auto target = data.targets.row(s);
    auto& delta_out = ws.deltas.back();
    for (std::size_t j = 0; j < out.size(); ++j) {
      const double e = target[j] - out[j];
      loss += e * e;
      // dL/dn = -2 e f'(n)
      delta_out[j] = -2.0 * e * transfer_slope(m.layers().back().transfer, out[j]);
    }
    if (!grads) continue;
    for (std::size_t k = n_layers; k-- > 0;) {
      const auto& delta = ws.deltas[k];
      const auto& prev = ws.acts[k];
      auto& g = (*grads)[k];
      for (std::size_t r = 0; r < delta.size(); ++r) {
        auto grow = g.d_weights.row(r);
        for (std::size_t c = 0; c < prev.size(); ++c) grow[c] += delta[r] * prev[c];
        g.d_biases[r] += delta[r];
      }
      if (k == 0) break;
      const Layer& l = m.layers()[k];
      auto& below = ws.deltas[k - 1];
      const Transfer below_transfer = m.layers()[k - 1].transfer;
      for (std::size_t c = 0; c < below.size(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < delta.size(); ++r) s += l.weights(r, c) * delta[r];
        below[c] = s * transfer_slope(below_transfer, prev[c]);
      }
    }
  }
  return loss;
}

}  // namespace

DenseVector forward(const MlpModel& m, std::span<const double> input) {
  if (input.size() != m.input_size())
    throw ShapeError("forward: input length " + std::to_string(input.size()) + ", model expects " +
                     std::to_string(m.input_size()));
  Workspace ws(m);
  ws.run(m, input);
  return DenseVector(ws.acts.back());
}

double loss_sse(const MlpModel& m, const Batch& data) { return evaluate(m, data, nullptr); }
double loss_sse(const MlpModel& m, const RegressionDataset& data) { return loss_sse(m, to_batch(data)); }

std::vector<LayerGradient> gradients(const MlpModel& m, const Batch& data) {
  auto g = zero_gradients(m);
  evaluate(m, data, &g);
  return g;
}

std::vector<LayerGradient> gradients(const MlpModel& m, const RegressionDataset& data) {
  return gradients(m, to_batch(data));
}

// ---------------------------------------------------------------------------
// Training

TrainResult train_steepest_descent(MlpModel m, const Batch& data, const TrainConfig& cfg) {
  cfg.validate();
  check_batch(m, data);
  if (cfg.init_scheme == InitScheme::uniform) {
    std::vector<Transfer> transfers;
    for (const auto& l : m.layers()) transfers.push_back(l.transfer);
    MlpModel fresh = MlpModel::uniform_init(m.layer_sizes(), transfers, cfg.init_seed);
    fresh.set_standardization(m.input_shift(), m.input_scale());
    m = std::move(fresh);
  }

  const auto start = std::chrono::steady_clock::now();
  TrainReport report;
  report.loss_history.reserve(std::min<std::size_t>(cfg.max_epochs, 1u << 16));
  auto grads = zero_gradients(m);
  double prev = 0.0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    for (auto& g : grads) {
      std::fill(g.d_weights.values().begin(), g.d_weights.values().end(), 0.0);
      std::fill(g.d_biases.begin(), g.d_biases.end(), 0.0);
    }
    const double loss = evaluate(m, data, &grads);
    report.loss_history.push_back(loss);
    if (!std::isfinite(loss)) {
      report.stop_reason = StopReason::diverged;
      break;
    }
    if (epoch > 1 && std::abs(loss - prev) < cfg.stop_tolerance) {
      report.stop_reason = StopReason::converged;
      break;
    }
    prev = loss;
    if (epoch == cfg.max_epochs) {
      report.stop_reason = StopReason::max_epochs;
      break;
    }
    for (std::size_t k = 0; k < grads.size(); ++k) {
      auto& l = m.layers()[k];
      auto& w = l.weights.values();
      const auto& dw = grads[k].d_weights.values();
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= cfg.learning_rate * dw[i];
      for (std::size_t i = 0; i < l.biases.size(); ++i) l.biases[i] -= cfg.learning_rate * grads[k].d_biases[i];
    }
  }
  report.epochs_run = report.loss_history.size();
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(m), std::move(report)};
}

TrainResult train_steepest_descent(MlpModel m, const RegressionDataset& data, const TrainConfig& cfg) {
  return train_steepest_descent(std::move(m), to_batch(data), cfg);
}

double check_gradients(const MlpModel& m, const Batch& data, double step) {
  if (!(step > 0.0)) throw ParameterError("check_gradients: step must be > 0");
  const auto analytic = gradients(m, data);
  std::vector<double> flat;
  for (const auto& g : analytic) {
    flat.insert(flat.end(), g.d_weights.values().begin(), g.d_weights.values().end());
    flat.insert(flat.end(), g.d_biases.begin(), g.d_biases.end());
  }
  MlpModel probe = m;
  std::vector<double> p = m.parameters();
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double orig = p[i];
    p[i] = orig + step;
    probe.set_parameters(p);
    const double up = loss_sse(probe, data);
    p[i] = orig - step;
    probe.set_parameters(p);
    const double down = loss_sse(probe, data);
    p[i] = orig;
    const double numeric = (up - down) / (2.0 * step);
    const double scale = std::max({1.0, std::abs(flat[i]), std::abs(numeric)});
    worst = std::max(worst, std::abs(flat[i] - numeric) / scale);
  }
  return worst;
}

double check_gradients(const MlpModel& m, const RegressionDataset& data, double step) {
  return check_gradients(m, to_batch(data), step);
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const MlpModel& m) {
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  nlohmann::json transfers = nlohmann::json::array();
  for (const auto& l : m.layers()) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < l.weights.rows(); ++r) {
      const auto row = l.weights.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    weights.push_back(std::move(rows));
    biases.push_back(l.biases);
    transfers.push_back(std::string(to_string(l.transfer)));
  }
  return {{"layer_sizes", m.layer_sizes()}, {"weights", weights},          {"biases", biases},
          {"transfers", transfers},         {"input_shift", m.input_shift()}, {"input_scale", m.input_scale()}};
}

MlpModel mlp_from_json(const nlohmann::json& j) {
  const auto sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  const auto& transfers = j.at("transfers");
  if (sizes.size() < 2 || weights.size() != sizes.size() - 1 || biases.size() != weights.size() ||
      transfers.size() != weights.size())
    throw ShapeError("MlpModel JSON: inconsistent layer counts");
  std::vector<Layer> layers;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    std::vector<double> flat;
    for (const auto& row : weights[k]) {
      const auto r = row.get<std::vector<double>>();
      if (r.size() != sizes[k]) throw ShapeError("MlpModel JSON: ragged weight matrix");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    layers.push_back({DenseMatrix(sizes[k + 1], sizes[k], std::move(flat)), biases[k].get<std::vector<double>>(),
                      transfer_from_string(transfers[k].get<std::string>())});
  }
  return MlpModel(sizes, std::move(layers), j.value("input_shift", std::vector<double>{}),
                  j.value("input_scale", std::vector<double>{}));
}

nlohmann::json to_json(const TrainReport& r) {
  nlohmann::json history = nlohmann::json::array();
  for (double v : r.loss_history) history.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr));
  return {{"loss_history", history},
          {"epochs_run", r.epochs_run},
          {"stop_reason", std::string(to_string(r.stop_reason))},
          {"wall_time_s", r.wall_time_s}};
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"stop_tolerance", c.stop_tolerance},
          {"max_epochs", c.max_epochs},
          {"init_seed", c.init_seed},
          {"init_scheme", std::string(to_string(c.init_scheme))}};
}

std::string loss_csv(const TrainReport& r) {
  std::ostringstream os;
  os << "epoch,loss\n";
  for (std::size_t i = 0; i < r.loss_history.size(); ++i) os << (i + 1) << ',' << format_real(r.loss_history[i]) << '\n';
  return os.str();
}

}  // namespace pdelab
