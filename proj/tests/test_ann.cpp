#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pdelab/ann.hpp"
#include "pdelab/errors.hpp"
#include "pdelab/random.hpp"
#include "pdelab/regress.hpp"

using namespace pdelab;

namespace {

RegressionDataset line_data(std::uint64_t seed = 1) {
  SyntheticSpec s;
  s.seed = seed;
  return generate_synthetic(s);
}

TrainConfig descent_config() {
  TrainConfig c;
  c.learning_rate = 0.001;
  c.stop_tolerance = 1e-6;
  c.max_epochs = 10000;
  c.init_scheme = InitScheme::given;
  return c;
}

// Layer-by-layer forward pass through linalg, independent of the training kernel.
std::vector<double> oracle_forward(const MlpModel& m, std::vector<double> a) {
  for (const auto& l : m.layers()) {
    const DenseVector n = matvec(l.weights, a);
    a.assign(n.size(), 0.0);
    for (std::size_t i = 0; i < n.size(); ++i)
      a[i] = l.transfer == Transfer::tanh ? std::tanh(n[i] + l.biases[i]) : n[i] + l.biases[i];
  }
  return a;
}

double oracle_loss(const MlpModel& m, const Batch& b) {
  double s = 0.0;
  for (std::size_t r = 0; r < b.size(); ++r) {
    const auto in = b.inputs.row(r);
    const auto out = oracle_forward(m, {in.begin(), in.end()});
    for (std::size_t j = 0; j < out.size(); ++j) s += (b.targets(r, j) - out[j]) * (b.targets(r, j) - out[j]);
  }
  return s;
}

MlpModel random_model(Rng& rng, std::size_t max_layers, std::size_t max_units, std::size_t n_in, std::size_t n_out) {
  const std::size_t hidden = rng.below(max_layers);
  std::vector<std::size_t> sizes{n_in};
  std::vector<Transfer> transfers;
  for (std::size_t h = 0; h < hidden; ++h) {
    sizes.push_back(1 + rng.below(max_units));
    transfers.push_back(Transfer::tanh);
  }
  sizes.push_back(n_out);
  transfers.push_back(rng.uniform() < 0.5 ? Transfer::tanh : Transfer::purelin);
  return MlpModel::uniform_init(sizes, transfers, rng.next_u64());
}

Batch random_batch(Rng& rng, std::size_t n, std::size_t n_in, std::size_t n_out) {
  Batch b{DenseMatrix(n, n_in), DenseMatrix(n, n_out)};
  for (auto& v : b.inputs.values()) v = rng.uniform(-1, 1);
  for (auto& v : b.targets.values()) v = rng.uniform(-1, 1);
  return b;
}

}  // namespace

TEST_CASE("transfer function contracts") {
  for (double n = -10.0; n <= 10.0; n += 0.01) {
    CHECK(transfer_value(Transfer::purelin, n) == n);
    CHECK(transfer_slope(Transfer::purelin, transfer_value(Transfer::purelin, n)) == 1.0);
    const double a = transfer_value(Transfer::tanh, n);
    CHECK(std::abs(a) <= 1.0);
    // Derivative identity against a direct sech^2 evaluation.
    const double sech = 1.0 / std::cosh(n);
    CHECK(std::abs(transfer_slope(Transfer::tanh, a) - sech * sech) < 1e-12);
  }
  CHECK(std::abs(transfer_value(Transfer::tanh, 5.0)) < 1.0);
  CHECK(transfer_from_string("tanh") == Transfer::tanh);
  CHECK_THROWS_AS(transfer_from_string("relu"), ParameterError);
}

TEST_CASE("forward examples") {
  const std::vector<double> x{3.0};
  CHECK(forward(MlpModel::siso(2, -4), x)[0] == 2.0);
  const auto zero = MlpModel::zeros({3, 5, 4}, {Transfer::tanh, Transfer::purelin});
  for (double v : forward(zero, std::vector<double>{1, 2, 3})) CHECK(v == 0.0);
  CHECK(forward(MlpModel::siso(0, 0, Transfer::tanh), std::vector<double>{5.0})[0] == 0.0);
  CHECK_THROWS_AS(forward(zero, std::vector<double>{1, 2}), ShapeError);
}

TEST_CASE("model shape validation") {
  CHECK_THROWS_AS(MlpModel({2, 1}, {Layer{DenseMatrix(1, 3), {0.0}, Transfer::purelin}}), ShapeError);
  CHECK_THROWS_AS(MlpModel::zeros({2, 1}, {}), ShapeError);
  auto m = MlpModel::siso(1, 0);
  CHECK_THROWS_AS(m.set_standardization({0.0}, {0.0}), ParameterError);
  CHECK_THROWS_AS(m.set_standardization({0.0, 1.0}, {1.0, 1.0}), ShapeError);
}

TEST_CASE("loss examples") {
  const RegressionDataset clean({0, 1, 2, 3}, {-4, -2, 0, 2});
  CHECK(loss_sse(MlpModel::siso(2, -4), clean) == 0.0);
  const RegressionDataset ones({1, 2, 3, 4, 5}, {1, 1, 1, 1, 1});
  CHECK(loss_sse(MlpModel::siso(0, 0), ones) == 5.0);

  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto m = random_model(rng, 3, 5, 2, 3);
    const auto b = random_batch(rng, 7, 2, 3);
    CHECK(loss_sse(m, b) == doctest::Approx(oracle_loss(m, b)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(loss_sse(MlpModel::zeros({2, 1}, {Transfer::purelin}), ones), ShapeError);
}

TEST_CASE("single neuron gradients reduce to -2 e^T x and -2 e^T 1") {
  const auto d = line_data();
  const auto m = MlpModel::siso(1.0, -1.0);
  double gw = 0.0;
  double gb = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double e = d.targets()[i] - (1.0 * d.inputs()[i] - 1.0);
    gw += -2.0 * e * d.inputs()[i];
    gb += -2.0 * e;
  }
  const auto g = gradients(m, d);
  CHECK(g[0].d_weights(0, 0) == doctest::Approx(gw).epsilon(1e-13));
  CHECK(g[0].d_biases[0] == doctest::Approx(gb).epsilon(1e-13));
}

TEST_CASE("gradient special cases") {
  const auto d = line_data();
  const auto fit = fit_least_squares(d);
  const auto g = gradients(MlpModel::siso(fit.w, fit.b), d);
  CHECK(std::abs(g[0].d_weights(0, 0)) < 1e-8);
  CHECK(std::abs(g[0].d_biases[0]) < 1e-8);

  const RegressionDataset clean({0, 1, 2, 3}, {-4, -2, 0, 2});
  const auto z = gradients(MlpModel::siso(2, -4), clean);
  CHECK(z[0].d_weights(0, 0) == 0.0);
  CHECK(z[0].d_biases[0] == 0.0);
}

TEST_CASE("property: analytic gradients match a test-side central difference") {
  Rng rng(17);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n_in = 1 + rng.below(4);
    const std::size_t n_out = 1 + rng.below(4);
    const auto m = random_model(rng, 3, 5, n_in, n_out);
    const auto b = random_batch(rng, 6, n_in, n_out);
    const auto g = gradients(m, b);
    std::vector<double> analytic;
    for (const auto& lg : g) {
      analytic.insert(analytic.end(), lg.d_weights.values().begin(), lg.d_weights.values().end());
      analytic.insert(analytic.end(), lg.d_biases.begin(), lg.d_biases.end());
    }
    auto p = m.parameters();
    MlpModel probe = m;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double h = 1e-6;
      const double orig = p[i];
      p[i] = orig + h;
      probe.set_parameters(p);
      const double up = oracle_loss(probe, b);
      p[i] = orig - h;
      probe.set_parameters(p);
      const double down = oracle_loss(probe, b);
      p[i] = orig;
      const double fd = (up - down) / (2 * h);
      CHECK(std::abs(fd - analytic[i]) / std::max({1.0, std::abs(fd), std::abs(analytic[i])}) < 1e-6);
    }
  }
}

TEST_CASE("check_gradients") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto d = generate_synthetic(SyntheticSpec{20, rng.uniform(-3, 3), rng.uniform(-3, 3), -2, 2, 1, rng.next_u64()});
    const auto m = MlpModel::siso(rng.uniform(-2, 2), rng.uniform(-2, 2));
    CHECK(check_gradients(m, d, 1e-6) < 1e-8);
    CHECK(check_gradients(m, d, 1e-2) < 1e-8);
  }
  for (int t = 0; t < 20; ++t) {
    const auto m = random_model(rng, 3, 5, 2, 2);
    CHECK(check_gradients(m, random_batch(rng, 10, 2, 2), 1e-6) < 1e-6);
  }
  CHECK_THROWS_AS(check_gradients(MlpModel::siso(1, 1), line_data(), 0.0), ParameterError);
}

TEST_CASE("training from the optimum converges immediately") {
  const RegressionDataset clean({0, 1, 2, 3}, {-4, -2, 0, 2});
  auto cfg = descent_config();
  const auto r = train_steepest_descent(MlpModel::siso(2, -4), clean, cfg);
  CHECK(r.report.stop_reason == StopReason::converged);
  CHECK(r.report.epochs_run <= 2);
  CHECK(r.report.loss_history.back() == 0.0);
}

TEST_CASE("single neuron started at (1, -1) reaches the least-squares solution") {
  const auto d = line_data();
  const auto fit = fit_least_squares(d);
  const auto r = train_steepest_descent(MlpModel::siso(1.0, -1.0), d, descent_config());
  CHECK(r.report.stop_reason == StopReason::converged);
  CHECK(r.report.epochs_run == r.report.loss_history.size());
  const double last_change = std::abs(r.report.loss_history.back() - r.report.loss_history[r.report.epochs_run - 2]);
  CHECK(last_change < 1e-6);
  const auto& l = r.model.layers()[0];
  CHECK(std::abs(l.weights(0, 0) - fit.w) < 1e-2);
  CHECK(std::abs(l.biases[0] - fit.b) < 1e-2);
}

TEST_CASE("stability threshold of steepest descent on the line-fit problem") {
  // Hessian of the loss is 2 X^T X, so plain steepest descent is stable for
  // alpha < 1 / lambda_max(X^T X).
  const auto d = line_data();
  double sxx = 0.0;
  double sx = 0.0;
  for (double x : d.inputs()) {
    sxx += x * x;
    sx += x;
  }
  const double n = static_cast<double>(d.size());
  const double lambda_max = 0.5 * (sxx + n) + std::sqrt(0.25 * (sxx - n) * (sxx - n) + sx * sx);
  const double critical = 1.0 / lambda_max;
  CHECK(critical > 0.001);
  CHECK(critical < 1.0);

  auto cfg = descent_config();
  cfg.max_epochs = 20000;
  cfg.learning_rate = 0.9 * critical;
  CHECK(train_steepest_descent(MlpModel::siso(1, -1), d, cfg).report.stop_reason == StopReason::converged);
  cfg.learning_rate = 1.1 * critical;
  CHECK(train_steepest_descent(MlpModel::siso(1, -1), d, cfg).report.stop_reason == StopReason::diverged);
  cfg.learning_rate = 1.0;
  const auto blown = train_steepest_descent(MlpModel::siso(1, -1), d, cfg);
  CHECK(blown.report.stop_reason == StopReason::diverged);
  CHECK_FALSE(std::isfinite(blown.report.loss_history.back()));
}

TEST_CASE("property: monotone descent below the stability threshold") {
  Rng rng(23);
  for (int t = 0; t < 20; ++t) {
    const auto d = line_data(rng.next_u64());
    auto cfg = descent_config();
    cfg.learning_rate = rng.uniform(1e-5, 1e-3);
    const auto r = train_steepest_descent(MlpModel::siso(rng.uniform(-3, 3), rng.uniform(-3, 3)), d, cfg);
    for (std::size_t k = 2; k < r.report.loss_history.size(); ++k)
      CHECK(r.report.loss_history[k] <= r.report.loss_history[k - 1]);
  }
}

TEST_CASE("training is deterministic and honours max_epochs") {
  Rng rng(29);
  const auto b = random_batch(rng, 12, 3, 4);
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.max_epochs = 300;
  cfg.stop_tolerance = 1e-15;
  cfg.init_seed = 99;
  const auto shape = MlpModel::zeros({3, 6, 4}, {Transfer::tanh, Transfer::purelin});
  const auto a = train_steepest_descent(shape, b, cfg);
  const auto c = train_steepest_descent(shape, b, cfg);
  CHECK(a.model == c.model);
  CHECK(a.report.loss_history == c.report.loss_history);
  CHECK(a.report.stop_reason == StopReason::max_epochs);
  CHECK(a.report.epochs_run == 300);

  cfg.init_seed = 100;
  CHECK(train_steepest_descent(shape, b, cfg).model != a.model);

  TrainConfig bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(train_steepest_descent(shape, b, bad), ParameterError);
}

TEST_CASE("uniform initialization range") {
  const auto m = MlpModel::uniform_init({3, 16, 16, 5}, {Transfer::tanh, Transfer::tanh, Transfer::purelin}, 8);
  for (double p : m.parameters()) {
    CHECK(p >= -0.5);
    CHECK(p < 0.5);
  }
  CHECK(m.parameter_count() == 3 * 16 + 16 + 16 * 16 + 16 + 16 * 5 + 5);
}

TEST_CASE("serialization") {
  auto m = MlpModel::uniform_init({3, 4, 2}, {Transfer::tanh, Transfer::purelin}, 1);
  m.set_standardization({0.5, 0.0, -1.0}, {2.0, 1.0, 4.0});
  CHECK(mlp_from_json(nlohmann::json::parse(to_json(m).dump())) == m);

  TrainReport r{{3.0, 2.0, 1.5}, 3, StopReason::converged, 0.25};
  const auto j = to_json(r);
  CHECK(j.at("stop_reason") == "converged");
  CHECK(j.at("epochs_run") == 3);
  CHECK(loss_csv(r) == "epoch,loss\n1,3\n2,2\n3,1.5\n");
}
