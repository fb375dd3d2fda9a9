#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pdelab/errors.hpp"
#include "pdelab/random.hpp"
#include "pdelab/regress.hpp"

using namespace pdelab;

namespace {

// X^T (y - X beta)
std::pair<double, double> normal_residual(const LinearModel& m, const RegressionDataset& d) {
  double rx = 0.0;
  double r1 = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double e = d.targets()[i] - m(d.inputs()[i]);
    rx += d.inputs()[i] * e;
    r1 += e;
  }
  return {rx, r1};
}

SyntheticSpec random_spec(Rng& rng) {
  SyntheticSpec s;
  s.n = 2 + rng.below(200);
  s.true_w = rng.uniform(-5, 5);
  s.true_b = rng.uniform(-5, 5);
  s.x_lo = rng.uniform(-10, 0);
  s.x_hi = s.x_lo + rng.uniform(0.5, 10);
  s.noise_amplitude = rng.uniform(0, 3);
  s.seed = rng.next_u64();
  return s;
}

}  // namespace

TEST_CASE("generate_synthetic") {
  const SyntheticSpec defaults{};
  const auto d = generate_synthetic(defaults);
  CHECK(d.size() == 100);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double x = d.inputs()[i];
    CHECK(x >= -4.0);
    CHECK(x < 4.0);
    const double e = d.targets()[i] - (2.0 * x - 4.0);
    CHECK(std::abs(e) <= 2.0 + 1e-12);
  }
  CHECK(d.meta().seed == defaults.seed);
  CHECK(*d.meta().true_w == 2.0);
  CHECK(generate_synthetic(defaults) == d);

  SyntheticSpec clean = defaults;
  clean.noise_amplitude = 0.0;
  const auto c = generate_synthetic(clean);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c.targets()[i] == 2.0 * c.inputs()[i] - 4.0);

  SyntheticSpec other = defaults;
  other.seed = 2;
  CHECK(generate_synthetic(other).inputs() != d.inputs());
}

TEST_CASE("generate_synthetic rejects bad parameters") {
  SyntheticSpec s;
  s.n = 1;
  CHECK_THROWS_AS(generate_synthetic(s), ParameterError);
  s = {};
  s.x_lo = s.x_hi;
  CHECK_THROWS_AS(generate_synthetic(s), ParameterError);
  s = {};
  s.noise_amplitude = -1;
  CHECK_THROWS_AS(generate_synthetic(s), ParameterError);
}

TEST_CASE("design matrix") {
  CHECK(build_design_matrix(RegressionDataset({1, 2}, {0, 0})) == DenseMatrix{{1, 1}, {2, 1}});
  CHECK(build_design_matrix(RegressionDataset({-4, 0, 4}, {0, 0, 0})) == DenseMatrix{{-4, 1}, {0, 1}, {4, 1}});
  CHECK_THROWS_AS(RegressionDataset({0}, {0}), ParameterError);
  CHECK_THROWS_AS(RegressionDataset({0, 1}, {0}), ShapeError);
}

TEST_CASE("fit examples") {
  const auto exact = fit_least_squares(RegressionDataset({0, 1, 2}, {-4, -2, 0}));
  CHECK(std::abs(exact.w - 2.0) < 1e-12);
  CHECK(std::abs(exact.b + 4.0) < 1e-12);

  CHECK_THROWS_AS(fit_least_squares(RegressionDataset({3, 3, 3}, {1, 2, 3})), SingularMatrixError);

  // Default recipe, canonical seed: inside the Monte-Carlo 99% band
  // (half-widths 0.129 / 0.298, see tests/oracles/line_fit_band.py).
  const auto m = fit_least_squares(generate_synthetic(SyntheticSpec{}));
  CHECK(std::abs(m.w - 2.0) < 0.129);
  CHECK(std::abs(m.b + 4.0) < 0.298);
}

TEST_CASE("property: normal-equation optimality and perturbation optimality") {
  Rng rng(101);
  for (int t = 0; t < 100; ++t) {
    const auto d = generate_synthetic(random_spec(rng));
    const auto m = fit_least_squares(d);
    const auto [rx, r1] = normal_residual(m, d);
    CHECK(std::max(std::abs(rx), std::abs(r1)) < 1e-8);

    const double best = sse(m, d);
    for (int k = 0; k < 100; ++k) {
      const double angle = rng.uniform(0, 2 * M_PI);
      const LinearModel moved{m.w + 1e-3 * std::cos(angle), m.b + 1e-3 * std::sin(angle)};
      CHECK(best <= sse(moved, d));
    }
  }
}

TEST_CASE("property: noiseless exactness and shift equivariance") {
  Rng rng(202);
  for (int t = 0; t < 100; ++t) {
    auto spec = random_spec(rng);
    spec.noise_amplitude = 0.0;
    const auto clean = fit_least_squares(generate_synthetic(spec));
    CHECK(std::abs(clean.w - spec.true_w) < 1e-10);
    CHECK(std::abs(clean.b - spec.true_b) < 1e-10);

    spec.noise_amplitude = 1.0;
    const auto d = generate_synthetic(spec);
    const double c = rng.uniform(-10, 10);
    auto shifted_targets = d.targets();
    for (auto& y : shifted_targets) y += c;
    const auto base = fit_least_squares(d);
    const auto shifted = fit_least_squares(RegressionDataset(d.inputs(), shifted_targets));
    CHECK(std::abs(shifted.w - base.w) < 1e-10);
    CHECK(std::abs(shifted.b - (base.b + c)) < 1e-10);
  }
}

TEST_CASE("serialization") {
  const auto d = generate_synthetic(SyntheticSpec{});
  const auto back = dataset_from_csv(to_csv(d));
  CHECK(back.inputs() == d.inputs());
  CHECK(back.targets() == d.targets());

  const LinearModel m{2.0000000000000004, -3.9999999999999996};
  const auto r = linear_model_from_json(nlohmann::json::parse(to_json(m).dump()));
  CHECK(r.w == m.w);
  CHECK(r.b == m.b);

  const auto meta = meta_to_json(d.meta());
  CHECK(meta.at("noise_amplitude") == 2.0);
  CHECK(meta.at("true_b") == -4.0);
  CHECK(meta_to_json(DatasetMeta{}).at("true_w").is_null());
}
