#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <thread>

#include "pdelab/costs.hpp"
#include "pdelab/errors.hpp"
#include "pdelab/random.hpp"

using namespace pdelab;

namespace {

CostLedger ledger(double dg, double nt, double pr, double solve, std::uint64_t n = 0) {
  CostLedger l;
  l.t_dg = dg;
  l.t_nt = nt;
  l.t_pr = pr;
  l.t_solve = solve;
  l.n_predictions = n;
  return l;
}

// First N in 1..limit with T_t(N) < N t_solve, or 0 if none.
std::uint64_t scan(CostLedger l, std::uint64_t limit) {
  const double solve = l.t_solve;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    l.n_predictions = n;
    if (total_time(l) < static_cast<double>(n) * solve) return n;
  }
  return 0;
}

}  // namespace

TEST_CASE("total_time") {
  CHECK(total_time(ledger(0, 0, 123.0, 1.0, 0)) == 0.0);
  CHECK(total_time(ledger(1000, 500, 0.1, 10, 100)) == doctest::Approx(1510.0).epsilon(1e-15));
  CHECK(total_time(ledger(1.5, 2.25, 0.125, 1, 1)) == 3.875);
}

TEST_CASE("break_even examples") {
  // 151 * 9.9 = 1494.9 < 1500 <= 152 * 9.9 = 1504.8
  CHECK(break_even(ledger(1000, 500, 0.1, 10)) == 152u);
  CHECK(break_even(ledger(0, 0, 0.5, 1)) == 1u);
  CHECK(break_even(ledger(0, 0, 0, 1e-9)) == 1u);
  CHECK_FALSE(break_even(ledger(10, 10, 2, 2)).has_value());
  CHECK_FALSE(break_even(ledger(10, 10, 3, 2)).has_value());
  // Exact tie at N=10 (10 + 10*1 == 10*2) is not yet beneficial.
  CHECK(break_even(ledger(10, 0, 1, 2)) == 11u);
  CHECK_THROWS_AS(break_even(ledger(1, 1, 0, 0)), ParameterError);
  CHECK_THROWS_AS(break_even(ledger(-1, 1, 0, 1)), ParameterError);
}

TEST_CASE("property: break_even agrees with a brute-force scan") {
  Rng rng(2024);
  const std::uint64_t limit = 10'000'000;
  for (int t = 0; t < 1000; ++t) {
    const auto l = ledger(rng.uniform(0, 1000), rng.uniform(0, 500), rng.uniform(0, 1), rng.uniform(0.01, 10));
    const auto fast = break_even(l);
    const auto slow = l.t_pr >= l.t_solve ? 0 : scan(l, limit);
    if (!fast) {
      CHECK(slow == 0);
    } else if (slow == 0) {
      CHECK(*fast > limit);
    } else {
      CHECK(*fast == slow);
    }
  }
}

TEST_CASE("property: monotonicity") {
  Rng rng(7);
  for (int t = 0; t < 300; ++t) {
    const auto base = ledger(rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(0, 1), rng.uniform(1.01, 5));
    const auto n = *break_even(base);
    auto more_dg = base;
    more_dg.t_dg += rng.uniform(0, 50);
    CHECK(*break_even(more_dg) >= n);
    auto more_nt = base;
    more_nt.t_nt += rng.uniform(0, 50);
    CHECK(*break_even(more_nt) >= n);
    auto slower_solve = base;
    slower_solve.t_solve += rng.uniform(0, 5);
    CHECK(*break_even(slower_solve) <= n);
  }
}

TEST_CASE("property: total_time is linear in the prediction count") {
  // Dyadic inputs keep every operation exact, so the step is bit-exact.
  Rng rng(9);
  for (int t = 0; t < 1000; ++t) {
    const auto dyadic = [&] { return static_cast<double>(rng.below(1 << 20)) / 1024.0; };
    auto l = ledger(dyadic(), dyadic(), dyadic(), 1.0, rng.below(1 << 16));
    const double now = total_time(l);
    ++l.n_predictions;
    CHECK(total_time(l) - now == l.t_pr);
  }
}

TEST_CASE("median") {
  CHECK(median({3.0}) == 3.0);
  CHECK(median({5.0, 1.0, 3.0}) == 3.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS_AS(median({}), ParameterError);
}

TEST_CASE("measure") {
  int predicts = 0;
  int solves = 0;
  const auto one = measure({1.0, 2.0, 5}, [&] { ++predicts; }, [&] { ++solves; }, 1);
  CHECK(one.prediction_samples.size() == 1);
  CHECK(one.t_pr == one.prediction_samples[0]);
  CHECK(one.t_solve == one.solve_samples[0]);
  CHECK(one.t_pr_cold.has_value());
  CHECK(predicts == 2);
  CHECK(solves == 1);
  CHECK(one.t_dg == 1.0);
  CHECK(one.n_predictions == 5);

  CHECK_THROWS_AS(measure({}, [] {}, [] {}, 0), ParameterError);

  const auto back = ledger_from_json(to_json(one));
  CHECK(back.prediction_samples == one.prediction_samples);
  CHECK(back.t_pr == one.t_pr);
}

TEST_CASE("measure: repeated sleep-stub workloads agree within jitter") {
  // Jitter bound for a 2 ms / 4 ms sleep stub: 1 ms absolute plus 50%,
  // calibrated on the build machine (observed spread well under 0.2 ms).
  const auto sleep_for = [](int us) { return [us] { std::this_thread::sleep_for(std::chrono::microseconds(us)); }; };
  const auto a = measure({}, sleep_for(2000), sleep_for(4000), 5);
  const auto b = measure({}, sleep_for(2000), sleep_for(4000), 5);
  const auto close = [](double x, double y) { return std::abs(x - y) <= 1e-3 + 0.5 * std::max(x, y); };
  CHECK(close(a.t_pr, b.t_pr));
  CHECK(close(a.t_solve, b.t_solve));
  CHECK(a.t_pr >= 2e-3);
  CHECK(a.t_solve >= 4e-3);
}
