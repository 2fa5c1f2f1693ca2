#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "streamhm/bounds.hpp"
#include "streamhm/errors.hpp"
#include "streamhm/hm.hpp"
#include "streamhm/synth_gen.hpp"

using namespace streamhm;
using doctest::Approx;

TEST_CASE("deviation bound matches the closed form") {
  // range 2, delta 0.05, 1000 cases: 2 * sqrt(ln(40) / 2000)
  CHECK(epsilon_pair(1.0, 1.0, 0.05, 1000) ==
        Approx(2.0 * std::sqrt(std::log(40.0) / 2000.0)).epsilon(1e-12));
  CHECK(epsilon_pair(1.0, 1.0, 0.05, 1000) == Approx(0.0858936).epsilon(1e-4));

  // delta = 2/e makes ln(2/delta) = 1: epsilon = range * sqrt(1/(2*50)) = range/10
  CHECK(epsilon_pair(1.0, 1.0, 2.0 / std::exp(1.0), 50) == Approx(0.2).epsilon(1e-12));
  CHECK(epsilon_triple(1.5, 0.5, 2.0 / std::exp(1.0), 50) == Approx(0.2).epsilon(1e-12));

  // the two bounds share one form; only the ranges differ
  CHECK(epsilon_pair(0.75, 0.25, 0.05, 123) ==
        Approx(epsilon_triple(0.5, 0.5, 0.05, 123)).epsilon(1e-12));
}

TEST_CASE("deviation bound scales as the inverse square root of the case count") {
  const double base = epsilon_pair(1.0, 1.0, 0.05, 250);
  CHECK(epsilon_pair(1.0, 1.0, 0.05, 1000) == Approx(base / 2.0).epsilon(1e-12));
  CHECK(epsilon_pair(1.0, 1.0, 0.05, 25000) == Approx(base / 10.0).epsilon(1e-12));

  // monotone: more cases or weaker confidence shrink the bound
  CHECK(epsilon_pair(1.0, 1.0, 0.05, 2000) < epsilon_pair(1.0, 1.0, 0.05, 1000));
  CHECK(epsilon_pair(1.0, 1.0, 0.5, 1000) < epsilon_pair(1.0, 1.0, 0.05, 1000));
  CHECK(epsilon_pair(2.0, 1.0, 0.05, 1000) > epsilon_pair(1.0, 1.0, 0.05, 1000));
}

TEST_CASE("zero deviation collapses the interval onto the smoothed measure") {
  // per-case means 0.9 and 0.1 over 10 cases equal counts 9 and 1:
  // (9 - 1) / (9 + 1 + 1) = 8/11 in count form
  const Interval interval = dependency_bounds(0.9, 0.1, 0.0, 0.0, 0.05, 10);
  CHECK(interval.lower == Approx(8.0 / 11.0).epsilon(1e-15));
  CHECK(interval.upper == Approx(8.0 / 11.0).epsilon(1e-15));
  CHECK(interval.width() == Approx(0.0));

  const Interval and_interval = and_bounds(0.4, 0.2, 0.5, 0.5, 0, 0, 0, 0, 0.05, 10);
  // (4 + 2) / (5 + 5 + 1) in count form
  CHECK(and_interval.lower == Approx(6.0 / 11.0).epsilon(1e-15));
  CHECK(and_interval.upper == Approx(6.0 / 11.0).epsilon(1e-15));
}

TEST_CASE("interval brackets the plug-in measure and shrinks with support") {
  const double rho_ab = 0.9, rho_ba = 0.1;
  const Interval at1k = dependency_bounds(rho_ab, rho_ba, 1, 1, 0.05, 1000);
  const double plug_in = (rho_ab - rho_ba) / (rho_ab + rho_ba + 1.0 / 1000.0);
  CHECK(at1k.lower < plug_in);
  CHECK(at1k.upper > plug_in);
  CHECK(at1k.contains(plug_in));

  const Interval at100k = dependency_bounds(rho_ab, rho_ba, 1, 1, 0.05, 100000);
  CHECK(at100k.width() < at1k.width());
  CHECK(at100k.lower > at1k.lower);
  CHECK(at100k.upper < at1k.upper);

  // stronger confidence (smaller delta) widens the interval
  const Interval strict = dependency_bounds(rho_ab, rho_ba, 1, 1, 0.001, 1000);
  CHECK(strict.width() > at1k.width());
}

TEST_CASE("and interval brackets its plug-in measure") {
  const Interval interval = and_bounds(0.5, 0.5, 0.5, 0.5, 1, 1, 1, 1, 0.05, 500);
  const double plug_in = (0.5 + 0.5) / (0.5 + 0.5 + 1.0 / 500.0);
  CHECK(interval.contains(plug_in));
  CHECK(interval.lower < plug_in);
  CHECK(interval.upper > plug_in);
}

TEST_CASE("a denominator that could vanish is rejected") {
  // nc small and support tiny: Y - eps + 1/nc <= 0
  CHECK_THROWS_AS(dependency_bounds(0.01, 0.0, 1, 1, 0.05, 10), InvalidArgument);
  CHECK_THROWS_AS(and_bounds(0.01, 0.0, 0.005, 0.005, 1, 1, 1, 1, 0.05, 10),
                  InvalidArgument);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(epsilon_pair(1, 1, 0.0, 100), InvalidArgument);
  CHECK_THROWS_AS(epsilon_pair(1, 1, -0.1, 100), InvalidArgument);
  CHECK_THROWS_AS(epsilon_pair(1, 1, 1.5, 100), InvalidArgument);
  CHECK_THROWS_AS(epsilon_pair(1, 1, 0.05, 0), InvalidArgument);
  CHECK_THROWS_AS(epsilon_pair(-1, 1, 0.05, 100), InvalidArgument);
  CHECK_THROWS_AS(epsilon_triple(1, -1, 0.05, 100), InvalidArgument);
  // delta = 1 is a degenerate but valid confidence level
  CHECK(epsilon_pair(1, 1, 1.0, 100) > 0.0);
}

TEST_CASE("empirical coverage of the dependency interval") {
  // process: A then (B;C | C;B) with equal odds, then D. Per case the
  // (A,B) succession appears at most once, never (B,A), so xi_ab = 1 and
  // xi_ba = 0. The long-run smoothed dependency at nc cases is
  // 0.5 / (0.5 + 1/nc).
  const std::uint64_t nc = 100;
  const double delta = 0.05;
  const double truth = 0.5 / (0.5 + 1.0 / static_cast<double>(nc));

  int covered = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    StreamPlan plan;
    {
      using PS = ProcessSpec;
      std::vector<PS> branches;
      branches.push_back(PS::sequence([] {
        std::vector<PS> v;
        v.push_back(PS::activity("B"));
        v.push_back(PS::activity("C"));
        return v;
      }()));
      branches.push_back(PS::sequence([] {
        std::vector<PS> v;
        v.push_back(PS::activity("C"));
        v.push_back(PS::activity("B"));
        return v;
      }()));
      std::vector<PS> steps;
      steps.push_back(PS::activity("A"));
      steps.push_back(PS::exclusive(std::move(branches)));
      steps.push_back(PS::activity("D"));
      plan.segments.push_back({PS::sequence(std::move(steps)), nc});
    }
    plan.seed = 1000 + static_cast<std::uint64_t>(t);

    const SuccessionCounts counts = count_log(generate_stream(plan));
    const double rho_ab = [&] {
      auto it = counts.direct.find({"A", "B"});
      return it == counts.direct.end() ? 0.0 : it->second / static_cast<double>(nc);
    }();
    const double rho_ba = 0.0;
    const Interval interval = dependency_bounds(rho_ab, rho_ba, 1.0, 0.0, delta, nc);
    if (interval.contains(truth)) ++covered;
  }
  // two one-sided bounds at delta each: coverage must beat 1 - 2*delta
  CHECK(static_cast<double>(covered) / trials >= 1.0 - 2.0 * delta);
}
