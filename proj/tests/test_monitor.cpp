// Power-monitor statistics: expected rates, the z-test decision rule, its
// false-alarm behavior and its detection power at the composite-state shift.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "qmsn/monitor.hpp"
#include "qmsn/rng.hpp"

using namespace qmsn;

namespace {

DetectionStats bernoulli_gates(double p, std::uint64_t gates, Rng& rng) {
  DetectionStats stats;
  for (std::uint64_t g = 0; g < gates; ++g) stats.record(rng.bernoulli(p));
  return stats;
}

}  // namespace

TEST_CASE("expected thermal rate closed form") {
  CHECK(expected_thermal_rate(0.0, DetectorParams{1.0, 0.0}) == 0.0);
  CHECK(expected_thermal_rate(1.0, DetectorParams{1.0, 0.0}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(expected_thermal_rate(0.1, DetectorParams{1.0, 0.0}) ==
        doctest::Approx(1.0 - 1.0 / 1.1).epsilon(1e-12));
  CHECK(expected_thermal_rate(0.1, DetectorParams{1.0, 0.0}) ==
        doctest::Approx(0.090909).epsilon(1e-5));
  CHECK_THROWS_AS((void)expected_thermal_rate(-0.1, DetectorParams{1.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("power proxy is the click rate") {
  CHECK(power_proxy({1000000, 0}) == 0.0);
  CHECK(power_proxy({1000000, 90909}) ==
        doctest::Approx(0.090909).epsilon(1e-12));
  CHECK_THROWS_AS((void)power_proxy({0, 0}), std::invalid_argument);

  // strictly increasing in clicks at fixed gates
  double prev = -1.0;
  for (std::uint64_t clicks : {0ull, 10ull, 500ull, 999ull}) {
    const double rate = power_proxy({1000, clicks});
    CHECK(rate > prev);
    prev = rate;
  }
}

TEST_CASE("alarm decision rule") {
  const MonitorConfig cfg{5.0, 10000, false};

  // zero deviation never alarms
  const double expected = 0.090909;
  DetectionStats exact{100000,
                       static_cast<std::uint64_t>(0.090909 * 100000 + 0.5)};
  CHECK_FALSE(alarm(exact, expected, cfg));

  // doubling the rate at 1e5 gates is a ~100 sigma deviation
  DetectionStats doubled{100000,
                         static_cast<std::uint64_t>(0.181818 * 100000 + 0.5)};
  CHECK(alarm(doubled, expected, cfg));
  CHECK(rate_z_score(doubled, expected) > 50.0);

  // a 1e-4 shift is invisible at 1e3 gates... but 1e3 gates is below
  // min_gates, so the monitor refuses to decide
  DetectionStats small{1000, 91};
  CHECK_THROWS_AS((void)alarm(small, expected, cfg), std::runtime_error);
  const MonitorConfig low_floor{5.0, 100, false};
  CHECK_FALSE(alarm(small, expected, low_floor));

  const auto verdict = evaluate_monitor(small, expected, cfg);
  CHECK_FALSE(verdict.sufficient_data);
  CHECK_FALSE(verdict.alarm);
}

TEST_CASE("false-alarm rate at z=5 is negligible") {
  Rng rng(123);
  const MonitorConfig cfg{5.0, 10000, false};
  const double expected = expected_thermal_rate(0.1, DetectorParams{1.0, 1e-5});
  std::uint64_t alarms = 0;
  const int runs = 1000;
  for (int r = 0; r < runs; ++r) {
    const auto stats = bernoulli_gates(expected, 100000, rng);
    if (alarm(stats, expected, cfg)) ++alarms;
  }
  CHECK(static_cast<double>(alarms) / runs < 1e-4);
}

TEST_CASE("detection power at the composite-state shift") {
  // shift between the half-swapped composite and the honest thermal rate
  const DetectorParams det{1.0, 0.0};
  const double honest = expected_thermal_rate(0.1, det);
  const double composite = 1.0 - std::exp(-0.05) / 1.05;
  const double delta = composite - honest;
  CHECK(delta == doctest::Approx(3.16e-3).epsilon(0.01));

  // gates needed for >99% power at z=5: ((z + 2.33)^2 p(1-p)) / delta^2
  const double bound =
      (5.0 + 2.33) * (5.0 + 2.33) * honest * (1.0 - honest) / (delta * delta);
  CHECK(bound == doctest::Approx(4.4e5).epsilon(0.05));

  // with twice the bound the alarm is essentially certain
  Rng rng(321);
  const MonitorConfig cfg{5.0, 10000, false};
  const auto gates = static_cast<std::uint64_t>(2.0 * bound);
  int alarms = 0;
  const int runs = 300;
  for (int r = 0; r < runs; ++r) {
    const auto stats = bernoulli_gates(composite, gates, rng);
    if (alarm(stats, honest, cfg)) ++alarms;
  }
  CHECK(static_cast<double>(alarms) / runs >= 0.99);
}
