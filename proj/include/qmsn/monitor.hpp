#pragma once
// Alice's thermal-output surveillance: she knows the mean photon number she
// launched, so she knows the click rate the decoy detector must show. Any
// state substitution in flight moves that rate, and a two-sided z-test on the
// binomial count flags it.
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "qmsn/photon_stats.hpp"

namespace qmsn {

/// Gate/click tallies for one detector.
struct DetectionStats {
  std::uint64_t gates = 0;
  std::uint64_t clicks = 0;

  void record(bool click) {
    ++gates;
    if (click) ++clicks;
  }
};

struct MonitorConfig {
  double z_threshold = 5.0;
  std::uint64_t min_gates = 10000;
  bool watch_ports = false;  // optional rate check on the data detectors too

  void validate() const {
    if (!(z_threshold > 0.0))
      throw std::invalid_argument("monitor.z_threshold must be > 0");
    if (min_gates == 0)
      throw std::invalid_argument("monitor.min_gates must be > 0");
  }
};

struct MonitorVerdict {
  double rate = 0.0;
  double expected = 0.0;
  double z_score = 0.0;
  bool alarm = false;
  bool sufficient_data = false;
};

/// Per-gate click probability Alice predicts for a thermal state of mean
/// mu_t: 1 - (1-p_d)/(1 + eta*mu_t).
inline double expected_thermal_rate(double mu_t, const DetectorParams& det) {
  if (!(mu_t >= 0.0))
    throw std::invalid_argument("expected_thermal_rate: mu_t must be >= 0");
  return 1.0 -
         (1.0 - det.dark_count_prob) / (1.0 + det.efficiency * mu_t);
}

/// Observed click rate; monotone stand-in for the detector's electrical
/// power reading.
inline double power_proxy(const DetectionStats& stats) {
  if (stats.gates == 0)
    throw std::invalid_argument("power_proxy: rate undefined at zero gates");
  return static_cast<double>(stats.clicks) / static_cast<double>(stats.gates);
}

inline double rate_z_score(const DetectionStats& stats, double expected) {
  const double rate = power_proxy(stats);
  const double var = expected * (1.0 - expected) /
                     static_cast<double>(stats.gates);
  if (var <= 0.0) {
    if (rate == expected) return 0.0;
    return rate > expected ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
  }
  return (rate - expected) / std::sqrt(var);
}

/// Two-sided binomial rate test. Throws when fewer than min_gates gates have
/// been observed (insufficient data is not an alarm).
inline bool alarm(const DetectionStats& stats, double expected,
                  const MonitorConfig& cfg) {
  cfg.validate();
  if (stats.gates < cfg.min_gates)
    throw std::runtime_error("monitor: insufficient gates for a verdict");
  return std::abs(rate_z_score(stats, expected)) > cfg.z_threshold;
}

/// Non-throwing evaluation used by the protocol runners; short runs yield
/// alarm=false with sufficient_data=false.
inline MonitorVerdict evaluate_monitor(const DetectionStats& stats,
                                       double expected,
                                       const MonitorConfig& cfg) {
  MonitorVerdict v;
  v.expected = expected;
  if (stats.gates == 0) return v;
  v.rate = power_proxy(stats);
  v.z_score = rate_z_score(stats, expected);
  v.sufficient_data = stats.gates >= cfg.min_gates;
  v.alarm = v.sufficient_data && std::abs(v.z_score) > cfg.z_threshold;
  return v;
}

}  // namespace qmsn
