#pragma once
// Scenario execution: seeded trials, the four-case power-discrimination
// experiment, and the CSV metrics sink.
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qmsn/config.hpp"
#include "qmsn/monitor.hpp"
#include "qmsn/protocols.hpp"

namespace qmsn {

/// One output record. Fields that do not apply to a scenario kind stay empty
/// in the CSV (qber/rounds for figure2 runs).
struct MetricsRow {
  std::string scenario;
  std::uint64_t trial = 0;
  std::string case_label;
  std::uint64_t gates = 0;
  std::uint64_t clicks = 0;
  double rate = 0.0;
  double expected_rate = 0.0;
  double z_score = 0.0;
  bool alarm = false;
  double qber = 0.0;
  std::uint64_t rounds_used = 0;
  bool has_protocol_fields = false;
  std::uint64_t seed = 0;
};

/// Thermal-output rates in the four reference situations: matched rotations
/// (I), matched quarter-turn rotations (II), a half-way second rotation that
/// mixes both states onto the monitored rail (III), and no light at all (IV).
std::vector<MetricsRow> run_figure2(double mu, const DetectorParams& det,
                                    std::uint64_t gates,
                                    const MonitorConfig& monitor, Rng& rng);

/// Execute all trials of one scenario; rows carry the per-trial child seed.
std::vector<MetricsRow> run_scenario(const ScenarioSpec& spec);

extern const char* const kCsvHeader;

/// Fixed-format serialization so identical runs are byte-identical.
std::string csv_line(const MetricsRow& row);

void write_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

/// Human-readable per-case table for stdout.
void print_summary(std::ostream& out, const std::vector<MetricsRow>& rows);

}  // namespace qmsn
