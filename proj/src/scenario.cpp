#include "qmsn/scenario.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "qmsn/optical_train.hpp"

namespace qmsn {
namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

MetricsRow monitor_row(const std::string& case_label,
                       const DetectionStats& stats,
                       const MonitorVerdict& verdict) {
  MetricsRow row;
  row.case_label = case_label;
  row.gates = stats.gates;
  row.clicks = stats.clicks;
  row.rate = verdict.rate;
  row.expected_rate = verdict.expected;
  row.z_score = verdict.z_score;
  row.alarm = verdict.alarm;
  return row;
}

/// Generate the deterministic default payload/secrets when a scenario does
/// not pin them explicitly. Drawn from a dedicated child stream so payload
/// generation never perturbs the physics stream.
std::string random_bits(std::uint64_t n, Rng& rng) {
  std::string s(n, '0');
  for (auto& c : s) c = rng.bernoulli(0.5) ? '1' : '0';
  return s;
}

}  // namespace

std::vector<MetricsRow> run_figure2(double mu, const DetectorParams& det,
                                    std::uint64_t gates,
                                    const MonitorConfig& monitor, Rng& rng) {
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
  det.validate();
  if (gates < monitor.min_gates)
    throw std::invalid_argument("figure2: gates must be >= monitor.min_gates");

  struct Case {
    const char* label;
    int arrangement;   // theta1 = 0 or pi/2
    double theta2;
    bool light_on;
  };
  const Case cases[4] = {
      {"I", 0, 0.0, true},
      {"II", 1, kPi / 2.0, true},
      {"III", 0, kPi / 4.0, true},
      {"IV", 0, 0.0, false},
  };

  const double expected = expected_thermal_rate(mu, det);
  std::vector<MetricsRow> rows;
  rows.reserve(4);

  for (const auto& c : cases) {
    DetectionStats stats;
    for (std::uint64_t g = 0; g < gates; ++g) {
      DualRailPulse pulse =
          c.light_on ? make_alice_pulse(mu, c.arrangement) : DualRailPulse{};
      pulse = apply_rotator(pulse, c.theta2);
      const auto outs = pbs_split(pulse);
      stats.record(detect(outs.v.components, det, rng));
    }
    rows.push_back(
        monitor_row(c.label, stats, evaluate_monitor(stats, expected, monitor)));
  }
  return rows;
}

std::vector<MetricsRow> run_scenario(const ScenarioSpec& spec) {
  std::vector<MetricsRow> rows;

  for (std::uint64_t trial = 0; trial < spec.trials; ++trial) {
    const std::uint64_t child_seed = mix_seed(spec.seed, trial);
    Rng rng(child_seed);

    if (spec.kind == ScenarioKind::figure2) {
      auto case_rows = run_figure2(spec.base.mu, spec.base.detectors.monitor,
                                   spec.base.n_pulses, spec.base.monitor, rng);
      for (auto& row : case_rows) {
        row.scenario = spec.name;
        row.trial = trial;
        row.seed = child_seed;
        rows.push_back(std::move(row));
      }
      continue;
    }

    ProtocolTranscript t;
    switch (spec.base.service) {
      case Service::qkd:
        t = run_qkd(spec.base, rng);
        break;
      case Service::qsdc: {
        std::string message = spec.qsdc_message;
        if (message.empty()) {
          Rng payload_rng = rng.child(0x9a7f);
          message = random_bits(spec.base.message_bits, payload_rng);
        }
        t = run_qsdc(spec.base, message, rng);
        break;
      }
      case Service::qss: {
        std::vector<std::string> secrets = spec.bob_secrets;
        if (secrets.empty()) {
          Rng payload_rng = rng.child(0x9a7f);
          for (std::uint32_t b = 0; b < spec.base.n_bobs; ++b)
            secrets.push_back(
                random_bits(spec.base.message_bits, payload_rng));
        }
        t = run_qss(spec.base, secrets, rng);
        break;
      }
    }

    MetricsRow row = monitor_row(service_name(spec.base.service),
                                 t.monitor_stats, t.monitor_verdict);
    row.scenario = spec.name;
    row.trial = trial;
    row.alarm = t.monitor_alarm;
    row.qber = t.qber;
    row.rounds_used = t.rounds_used;
    row.has_protocol_fields = true;
    row.seed = child_seed;
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* const kCsvHeader =
    "scenario,trial,case_label,gates,clicks,rate,expected_rate,z_score,"
    "alarm,qber,rounds_used,seed";

std::string csv_line(const MetricsRow& row) {
  std::string line;
  line += row.scenario;
  line += ',';
  line += std::to_string(row.trial);
  line += ',';
  line += row.case_label;
  line += ',';
  line += std::to_string(row.gates);
  line += ',';
  line += std::to_string(row.clicks);
  line += ',';
  line += format_double(row.rate);
  line += ',';
  line += format_double(row.expected_rate);
  line += ',';
  line += format_double(row.z_score);
  line += ',';
  line += row.alarm ? '1' : '0';
  line += ',';
  if (row.has_protocol_fields) {
    line += format_double(row.qber);
    line += ',';
    line += std::to_string(row.rounds_used);
  } else {
    line += ',';
  }
  line += ',';
  line += std::to_string(row.seed);
  return line;
}

void write_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& row : rows) out << csv_line(row) << '\n';
}

void print_summary(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << std::left << std::setw(18) << "scenario" << std::setw(7) << "trial"
      << std::setw(6) << "case" << std::setw(10) << "gates" << std::setw(12)
      << "rate" << std::setw(12) << "expected" << std::setw(10) << "z"
      << std::setw(7) << "alarm";
  out << '\n';
  for (const auto& row : rows) {
    out << std::left << std::setw(18) << row.scenario << std::setw(7)
        << row.trial << std::setw(6) << row.case_label << std::setw(10)
        << row.gates << std::setw(12) << format_double(row.rate)
        << std::setw(12) << format_double(row.expected_rate) << std::setw(10)
        << format_double(row.z_score) << std::setw(7)
        << (row.alarm ? "yes" : "no");
    if (row.has_protocol_fields)
      out << " qber=" << format_double(row.qber)
          << " rounds=" << row.rounds_used;
    out << '\n';
  }
}

}  // namespace qmsn
