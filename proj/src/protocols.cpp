#include "qmsn/protocols.hpp"

#include <algorithm>
#include <span>
#include <stdexcept>

namespace qmsn {
namespace {

struct TransmitResult {
  PbsOutputs outs;
  PulseCapture capture;
};

/// One full Alice -> Bob(s) -> Alice traversal of a single pulse, with the
/// configured attack spliced into the return leg. Beam-splitter and
/// splitting attacks supply their own lossless line, so the fiber is skipped
/// on the legs Eve replaces.
TransmitResult transmit_pulse(const ProtocolConfig& cfg, double link_t,
                              std::uint64_t pulse_index,
                              std::uint64_t slot_index, int arrangement,
                              std::span<const double> bob_phases, Rng& rng,
                              EveRecord& eve) {
  TransmitResult result;
  DualRailPulse pulse = make_alice_pulse(cfg.mu, arrangement);
  pulse.pulse_index = pulse_index;
  pulse.slot_index = slot_index;

  const bool eve_supplies_line = cfg.attack.type == AttackType::beam_splitter;
  if (!eve_supplies_line) pulse = apply_loss(pulse, link_t, rng);

  for (double phi : bob_phases) pulse = apply_phase_modulator(pulse, phi);

  switch (cfg.attack.type) {
    case AttackType::none:
      pulse = apply_loss(pulse, link_t, rng);
      break;
    case AttackType::intercept_resend:
      pulse = apply_loss(pulse, link_t, rng);
      pulse = intercept_resend(pulse, cfg.attack.p_swap, rng);
      break;
    case AttackType::pns:
      pulse = pns_attack(pulse, rng, eve);  // lossless forwarding line
      break;
    case AttackType::beam_splitter:
      pulse = beam_splitter_attack(pulse, cfg.attack.reflectance, rng, eve,
                                   result.capture);
      break;
    case AttackType::blinding:
      pulse = apply_loss(pulse, link_t, rng);
      pulse = blinding_attack(pulse, cfg.attack.injected_mean);
      break;
  }

  pulse = apply_rotator(pulse, arrangement == 0 ? 0.0 : kPi / 2.0);
  result.outs = pbs_split(pulse);
  return result;
}

bool captured_both_rails(const PulseCapture& c) {
  return c.captured_h >= 1 && c.captured_v >= 1;
}

/// Expected per-port click rate of the honest link, used by the optional
/// data-detector watch: half the boundaries route the signal to each port.
double expected_port_rate(const ProtocolConfig& cfg,
                          const DetectorParams& det) {
  const double m = cfg.expected_arrival_mean();
  const double signal_click =
      1.0 - (1.0 - det.dark_count_prob) * std::exp(-det.efficiency * m);
  return 0.5 * (signal_click + det.dark_count_prob);
}

void finish_monitoring(const ProtocolConfig& cfg, ProtocolTranscript& t) {
  const double expected =
      expected_thermal_rate(cfg.expected_arrival_mean(),
                            cfg.detectors.monitor);
  t.monitor_verdict = evaluate_monitor(t.monitor_stats, expected, cfg.monitor);
  t.monitor_alarm = t.monitor_verdict.alarm;
  if (cfg.monitor.watch_ports) {
    const auto v0 = evaluate_monitor(
        t.port0_stats, expected_port_rate(cfg, cfg.detectors.port0),
        cfg.monitor);
    const auto v1 = evaluate_monitor(
        t.port1_stats, expected_port_rate(cfg, cfg.detectors.port1),
        cfg.monitor);
    t.monitor_alarm = t.monitor_alarm || v0.alarm || v1.alarm;
  }
  t.eve_record.bits_inferred =
      t.eve_record.slots_with_four_photons /
      static_cast<std::uint64_t>(t.eve_record.phase_candidates_per_slot);
}

double mismatch_fraction(const std::string& a, const std::string& b) {
  if (a.empty()) return 0.0;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < a.size(); ++i) bad += a[i] != b[i] ? 1 : 0;
  return static_cast<double>(bad) / static_cast<double>(a.size());
}

void require_bit_string(const std::string& bits, const char* what) {
  if (bits.empty())
    throw std::invalid_argument(std::string(what) + " must be non-empty");
  for (char c : bits)
    if (c != '0' && c != '1')
      throw std::invalid_argument(std::string(what) +
                                  " must contain only '0'/'1'");
}

/// Shared slot engine for the two slot-based services. Per slot, Bob-side
/// phases come from the callback; a slot counts as detected when exactly one
/// interferometer port clicks, and undetected original positions are
/// retransmitted round after round with fresh polarization coding.
template <class SlotPhases>
void run_slotted(const ProtocolConfig& cfg, std::uint64_t n_slots,
                 SlotPhases&& slot_phases, Rng& rng, ProtocolTranscript& t,
                 std::vector<std::uint8_t>& recovered_by_pos) {
  recovered_by_pos.assign(n_slots, 0xFF);
  std::vector<std::uint64_t> pending(n_slots);
  for (std::uint64_t i = 0; i < n_slots; ++i) pending[i] = i;
  const double link_t = cfg.channel.transmittance();

  std::uint64_t pulse_counter = 0;
  std::uint64_t slot_counter = 0;
  std::uint64_t round = 0;
  std::vector<double> phases_first;
  std::vector<double> phases_second;

  while (!pending.empty() && round < cfg.max_rounds) {
    ++round;
    std::vector<std::uint64_t> still_pending;
    for (std::uint64_t pos : pending) {
      const std::uint64_t slot = slot_counter++;
      phases_first.clear();
      phases_second.clear();
      slot_phases(pos, phases_first, phases_second, rng);

      const int a1 = rng.bernoulli(0.5) ? 1 : 0;
      const int a2 = rng.bernoulli(0.5) ? 1 : 0;
      const auto first = transmit_pulse(cfg, link_t, pulse_counter, slot, a1,
                                        phases_first, rng, t.eve_record);
      ++pulse_counter;
      const auto second = transmit_pulse(cfg, link_t, pulse_counter, slot, a2,
                                         phases_second, rng, t.eve_record);
      ++pulse_counter;

      t.monitor_stats.record(
          detect(first.outs.v.components, cfg.detectors.monitor, rng));
      t.monitor_stats.record(
          detect(second.outs.v.components, cfg.detectors.monitor, rng));

      if (cfg.attack.type == AttackType::beam_splitter &&
          captured_both_rails(first.capture) &&
          captured_both_rails(second.capture))
        ++t.eve_record.slots_with_four_photons;

      const auto ports = interfere_dpsk(first.outs.h, second.outs.h);
      const bool c0 = detect(ports.port0, cfg.detectors.port0, rng);
      const bool c1 = detect(ports.port1, cfg.detectors.port1, rng);
      t.port0_stats.record(c0);
      t.port1_stats.record(c1);

      if (c0 != c1)
        recovered_by_pos[pos] = c1 ? 1 : 0;
      else
        still_pending.push_back(pos);  // no click or ambiguous double click
    }

    pending = std::move(still_pending);
    if (!pending.empty()) {
      ClassicalMessage msg;
      msg.kind = ClassicalMessage::Kind::retransmit_request;
      msg.round = round;
      msg.positions = pending;
      t.log.push_back(std::move(msg));
    }
  }

  t.rounds_used = round;
  t.delivery_complete = pending.empty();
  for (std::uint64_t pos = 0; pos < n_slots; ++pos) {
    if (recovered_by_pos[pos] != 0xFF) {
      t.detected_slots.push_back(pos);
      t.recovered_bits.push_back(recovered_by_pos[pos] ? '1' : '0');
    }
  }
}

}  // namespace

const char* service_name(Service s) {
  switch (s) {
    case Service::qkd:
      return "qkd";
    case Service::qsdc:
      return "qsdc";
    case Service::qss:
      return "qss";
  }
  return "?";
}

void ProtocolConfig::validate() const {
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
  channel.validate();
  detectors.validate();
  attack.validate();
  monitor.validate();
  if (max_rounds == 0)
    throw std::invalid_argument("max_rounds must be >= 1");
  switch (service) {
    case Service::qkd:
      if (n_pulses == 0)
        throw std::invalid_argument("n_pulses must be >= 1");
      break;
    case Service::qsdc:
      if (message_bits == 0)
        throw std::invalid_argument("message_bits must be >= 1");
      break;
    case Service::qss:
      if (n_bobs == 0) throw std::invalid_argument("n_bobs must be >= 1");
      if (message_bits == 0)
        throw std::invalid_argument("message_bits must be >= 1");
      if (dishonest_bob < -1 ||
          dishonest_bob >= static_cast<int>(n_bobs))
        throw std::invalid_argument(
            "dishonest_bob must be -1 or a valid Bob index");
      break;
  }
}

ProtocolTranscript run_qkd(const ProtocolConfig& cfg, Rng& rng) {
  cfg.validate();
  if (cfg.service != Service::qkd)
    throw std::invalid_argument("run_qkd: config service must be qkd");

  ProtocolTranscript t;
  t.service = Service::qkd;

  const std::uint64_t n = cfg.n_pulses;
  const double link_t = cfg.channel.transmittance();
  std::vector<std::uint8_t> bob_raw(n);  // Bob's private modulation bits

  RailSignal prev_h;
  bool have_prev = false;
  std::vector<std::uint64_t> positions;
  std::vector<std::uint8_t> alice_ports;

  for (std::uint64_t i = 0; i < n; ++i) {
    const int arrangement = rng.bernoulli(0.5) ? 1 : 0;  // Alice's secret
    bob_raw[i] = rng.bernoulli(0.5) ? 1 : 0;
    const double phi[1] = {bob_raw[i] ? kPi : 0.0};

    const auto res =
        transmit_pulse(cfg, link_t, i, i, arrangement, phi, rng, t.eve_record);
    t.monitor_stats.record(
        detect(res.outs.v.components, cfg.detectors.monitor, rng));

    if (have_prev) {
      const auto ports = interfere_dpsk(prev_h, res.outs.h);
      const bool c0 = detect(ports.port0, cfg.detectors.port0, rng);
      const bool c1 = detect(ports.port1, cfg.detectors.port1, rng);
      t.port0_stats.record(c0);
      t.port1_stats.record(c1);
      if (c0 != c1) {
        positions.push_back(i);
        alice_ports.push_back(c1 ? 1 : 0);
      }
    }
    prev_h = res.outs.h;
    have_prev = true;
  }

  // Alice announces where (and at which port) she saw clicks; Bob sifts his
  // key from his own phase differences at those boundaries.
  ClassicalMessage report;
  report.kind = ClassicalMessage::Kind::detection_report;
  report.positions = positions;
  report.ports = alice_ports;
  t.log.push_back(report);

  t.detected_slots = positions;
  t.recovered_bits.reserve(positions.size());
  t.sent_bits.reserve(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const std::uint64_t i = positions[k];
    const int bob_bit = bob_raw[i] ^ bob_raw[i - 1];
    t.sent_bits.push_back(bob_bit ? '1' : '0');
    t.recovered_bits.push_back(alice_ports[k] ? '1' : '0');
  }
  t.qber = mismatch_fraction(t.sent_bits, t.recovered_bits);
  finish_monitoring(cfg, t);
  return t;
}

ProtocolTranscript run_qsdc(const ProtocolConfig& cfg,
                            const std::string& message, Rng& rng) {
  cfg.validate();
  if (cfg.service != Service::qsdc)
    throw std::invalid_argument("run_qsdc: config service must be qsdc");
  require_bit_string(message, "qsdc message");

  ProtocolTranscript t;
  t.service = Service::qsdc;
  t.sent_bits = message;

  auto slot_phases = [&message](std::uint64_t pos, std::vector<double>& first,
                                std::vector<double>& second, Rng& slot_rng) {
    const double base = slot_rng.bernoulli(0.5) ? kPi : 0.0;
    first.push_back(base);
    second.push_back(base + (message[pos] == '1' ? kPi : 0.0));
  };

  std::vector<std::uint8_t> recovered;
  run_slotted(cfg, message.size(), slot_phases, rng, t, recovered);

  std::string sent_at_detected;
  for (std::uint64_t pos : t.detected_slots)
    sent_at_detected.push_back(message[pos]);
  t.qber = mismatch_fraction(sent_at_detected, t.recovered_bits);
  finish_monitoring(cfg, t);
  return t;
}

ProtocolTranscript run_qss(const ProtocolConfig& cfg,
                           const std::vector<std::string>& bob_secrets,
                           Rng& rng) {
  cfg.validate();
  if (cfg.service != Service::qss)
    throw std::invalid_argument("run_qss: config service must be qss");
  if (bob_secrets.size() != cfg.n_bobs)
    throw std::invalid_argument("qss: need one secret per Bob");
  for (const auto& s : bob_secrets) require_bit_string(s, "qss secret");
  const std::size_t len = bob_secrets.front().size();
  for (const auto& s : bob_secrets)
    if (s.size() != len)
      throw std::invalid_argument("qss: secrets must have equal length");

  ProtocolTranscript t;
  t.service = Service::qss;
  t.sent_bits.resize(len);
  for (std::size_t pos = 0; pos < len; ++pos) {
    int x = 0;
    for (const auto& s : bob_secrets) x ^= s[pos] == '1' ? 1 : 0;
    t.sent_bits[pos] = x ? '1' : '0';
  }

  auto slot_phases = [&](std::uint64_t pos, std::vector<double>& first,
                         std::vector<double>& second, Rng& slot_rng) {
    for (std::uint32_t b = 0; b < cfg.n_bobs; ++b) {
      if (static_cast<int>(b) == cfg.dishonest_bob) {
        first.push_back(slot_rng.uniform(0.0, 2.0 * kPi));
        second.push_back(slot_rng.uniform(0.0, 2.0 * kPi));
      } else {
        first.push_back(0.0);
        second.push_back(bob_secrets[b][pos] == '1' ? kPi : 0.0);
      }
    }
  };

  std::vector<std::uint8_t> recovered;
  run_slotted(cfg, len, slot_phases, rng, t, recovered);

  std::string sent_at_detected;
  for (std::uint64_t pos : t.detected_slots)
    sent_at_detected.push_back(t.sent_bits[pos]);
  t.qber = mismatch_fraction(sent_at_detected, t.recovered_bits);
  finish_monitoring(cfg, t);
  return t;
}

}  // namespace qmsn
