#pragma once
// ============================================================================
// protocols.hpp -- the three services running over the dual-rail link:
//
//   qkd   reversed-role differential-phase-shift key distribution: Bob
//         modulates each pulse with 0 or pi, Alice undoes her polarization
//         coding, monitors the decoy output and interferes consecutive
//         pulses; announced click positions sift the key.
//   qsdc  deterministic messaging: two-pulse slots carry one bit in the
//         intra-slot phase difference; undetected slots are retransmitted
//         with fresh polarization coding until the message is complete.
//   qss   multi-party secret sharing: every Bob modulates both pulses of a
//         slot from his own secret; Alice's recovered bit is the XOR of all
//         secrets, so recovery requires every Bob to cooperate.
//
// Every run feeds all thermal-output gates to the power monitor and records
// the classical announcements in an append-only log.
// ============================================================================
#include <cstdint>
#include <string>
#include <vector>

#include "qmsn/attacks.hpp"
#include "qmsn/monitor.hpp"
#include "qmsn/optical_train.hpp"
#include "qmsn/rng.hpp"

namespace qmsn {

enum class Service : std::uint8_t { qkd, qsdc, qss };

const char* service_name(Service s);

/// The three threshold detectors at Alice's station.
struct DetectorSet {
  DetectorParams monitor;
  DetectorParams port0;
  DetectorParams port1;

  DetectorSet() = default;
  explicit DetectorSet(const DetectorParams& all)
      : monitor(all), port0(all), port1(all) {}

  void validate() const {
    monitor.validate();
    port0.validate();
    port1.validate();
  }
};

struct ProtocolConfig {
  Service service = Service::qkd;
  double mu = 0.1;
  std::uint64_t n_pulses = 100000;   // qkd pulse count
  std::uint64_t message_bits = 64;   // qsdc/qss default payload length
  ChannelParams channel;
  DetectorSet detectors;
  AttackKind attack;
  MonitorConfig monitor;
  std::uint64_t max_rounds = 100;  // qsdc/qss retransmission cap
  std::uint32_t n_bobs = 1;        // qss
  int dishonest_bob = -1;          // qss: index of a misbehaving Bob, -1 none

  void validate() const;

  /// Mean photon number Alice expects at her input after the double fiber
  /// pass; her monitor prediction is pinned to this.
  [[nodiscard]] double expected_arrival_mean() const {
    const double t = channel.transmittance();
    return mu * t * t;
  }
};

/// One entry of the in-process classical channel.
struct ClassicalMessage {
  enum class Kind : std::uint8_t { detection_report, retransmit_request };
  Kind kind = Kind::detection_report;
  std::uint64_t round = 1;
  std::vector<std::uint64_t> positions;
  std::vector<std::uint8_t> ports;  // detection_report only
};

/// Per-run record of everything either party ends up holding.
struct ProtocolTranscript {
  Service service = Service::qkd;
  std::string sent_bits;
  std::string recovered_bits;
  std::vector<std::uint64_t> detected_slots;
  double qber = 0.0;
  std::uint64_t rounds_used = 1;
  bool monitor_alarm = false;
  bool delivery_complete = true;
  EveRecord eve_record;
  DetectionStats monitor_stats;
  MonitorVerdict monitor_verdict;
  DetectionStats port0_stats;
  DetectionStats port1_stats;
  std::vector<ClassicalMessage> log;
};

/// Reversed-role DPSK key distribution over cfg.n_pulses pulses.
ProtocolTranscript run_qkd(const ProtocolConfig& cfg, Rng& rng);

/// Deterministic message transfer; retransmits undetected slots until the
/// whole message arrived or cfg.max_rounds is exhausted (partial delivery is
/// flagged, not fatal).
ProtocolTranscript run_qsdc(const ProtocolConfig& cfg,
                            const std::string& message, Rng& rng);

/// Secret sharing among cfg.n_bobs parties; bob_secrets are equal-length bit
/// strings and Alice's per-slot bit is their XOR.
ProtocolTranscript run_qss(const ProtocolConfig& cfg,
                           const std::vector<std::string>& bob_secrets,
                           Rng& rng);

}  // namespace qmsn
