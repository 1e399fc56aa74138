#pragma once
// Eve as a channel interceptor: intercept-resend with arrangement confusion,
// photon-number splitting, a loss-matched beam splitter, and detector
// blinding by injected bright light.
#include <cstdint>

#include "qmsn/optical_train.hpp"
#include "qmsn/rng.hpp"

namespace qmsn {

enum class AttackType : std::uint8_t {
  none,
  intercept_resend,
  pns,
  beam_splitter,
  blinding,
};

struct AttackKind {
  AttackType type = AttackType::none;
  double p_swap = 0.0;         // intercept_resend: rail-confusion probability
  double reflectance = 0.0;    // beam_splitter: Eve's tap fraction
  double injected_mean = 0.0;  // blinding: mean of the injected thermal light

  static AttackKind none() { return {}; }
  static AttackKind intercept_resend(double p_swap);
  static AttackKind pns();
  static AttackKind beam_splitter(double reflectance);
  static AttackKind blinding(double injected_mean);

  void validate() const;
};

/// Eve's running tally across a protocol run.
struct EveRecord {
  std::uint64_t pulses_attacked = 0;
  std::uint64_t photons_captured = 0;
  std::uint64_t slots_with_four_photons = 0;
  int phase_candidates_per_slot = 4;
  std::uint64_t bits_inferred = 0;
};

/// Per-pulse capture outcome of a splitting-type attack.
struct PulseCapture {
  std::uint64_t captured_h = 0;
  std::uint64_t captured_v = 0;
};

/// Intercept-resend on the return leg: Eve measures the in-flight pulse and
/// forwards a freshly prepared one matching the arriving means, with the
/// coherent phase copied. With probability p_swap she confuses the rails and
/// the coherent and thermal states change places.
DualRailPulse intercept_resend(const DualRailPulse& pulse, double p_swap,
                               Rng& rng);

/// Photon-number splitting after the far-end modulation: Eve counts both
/// rails; when both carry at least two photons she keeps one photon per rail
/// and forwards the remainder as number states over a lossless line,
/// otherwise she absorbs the pulse and forwards vacuum.
DualRailPulse pns_attack(const DualRailPulse& pulse, Rng& rng,
                         EveRecord& record);

/// Beam-splitter tap: Eve keeps `reflectance` of every component and forwards
/// the rest losslessly. With reflectance = 1 - T^2 the forwarded statistics
/// match an honest double pass exactly.
DualRailPulse beam_splitter_attack(const DualRailPulse& pulse,
                                   double reflectance, Rng& rng,
                                   EveRecord& record, PulseCapture& capture);

/// Detector blinding: adds a bright thermal component to both rails so every
/// downstream gate saturates.
DualRailPulse blinding_attack(const DualRailPulse& pulse, double injected_mean);

/// Of the slots where Eve holds one photon from each rail of both pulses she
/// must guess among four phase pairings; one in four guesses is informative.
double eve_phase_ambiguity(const EveRecord& record,
                           std::uint64_t slots_with_four_photons);

}  // namespace qmsn
