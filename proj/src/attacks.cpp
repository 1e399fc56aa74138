#include "qmsn/attacks.hpp"

#include <cmath>
#include <stdexcept>

namespace qmsn {
namespace {

bool is_h_aligned(double pol) {
  const double c = std::cos(pol);
  return c * c >= 0.5;
}

/// Sample the photon number a component drops on each rail.
void sample_rail_photons(const PolarizedComponent& c, Rng& rng,
                         std::uint64_t& n_h, std::uint64_t& n_v) {
  std::uint64_t n = 0;
  switch (c.kind) {
    case StateKind::coherent:
      n = rng.poisson(c.amount);
      break;
    case StateKind::thermal:
      n = rng.geometric_photons(c.amount);
      break;
    case StateKind::fock:
      n = c.fock_n;
      break;
    case StateKind::vacuum:
      return;
  }
  const double ch = std::cos(c.pol);
  const double wh = ch * ch;
  std::uint64_t to_h;
  if (wh > 1.0 - kWeightSnap)
    to_h = n;
  else if (wh < kWeightSnap)
    to_h = 0;
  else
    to_h = rng.binomial(n, wh);
  n_h += to_h;
  n_v += n - to_h;
}

}  // namespace

AttackKind AttackKind::intercept_resend(double p_swap) {
  AttackKind a;
  a.type = AttackType::intercept_resend;
  a.p_swap = p_swap;
  a.validate();
  return a;
}

AttackKind AttackKind::pns() {
  AttackKind a;
  a.type = AttackType::pns;
  return a;
}

AttackKind AttackKind::beam_splitter(double reflectance) {
  AttackKind a;
  a.type = AttackType::beam_splitter;
  a.reflectance = reflectance;
  a.validate();
  return a;
}

AttackKind AttackKind::blinding(double injected_mean) {
  AttackKind a;
  a.type = AttackType::blinding;
  a.injected_mean = injected_mean;
  a.validate();
  return a;
}

void AttackKind::validate() const {
  switch (type) {
    case AttackType::intercept_resend:
      if (!(p_swap >= 0.0 && p_swap <= 1.0))
        throw std::invalid_argument("attack.p_swap must be in [0,1]");
      break;
    case AttackType::beam_splitter:
      if (!(reflectance >= 0.0 && reflectance <= 1.0))
        throw std::invalid_argument("attack.reflectance must be in [0,1]");
      break;
    case AttackType::blinding:
      if (!(injected_mean > 0.0))
        throw std::invalid_argument("attack.injected_mean must be > 0");
      break;
    case AttackType::none:
    case AttackType::pns:
      break;
  }
}

DualRailPulse intercept_resend(const DualRailPulse& pulse, double p_swap,
                               Rng& rng) {
  if (!(p_swap >= 0.0 && p_swap <= 1.0))
    throw std::invalid_argument("intercept_resend: p_swap must be in [0,1]");

  // Eve reads off the arriving arrangement, means and coherent phase, then
  // resends a fresh matching pulse; confusion exchanges the two rails.
  double coherent_mean = 0.0;
  double coherent_phase = 0.0;
  double thermal_mean = 0.0;
  bool coherent_on_h = true;
  for (const auto& c : pulse.components) {
    if (c.kind == StateKind::coherent) {
      coherent_mean = c.amount;
      coherent_phase = c.phase;
      coherent_on_h = is_h_aligned(c.pol);
    } else if (c.kind == StateKind::thermal) {
      thermal_mean = c.amount;
    }
  }

  const bool swap = rng.bernoulli(p_swap);
  const bool fresh_coherent_on_h = swap ? !coherent_on_h : coherent_on_h;

  DualRailPulse out;
  out.pulse_index = pulse.pulse_index;
  out.slot_index = pulse.slot_index;
  if (coherent_mean > kVacuumMean)
    out.components.push_back({StateKind::coherent, coherent_mean,
                              coherent_phase,
                              fresh_coherent_on_h ? 0.0 : kPi / 2.0, 0});
  if (thermal_mean > kVacuumMean)
    out.components.push_back({StateKind::thermal, thermal_mean, 0.0,
                              fresh_coherent_on_h ? kPi / 2.0 : 0.0, 0});
  return out;
}

DualRailPulse pns_attack(const DualRailPulse& pulse, Rng& rng,
                         EveRecord& record) {
  ++record.pulses_attacked;

  std::uint64_t n_h = 0;
  std::uint64_t n_v = 0;
  double h_phase = 0.0;
  double v_phase = 0.0;
  for (const auto& c : pulse.components) {
    // the forwarded number states keep the classical phase tag of whatever
    // phase-carrying light sat on their rail
    if (c.kind == StateKind::coherent || c.kind == StateKind::fock)
      (is_h_aligned(c.pol) ? h_phase : v_phase) = c.phase;
    sample_rail_photons(c, rng, n_h, n_v);
  }

  DualRailPulse out;
  out.pulse_index = pulse.pulse_index;
  out.slot_index = pulse.slot_index;

  if (n_h < 2 || n_v < 2) return out;  // absorbed; vacuum goes forward

  record.photons_captured += 2;
  if (n_h > 1)
    out.components.push_back(
        {StateKind::fock, 0.0, h_phase, 0.0, n_h - 1});
  if (n_v > 1)
    out.components.push_back(
        {StateKind::fock, 0.0, v_phase, kPi / 2.0, n_v - 1});
  return out;
}

DualRailPulse beam_splitter_attack(const DualRailPulse& pulse,
                                   double reflectance, Rng& rng,
                                   EveRecord& record, PulseCapture& capture) {
  if (!(reflectance >= 0.0 && reflectance <= 1.0))
    throw std::invalid_argument(
        "beam_splitter_attack: reflectance must be in [0,1]");
  ++record.pulses_attacked;
  capture = PulseCapture{};

  DualRailPulse out;
  out.pulse_index = pulse.pulse_index;
  out.slot_index = pulse.slot_index;

  for (const auto& c : pulse.components) {
    PolarizedComponent forwarded = c;
    PolarizedComponent kept = c;
    if (c.kind == StateKind::fock) {
      const std::uint64_t k = rng.binomial(c.fock_n, reflectance);
      kept.fock_n = k;
      forwarded.fock_n = c.fock_n - k;
    } else {
      kept.amount = c.amount * reflectance;
      forwarded.amount = c.amount * (1.0 - reflectance);
    }

    // Eve samples her tap to know what she actually caught.
    std::uint64_t kept_h = 0;
    std::uint64_t kept_v = 0;
    sample_rail_photons(kept, rng, kept_h, kept_v);
    capture.captured_h += kept_h;
    capture.captured_v += kept_v;

    if (forwarded.kind == StateKind::fock ? forwarded.fock_n > 0
                                          : forwarded.amount > kVacuumMean)
      out.components.push_back(forwarded);
  }

  record.photons_captured += capture.captured_h + capture.captured_v;
  return out;
}

DualRailPulse blinding_attack(const DualRailPulse& pulse,
                              double injected_mean) {
  if (!(injected_mean > 0.0))
    throw std::invalid_argument(
        "blinding_attack: injected_mean must be > 0");
  DualRailPulse out = pulse;
  out.components.push_back(
      {StateKind::thermal, injected_mean, 0.0, 0.0, 0});
  out.components.push_back(
      {StateKind::thermal, injected_mean, 0.0, kPi / 2.0, 0});
  return out;
}

double eve_phase_ambiguity(const EveRecord& record,
                           std::uint64_t slots_with_four_photons) {
  return static_cast<double>(slots_with_four_photons) /
         static_cast<double>(record.phase_candidates_per_slot);
}

}  // namespace qmsn
