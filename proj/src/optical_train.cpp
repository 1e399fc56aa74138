#include "qmsn/optical_train.hpp"

#include <cmath>
#include <stdexcept>

namespace qmsn {
namespace {

double wrap_angle(double x) {
  const double two_pi = 2.0 * kPi;
  if (x >= 0.0 && x < two_pi) return x;  // hot path: already in range
  x = std::fmod(x, two_pi);
  return x < 0.0 ? x + two_pi : x;
}

/// cos^2 projection weight onto H, snapped at the rail axes.
double h_weight(double pol) {
  const double c = std::cos(pol);
  const double w = c * c;
  if (w < kWeightSnap) return 0.0;
  if (w > 1.0 - kWeightSnap) return 1.0;
  return w;
}

void project_component(const PolarizedComponent& c, double weight,
                       RailComponents& out) {
  if (weight <= 0.0) return;
  switch (c.kind) {
    case StateKind::coherent:
      if (c.amount * weight > kVacuumMean)
        out.push_back(ModeComponent::coherent(c.amount * weight, c.phase));
      break;
    case StateKind::thermal:
      if (c.amount * weight > kVacuumMean)
        out.push_back(ModeComponent::thermal(c.amount * weight));
      break;
    case StateKind::fock:
      if (c.fock_n > 0)
        out.push_back(ModeComponent::fock(c.fock_n, weight, c.phase));
      break;
    case StateKind::vacuum:
      break;
  }
}

RailComponents project_rail(const DualRailPulse& pulse, bool horizontal) {
  RailComponents out;
  for (const auto& c : pulse.components) {
    const double wh = h_weight(c.pol);
    project_component(c, horizontal ? wh : 1.0 - wh, out);
  }
  return out;
}

}  // namespace

ModeComponent ModeComponent::coherent(double mean, double phase) {
  return {StateKind::coherent, mean, wrap_angle(phase), 0, 1.0};
}

ModeComponent ModeComponent::thermal(double mean) {
  return {StateKind::thermal, mean, 0.0, 0, 1.0};
}

ModeComponent ModeComponent::fock(std::uint64_t n, double weight, double phase) {
  return {StateKind::fock, static_cast<double>(n) * weight, wrap_angle(phase),
          n, weight};
}

RailComponents DualRailPulse::h_components() const {
  return project_rail(*this, true);
}

RailComponents DualRailPulse::v_components() const {
  return project_rail(*this, false);
}

double DualRailPulse::total_mean_photons() const {
  double sum = 0.0;
  for (const auto& c : components) sum += c.mean_photons();
  return sum;
}

void ChannelParams::validate() const {
  if (!(length_km >= 0.0))
    throw std::invalid_argument("channel.length_km must be >= 0");
  if (!(attenuation_db_per_km >= 0.0))
    throw std::invalid_argument("channel.attenuation_db_per_km must be >= 0");
}

DualRailPulse make_alice_pulse(double mu, int arrangement_bit) {
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
  if (arrangement_bit != 0 && arrangement_bit != 1)
    throw std::invalid_argument("arrangement_bit must be 0 or 1");
  DualRailPulse pulse;
  if (mu == 0.0) return pulse;
  const double coherent_pol = arrangement_bit == 0 ? 0.0 : kPi / 2.0;
  const double thermal_pol = arrangement_bit == 0 ? kPi / 2.0 : 0.0;
  pulse.components.push_back(
      {StateKind::coherent, mu, 0.0, coherent_pol, 0});
  pulse.components.push_back({StateKind::thermal, mu, 0.0, thermal_pol, 0});
  return pulse;
}

DualRailPulse apply_rotator(const DualRailPulse& pulse, double theta) {
  DualRailPulse out = pulse;
  for (auto& c : out.components) c.pol = wrap_angle(c.pol + theta);
  return out;
}

DualRailPulse apply_phase_modulator(const DualRailPulse& pulse, double phi) {
  DualRailPulse out = pulse;
  for (auto& c : out.components) {
    if (c.kind == StateKind::coherent || c.kind == StateKind::fock)
      c.phase = wrap_angle(c.phase + phi);
  }
  return out;
}

DualRailPulse apply_channel(const DualRailPulse& pulse, const ChannelParams& ch,
                            Rng& rng) {
  ch.validate();
  return apply_loss(pulse, ch.transmittance(), rng);
}

DualRailPulse apply_loss(const DualRailPulse& pulse, double t, Rng& rng) {
  DualRailPulse out;
  out.pulse_index = pulse.pulse_index;
  out.slot_index = pulse.slot_index;
  for (const auto& c : pulse.components) {
    PolarizedComponent thinned = c;
    if (c.kind == StateKind::fock) {
      thinned.fock_n = rng.binomial(c.fock_n, t);
      if (thinned.fock_n == 0) continue;
    } else {
      thinned.amount = c.amount * t;
      if (thinned.amount <= kVacuumMean) continue;
    }
    out.components.push_back(thinned);
  }
  return out;
}

PbsOutputs pbs_split(const DualRailPulse& pulse) {
  PbsOutputs outs;
  outs.h.pulse_index = pulse.pulse_index;
  outs.v.pulse_index = pulse.pulse_index;
  for (const auto& c : pulse.components) {
    const double wh = h_weight(c.pol);
    project_component(c, wh, outs.h.components);
    project_component(c, 1.0 - wh, outs.v.components);
  }
  return outs;
}

InterferometerPorts interfere_dpsk(const RailSignal& prev,
                                   const RailSignal& curr) {
  if (curr.pulse_index != prev.pulse_index + 1)
    throw std::logic_error(
        "interfere_dpsk: inputs must be consecutive pulses");

  InterferometerPorts ports;

  // Coherent components pair up across the two pulses in list order; an
  // unpaired component interferes with vacuum (m/4 to each port).
  InlineVec<const ModeComponent*, kMaxRailComponents> prev_coh;
  InlineVec<const ModeComponent*, kMaxRailComponents> curr_coh;
  for (const auto& c : prev.components)
    if (c.kind == StateKind::coherent) prev_coh.push_back(&c);
  for (const auto& c : curr.components)
    if (c.kind == StateKind::coherent) curr_coh.push_back(&c);

  const std::size_t pairs =
      prev_coh.size() > curr_coh.size() ? prev_coh.size() : curr_coh.size();
  for (std::size_t i = 0; i < pairs; ++i) {
    const ModeComponent* a = i < prev_coh.size() ? prev_coh[i] : nullptr;
    const ModeComponent* b = i < curr_coh.size() ? curr_coh[i] : nullptr;
    const double m1 = a ? a->mean : 0.0;
    const double m2 = b ? b->mean : 0.0;
    const double dphi = (b ? b->phase : 0.0) - (a ? a->phase : 0.0);
    const double cross = 0.5 * std::sqrt(m1 * m2) * std::cos(dphi);
    double p0 = 0.25 * (m1 + m2) + cross;
    double p1 = 0.25 * (m1 + m2) - cross;
    if (p0 < 0.0) p0 = 0.0;
    if (p1 < 0.0) p1 = 0.0;
    const double out_phase = b ? b->phase : (a ? a->phase : 0.0);
    if (p0 > kVacuumMean)
      ports.port0.push_back(ModeComponent::coherent(p0, out_phase));
    if (p1 > kVacuumMean)
      ports.port1.push_back(ModeComponent::coherent(p1, out_phase));
  }

  // Thermal and Fock components have no inter-pulse coherence: half to each
  // port (Fock photons route 50/50 independently, folded into the weight).
  auto route_incoherent = [&ports](const ModeComponent& c) {
    if (c.kind == StateKind::thermal) {
      if (c.mean * 0.5 > kVacuumMean) {
        ports.port0.push_back(ModeComponent::thermal(c.mean * 0.5));
        ports.port1.push_back(ModeComponent::thermal(c.mean * 0.5));
      }
    } else if (c.kind == StateKind::fock) {
      ports.port0.push_back(
          ModeComponent::fock(c.fock_n, c.fock_weight * 0.5, c.phase));
      ports.port1.push_back(
          ModeComponent::fock(c.fock_n, c.fock_weight * 0.5, c.phase));
    }
  };
  for (const auto& c : prev.components) route_incoherent(c);
  for (const auto& c : curr.components) route_incoherent(c);

  return ports;
}

double click_probability(std::span<const ModeComponent> components,
                         const DetectorParams& det) {
  double survive = 1.0;
  for (const auto& c : components) {
    switch (c.kind) {
      case StateKind::coherent:
        survive *= std::exp(-det.efficiency * c.mean);
        break;
      case StateKind::thermal:
        survive *= 1.0 / (1.0 + det.efficiency * c.mean);
        break;
      case StateKind::fock:
        survive *= std::pow(1.0 - det.efficiency * c.fock_weight,
                            static_cast<double>(c.fock_n));
        break;
      case StateKind::vacuum:
        break;
    }
  }
  return 1.0 - (1.0 - det.dark_count_prob) * survive;
}

bool detect(std::span<const ModeComponent> components, const DetectorParams& det,
            Rng& rng) {
  return rng.bernoulli(click_probability(components, det));
}

double total_mean(std::span<const ModeComponent> components) {
  double sum = 0.0;
  for (const auto& c : components)
    sum += c.kind == StateKind::fock
               ? static_cast<double>(c.fock_n) * c.fock_weight
               : c.mean;
  return sum;
}

}  // namespace qmsn
