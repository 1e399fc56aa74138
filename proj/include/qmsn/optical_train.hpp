#pragma once
// ============================================================================
// optical_train.hpp -- the physical layer: dual-rail source, polarization
// rotators, polarization-insensitive phase modulation, lossy fiber, PBS
// demultiplexing, one-pulse-delay interferometer and gated detection.
//
// States are symbolic component lists, never Fock-space vectors. Every pulse
// component is a (kind, mean, phase, polarization-angle) tuple; the H and V
// rails are cos^2/sin^2 projections of the polarization angle, which makes
// rotations exact (a rotator only shifts the angle) and keeps total mean
// photon number conserved bit-for-bit through every lossless element.
// ============================================================================
#include <cstdint>
#include <span>

#include "qmsn/inline_vec.hpp"
#include "qmsn/photon_stats.hpp"
#include "qmsn/rng.hpp"

namespace qmsn {

inline constexpr double kPi = 3.14159265358979323846;

/// Weights this close to a rail axis are snapped so that {0, pi/2} rotations
/// demultiplex exactly despite pi being irrational in binary.
inline constexpr double kWeightSnap = 1e-12;

/// Port/rail components below this mean are dropped as numerically vacuum.
inline constexpr double kVacuumMean = 1e-30;

/// One mutually-incoherent component of a pulse. `pol` is the linear
/// polarization angle measured from the H axis; `amount` is the total mean
/// photon number (coherent/thermal) while Fock components carry an exact
/// count in `fock_n`. Thermal components never expose a phase.
struct PolarizedComponent {
  StateKind kind = StateKind::vacuum;
  double amount = 0.0;
  double phase = 0.0;
  double pol = 0.0;
  std::uint64_t fock_n = 0;

  [[nodiscard]] double mean_photons() const {
    return kind == StateKind::fock ? static_cast<double>(fock_n) : amount;
  }
};

/// One rail's share of a component after demultiplexing. Fock shares keep the
/// full count plus the routing weight `fock_weight`; the exact no-click
/// factor of n photons each reaching the detector with probability w and
/// firing with probability eta is (1 - eta*w)^n.
struct ModeComponent {
  StateKind kind = StateKind::vacuum;
  double mean = 0.0;
  double phase = 0.0;
  std::uint64_t fock_n = 0;
  double fock_weight = 1.0;

  static ModeComponent coherent(double mean, double phase);
  static ModeComponent thermal(double mean);
  static ModeComponent fock(std::uint64_t n, double weight, double phase);
};

inline constexpr std::size_t kMaxPulseComponents = 4;
inline constexpr std::size_t kMaxRailComponents = 4;
inline constexpr std::size_t kMaxPortComponents = 8;

using RailComponents = InlineVec<ModeComponent, kMaxRailComponents>;
using PortComponents = InlineVec<ModeComponent, kMaxPortComponents>;

/// The unit propagated through every element: both polarization modes of one
/// optical pulse, plus its position in the pulse train.
struct DualRailPulse {
  InlineVec<PolarizedComponent, kMaxPulseComponents> components;
  std::uint64_t pulse_index = 0;
  std::uint64_t slot_index = 0;

  [[nodiscard]] RailComponents h_components() const;
  [[nodiscard]] RailComponents v_components() const;
  [[nodiscard]] double total_mean_photons() const;
};

/// One demultiplexed rail, tagged with the pulse it came from.
struct RailSignal {
  RailComponents components;
  std::uint64_t pulse_index = 0;
};

struct PbsOutputs {
  RailSignal h;
  RailSignal v;
};

struct InterferometerPorts {
  PortComponents port0;  // constructive port: clicks decode as bit 0
  PortComponents port1;  // destructive port: clicks decode as bit 1
};

/// Fiber with length in km and attenuation in dB/km.
struct ChannelParams {
  double length_km = 1.0;
  double attenuation_db_per_km = 0.2;

  [[nodiscard]] double transmittance() const {
    return std::pow(10.0, -attenuation_db_per_km * length_km / 10.0);
  }
  void validate() const;
};

/// Source: coherent state of mean mu on one rail, thermal decoy of the same
/// mean on the other. arrangement_bit 0 puts the coherent state on H,
/// arrangement_bit 1 on V. mu = 0 yields an empty (vacuum) pulse.
DualRailPulse make_alice_pulse(double mu, int arrangement_bit);

/// Polarization rotator R(theta): shifts every component's angle by theta.
/// theta = 0 is the identity, theta = pi/2 swaps the rails exactly.
DualRailPulse apply_rotator(const DualRailPulse& pulse, double theta);

/// Polarization-insensitive phase modulator: adds phi to every coherent and
/// Fock component on both rails; thermal components are untouched.
DualRailPulse apply_phase_modulator(const DualRailPulse& pulse, double phi);

/// Lossy fiber: coherent/thermal means scale by the transmittance (both
/// families are closed under thinning); Fock counts are binomially thinned.
DualRailPulse apply_channel(const DualRailPulse& pulse, const ChannelParams& ch,
                            Rng& rng);

/// Same loss model with a precomputed transmittance.
DualRailPulse apply_loss(const DualRailPulse& pulse, double transmittance,
                         Rng& rng);

/// Polarizing beam splitter: demultiplexes the pulse into its H and V rails.
PbsOutputs pbs_split(const DualRailPulse& pulse);

/// One-pulse-delay interferometer over the H outputs of two consecutive
/// pulses. Coherent components interfere pairwise: with per-pulse means
/// m1, m2 and phase difference dphi, port0 takes (m1+m2)/4 +
/// sqrt(m1 m2) cos(dphi)/2 and port1 the complement (equal means m give
/// m cos^2(dphi/2) / m sin^2(dphi/2)). Thermal and Fock components carry no
/// inter-pulse coherence and contribute half their mean to each port.
/// Throws std::logic_error when the two rails are not consecutive pulses.
InterferometerPorts interfere_dpsk(const RailSignal& prev,
                                   const RailSignal& curr);

/// Weight-aware click probability of one gated threshold detector.
double click_probability(std::span<const ModeComponent> components,
                         const DetectorParams& det);

/// Gated detection: Bernoulli draw at the components' click probability.
bool detect(std::span<const ModeComponent> components, const DetectorParams& det,
            Rng& rng);

/// Total mean photon number carried by a component list.
double total_mean(std::span<const ModeComponent> components);

}  // namespace qmsn
