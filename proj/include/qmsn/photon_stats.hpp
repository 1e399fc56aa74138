#pragma once
// ============================================================================
// photon_stats.hpp -- closed-form photon-number statistics and threshold-
// detector click probabilities.
//
// Coherent light carries Poissonian photon numbers, thermal light carries
// Bose-Einstein (geometric) numbers. A threshold single-photon detector with
// efficiency eta and per-gate dark-count probability p_d clicks with
//   P(click) = 1 - (1 - p_d) * E[(1 - eta)^n],
// and E[(1-eta)^n] has a closed form for every state kind in scope:
//   coherent mu     -> exp(-eta * mu)
//   thermal  mu     -> 1 / (1 + eta * mu)
//   fock     n      -> (1 - eta)^n
//   vacuum          -> 1
// ============================================================================
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "qmsn/rng.hpp"

namespace qmsn {

enum class StateKind : std::uint8_t { coherent, thermal, fock, vacuum };

/// One photon-number distribution: a coherent/thermal state of a given mean,
/// a Fock state with a definite photon count, or vacuum.
struct PhotonDistribution {
  StateKind kind = StateKind::vacuum;
  double mean_photons = 0.0;
  std::uint64_t fock_n = 0;

  static PhotonDistribution coherent(double mean) {
    require_nonnegative(mean);
    return {StateKind::coherent, mean, 0};
  }
  static PhotonDistribution thermal(double mean) {
    require_nonnegative(mean);
    return {StateKind::thermal, mean, 0};
  }
  static PhotonDistribution fock(std::uint64_t n) {
    return {StateKind::fock, static_cast<double>(n), n};
  }
  static PhotonDistribution vacuum() { return {StateKind::vacuum, 0.0, 0}; }

 private:
  static void require_nonnegative(double mean) {
    if (!(mean >= 0.0))
      throw std::invalid_argument("mean photon number must be >= 0");
  }
};

/// Threshold detector: efficiency eta in [0,1], dark-count probability per
/// gate p_d in [0,1).
struct DetectorParams {
  double efficiency = 0.1;
  double dark_count_prob = 1e-5;

  void validate() const {
    if (!(efficiency >= 0.0 && efficiency <= 1.0))
      throw std::invalid_argument("det.efficiency must be in [0,1]");
    if (!(dark_count_prob >= 0.0 && dark_count_prob < 1.0))
      throw std::invalid_argument("det.dark_count_prob must be in [0,1)");
  }
};

/// Poisson mass P(n | coherent state of mean mu).
inline double coherent_pn(double mu, std::uint64_t n) {
  if (!(mu >= 0.0)) throw std::invalid_argument("coherent_pn: mu must be >= 0");
  if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(n) * std::log(mu) - mu -
                  std::lgamma(static_cast<double>(n) + 1.0));
}

/// Bose-Einstein mass P(n | thermal state of mean mu_t).
inline double thermal_pn(double mu_t, std::uint64_t n) {
  if (!(mu_t >= 0.0))
    throw std::invalid_argument("thermal_pn: mu_t must be >= 0");
  if (mu_t == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(n) * std::log(mu_t) -
                  (static_cast<double>(n) + 1.0) * std::log1p(mu_t));
}

/// State overlap <alpha| rho_t |alpha> between a coherent state of mean mu_c
/// and a thermal state of mean mu_t.
inline double overlap_coherent_thermal(double mu_c, double mu_t) {
  if (!(mu_c >= 0.0 && mu_t >= 0.0))
    throw std::invalid_argument("overlap: means must be >= 0");
  return std::exp(-mu_c / (1.0 + mu_t)) / (1.0 + mu_t);
}

/// P(n >= 2) for the two families; used by the photon-number-splitting model.
inline double coherent_p_ge2(double mu) {
  return 1.0 - coherent_pn(mu, 0) - coherent_pn(mu, 1);
}
inline double thermal_p_ge2(double mu_t) {
  return 1.0 - thermal_pn(mu_t, 0) - thermal_pn(mu_t, 1);
}

/// No-click generating factor E[(1-eta)^n] of one component.
inline double no_click_factor(const PhotonDistribution& d, double eta) {
  switch (d.kind) {
    case StateKind::coherent:
      return std::exp(-eta * d.mean_photons);
    case StateKind::thermal:
      return 1.0 / (1.0 + eta * d.mean_photons);
    case StateKind::fock:
      return std::pow(1.0 - eta, static_cast<double>(d.fock_n));
    case StateKind::vacuum:
      return 1.0;
  }
  return 1.0;
}

/// Click probability of a threshold detector gated on a mixture of mutually
/// incoherent components: 1 - (1-p_d) * prod_k E[(1-eta)^n_k].
inline double click_prob(std::span<const PhotonDistribution> components,
                         const DetectorParams& det) {
  double survive = 1.0;
  for (const auto& c : components) survive *= no_click_factor(c, det.efficiency);
  return 1.0 - (1.0 - det.dark_count_prob) * survive;
}

inline double click_prob(const PhotonDistribution& component,
                         const DetectorParams& det) {
  return click_prob(std::span<const PhotonDistribution>(&component, 1), det);
}

/// Click probability at the thermal-state output under a photon-number-
/// splitting interceptor. The forwarded state is (1-q)|0><0| + q|1><1| with
/// q = P(n>=2 | coherent mu_c) * P(n>=2 | thermal mu_t), so the detector
/// fires with probability 1 - (1-p_d)(1 - eta q).
inline double pns_forward_click_prob(double mu_c, double mu_t,
                                     const DetectorParams& det) {
  if (!(mu_c >= 0.0 && mu_t >= 0.0))
    throw std::invalid_argument("pns_forward_click_prob: means must be >= 0");
  const double q = coherent_p_ge2(mu_c) * thermal_p_ge2(mu_t);
  return 1.0 - (1.0 - det.dark_count_prob) * (1.0 - det.efficiency * q);
}

/// Rate disturbance the splitting attack leaves at the thermal output when
/// the interceptor matches the sender's mean (mu_c = mu_t). Strictly negative
/// for all mu_t > 0: the attack always depresses the observed rate.
inline double pns_condition_gap(double mu_t, const DetectorParams& det) {
  return pns_forward_click_prob(mu_t, mu_t, det) -
         click_prob(PhotonDistribution::thermal(mu_t), det);
}

/// Truncation bound for series over the photon-number mass functions: keeps
/// at least 1 - 1e-9 of the mass, and the truncated mean within 1e-9 of the
/// exact mean, for every mean in scope (<= ~5 for thermal, higher for
/// coherent).
inline std::uint64_t truncation_bound(double mean) {
  return static_cast<std::uint64_t>(
             std::ceil(mean + 40.0 * std::sqrt(mean + 1.0))) +
         50;
}

/// Draw a photon number from the distribution.
inline std::uint64_t sample_photons(const PhotonDistribution& d, Rng& rng) {
  switch (d.kind) {
    case StateKind::coherent:
      return rng.poisson(d.mean_photons);
    case StateKind::thermal:
      return rng.geometric_photons(d.mean_photons);
    case StateKind::fock:
      return d.fock_n;
    case StateKind::vacuum:
      return 0;
  }
  return 0;
}

}  // namespace qmsn
