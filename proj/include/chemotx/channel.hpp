// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "chemotx/errors.hpp"
#include "chemotx/mobility.hpp"
#include "chemotx/physics.hpp"

namespace chemotx {

/// Link geometry, timing, receiver noise and the binary signaling levels.
struct LinkConfig {
  double d = 50e-6;       ///< link distance, m
  double T = 1.0;         ///< symbol duration, s
  double sigma_m = 1.0;   ///< measurement-noise standard deviation, observation units
  double I0 = 0.0;        ///< OFF intensity
  double I1 = 50.0;       ///< ON intensity

  void validate() const {
    detail::require_positive(d, "d");
    detail::require_positive(T, "T");
    detail::require_positive(sigma_m, "sigma_m");
    detail::require_nonnegative(I0, "I0");
    detail::require_finite(I1, "I1");
    if (!(I1 > I0)) throw ParameterError("I1", "must exceed I0");
  }
};

/**
 * Measurement-noise level that yields `snr_ref_db` for a motionless
 * transmitter at distance d driven at `reference_intensity`:
 *   sigma_m = (H0 I_ref / d) / 10^(snr_ref_db / 20).
 */
inline double calibrate_sigma_m(const DerivedCoefficients& c, double d, double reference_intensity,
                                double snr_ref_db) {
  detail::require_positive(d, "d");
  detail::require_positive(reference_intensity, "reference_intensity");
  detail::require_finite(snr_ref_db, "snr_ref_db");
  const double sigma = (c.H0 * reference_intensity / d) / std::pow(10.0, snr_ref_db / 20.0);
  detail::require_positive(sigma, "sigma_m");
  return sigma;
}

/// Linearized received-signal statistics for one signaling level.
struct ChannelStatistics {
  double mu = 0.0;          ///< mean observation
  double sigma_x_sq = 0.0;  ///< transmitter position variance, m^2
  double sigma_Y_sq = 0.0;  ///< total observation variance
  double alpha_b = 0.0;     ///< motion sensitivity, observation units per m
};

namespace detail {

inline void check_link_inputs(const DerivedCoefficients& c, const LinkConfig& link, double I) {
  link.validate();
  require_intensity(I);
  require_finite(c.H0, "H0");
  require_finite(c.K_control, "K_control");
}

inline ChannelStatistics assemble_stats(const DerivedCoefficients& c, const LinkConfig& link,
                                        double I, double sigma_x_sq) {
  ChannelStatistics st;
  st.mu = c.H0 / link.d * I;
  st.alpha_b = c.H0 / (link.d * link.d) * I;
  st.sigma_x_sq = sigma_x_sq;
  st.sigma_Y_sq = link.sigma_m * link.sigma_m + st.alpha_b * st.alpha_b * sigma_x_sq;
  return st;
}

}  // namespace detail

/**
 * Statistics of Y = H0 I / (d - x) + Z_m linearized about x = 0:
 * mu = (H0/d) I, alpha_b = (H0/d^2) I and sigma_Y^2 = sigma_m^2 + alpha_b^2 sigma_x^2.
 * `mob.U` must be the propulsion speed produced by intensity I.
 */
inline ChannelStatistics channel_stats(const DerivedCoefficients& c, const LinkConfig& link,
                                       const MobilityParams& mob, double I) {
  detail::check_link_inputs(c, link, I);
  const double U = c.K_control * I;
  if (std::abs(mob.U - std::abs(U)) > 1e-12 * std::max(std::abs(U), 1e-300)) {
    throw ParameterError("U", "mobility speed does not match K_control * I");
  }
  return detail::assemble_stats(c, link, I, position_variance(mob));
}

inline ChannelStatistics channel_stats(const DerivedCoefficients& c, const LinkConfig& link,
                                       double I) {
  detail::check_link_inputs(c, link, I);
  const MobilityParams mob{c.D_t, c.D_r, std::abs(c.K_control * I), link.T};
  return detail::assemble_stats(c, link, I, position_variance(mob));
}

/// Coefficients of SNR(I) = (c1 I)^2 / (sigma_m^2 + c2 I^2 + c3 I^4).
struct SnrCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;  ///< passive diffusion
  double c3 = 0.0;  ///< active propulsion
  double sigma_m_sq = 0.0;

  [[nodiscard]] double variance(double I) const {
    const double I2 = I * I;
    return sigma_m_sq + c2 * I2 + c3 * I2 * I2;
  }
};

inline SnrCoefficients snr_coefficients(const DerivedCoefficients& c, const LinkConfig& link) {
  link.validate();
  const double h = c.H0 / (link.d * link.d);
  SnrCoefficients k;
  k.c1 = c.H0 / link.d;
  k.c2 = 2.0 * h * h * c.D_t * link.T;
  k.c3 = h * h * c.K_control * c.K_control * g_of_T(c.D_r, link.T);
  k.sigma_m_sq = link.sigma_m * link.sigma_m;
  return k;
}

/// Proxy SNR mu_1^2 / sigma_1^2 of the ON symbol at intensity I.
inline double snr(const DerivedCoefficients& c, const LinkConfig& link, double I) {
  detail::require_intensity(I);
  const SnrCoefficients k = snr_coefficients(c, link);
  const double s = k.c1 * I;
  return s * s / k.variance(I);
}

/**
 * Exact quasi-steady observation H0 I / (d - x) + z. `z` is the measurement
 * noise already scaled to observation units.
 */
inline double observe_nonlinear(const DerivedCoefficients& c, const LinkConfig& link, double I,
                                double x, double z) {
  if (!(x < link.d)) {
    throw SingularityError("transmitter at or beyond the receiver plane (x >= d)");
  }
  return c.H0 * I / (link.d - x) + z;
}

inline constexpr double kMaxSigmaXOverD = 0.1;
inline constexpr double kMaxPeclet = 0.1;
inline constexpr double kMinQuasiSteadyMargin = 1.0;

/// Model-validity ratios at one operating point, each with a pass flag.
struct ValidityReport {
  double ratio_sigma_x_over_d = 0.0;
  double peclet = 0.0;
  double quasi_steady_margin = 0.0;
  bool linearization_ok = true;
  bool peclet_ok = true;
  bool quasi_steady_ok = true;

  [[nodiscard]] bool all_ok() const { return linearization_ok && peclet_ok && quasi_steady_ok; }

  /// Compact flag string for tables, e.g. "L1P1Q0".
  [[nodiscard]] std::string flags() const {
    std::string f = "L0P0Q0";
    f[1] = linearization_ok ? '1' : '0';
    f[3] = peclet_ok ? '1' : '0';
    f[5] = quasi_steady_ok ? '1' : '0';
    return f;
  }
};

inline ValidityReport validity_report(const DerivedCoefficients& c, const LinkConfig& link,
                                      double I) {
  detail::check_link_inputs(c, link, I);
  const double D_B = c.D_B;
  detail::require_positive(D_B, "D_B");
  const double U = std::abs(c.K_control * I);
  const MobilityParams mob{c.D_t, c.D_r, U, link.T};
  ValidityReport r;
  r.ratio_sigma_x_over_d = std::sqrt(position_variance(mob)) / link.d;
  r.peclet = U * link.d / D_B;
  r.quasi_steady_margin = link.T * D_B / (link.d * link.d);
  r.linearization_ok = r.ratio_sigma_x_over_d <= kMaxSigmaXOverD;
  r.peclet_ok = r.peclet <= kMaxPeclet;
  r.quasi_steady_ok = r.quasi_steady_margin >= kMinQuasiSteadyMargin;
  return r;
}

}  // namespace chemotx
