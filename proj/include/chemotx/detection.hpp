// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chemotx/channel.hpp"
#include "chemotx/errors.hpp"
#include "chemotx/physics.hpp"

namespace chemotx {

/// Standard normal tail probability, Q(x) = erfc(x / sqrt 2) / 2.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// ln p1(y) - ln p0(y) for Gaussian hypotheses N(mu0, s0^2) and N(mu1, s1^2).
inline double log_likelihood_ratio(double y, double mu0, double s0, double mu1, double s1) {
  const double z0 = (y - mu0) / s0;
  const double z1 = (y - mu1) / s1;
  return std::log(s0 / s1) + 0.5 * z0 * z0 - 0.5 * z1 * z1;
}

inline constexpr double kEqualVarianceSwitch = 1e-9;

/**
 * Equal-likelihood point between mu0 and mu1 for unequal-variance Gaussian
 * hypotheses, i.e. the root of log_likelihood_ratio(y) = 0 on the side of the
 * larger-variance mean closest to the other mean.
 *
 * With s = sigma, D = mu1 - mu0 and t = gamma - mu0 the root solves
 *   (s1^2 - s0^2) t^2 + 2 s0^2 D t - s0^2 (D^2 + 2 s1^2 ln(s1/s0)) = 0,
 * evaluated in the cancellation-free form t = 2C / (B + sqrt(B^2 + 4AC)).
 * Relative variance mismatch below 1e-9 returns the midpoint.
 */
inline double ml_threshold(double mu0, double sigma0, double mu1, double sigma1) {
  detail::require_finite(mu0, "mu0");
  detail::require_finite(mu1, "mu1");
  detail::require_positive(sigma0, "sigma0");
  detail::require_positive(sigma1, "sigma1");
  if (!(mu1 > mu0)) throw ParameterError("mu1", "must exceed mu0 (no separability)");

  if (std::abs(sigma1 - sigma0) / sigma0 < kEqualVarianceSwitch) return 0.5 * (mu0 + mu1);
  if (sigma1 < sigma0) {
    // mirror y -> -y so the larger variance sits on the upper hypothesis
    return -ml_threshold(-mu1, sigma1, -mu0, sigma0);
  }
  const double D = mu1 - mu0;
  const double s0sq = sigma0 * sigma0;
  const double A = (sigma1 - sigma0) * (sigma1 + sigma0);
  const double B = 2.0 * s0sq * D;
  const double C = s0sq * (D * D + 2.0 * sigma1 * sigma1 * std::log(sigma1 / sigma0));
  return mu0 + 2.0 * C / (B + std::sqrt(B * B + 4.0 * A * C));
}

/// Single-threshold ML detector: decide 1 iff Y > gamma.
struct DetectorSpec {
  double mu0 = 0.0;
  double sigma0 = 1.0;
  double mu1 = 1.0;
  double sigma1 = 1.0;
  double gamma = 0.5;

  /// Builds the ML detector; throws DetectionError when the root leaves [mu0, mu1].
  static DetectorSpec ml(double mu0, double sigma0, double mu1, double sigma1) {
    DetectorSpec s{mu0, sigma0, mu1, sigma1, ml_threshold(mu0, sigma0, mu1, sigma1)};
    if (s.gamma < mu0 || s.gamma > mu1) {
      throw DetectionError("ML threshold outside [mu0, mu1]; single-threshold rule does not apply");
    }
    return s;
  }

  static DetectorSpec ml(const ChannelStatistics& h0, const ChannelStatistics& h1) {
    return ml(h0.mu, std::sqrt(h0.sigma_Y_sq), h1.mu, std::sqrt(h1.sigma_Y_sq));
  }

  [[nodiscard]] bool decide(double y) const { return y > gamma; }
};

/// Bit error probability with equiprobable symbols.
inline double bep(const DetectorSpec& s) {
  return 0.5 * q_function((s.gamma - s.mu0) / s.sigma0) +
         0.5 * q_function((s.mu1 - s.gamma) / s.sigma1);
}

/**
 * SNR-maximizing ON intensity
 *   I_opt = (sigma_m^2 d^4 / (H0^2 K_control^2 g(T)))^(1/4),
 * the point where the active-propulsion term c3 I^4 equals sigma_m^2.
 */
inline double optimal_intensity(const DerivedCoefficients& c, const LinkConfig& link) {
  link.validate();
  if (c.K_control == 0.0) {
    throw UnboundedOptimumError("K_control = 0: no active noise, SNR is monotone in I");
  }
  const double g = g_of_T(c.D_r, link.T);
  if (!(g > 0.0)) throw UnboundedOptimumError("g(T) = 0");
  const double d2 = link.d * link.d;
  const double num = link.sigma_m * link.sigma_m * d2 * d2;
  const double den = c.H0 * c.H0 * c.K_control * c.K_control * g;
  return std::sqrt(std::sqrt(num / den));
}

enum class MobilityModel { proposed, baseline };

inline const char* to_string(MobilityModel m) {
  return m == MobilityModel::proposed ? "proposed" : "baseline";
}

/**
 * Channel statistics of the decoupled Brownian baseline: the transmitter
 * diffuses with D_t only, so sigma_x^2 = 2 D_t T at every intensity.
 */
inline ChannelStatistics baseline_stats(const DerivedCoefficients& c, const LinkConfig& link,
                                        double I) {
  detail::check_link_inputs(c, link, I);
  return detail::assemble_stats(c, link, I, 2.0 * c.D_t * link.T);
}

inline ChannelStatistics model_stats(const DerivedCoefficients& c, const LinkConfig& link,
                                     double I, MobilityModel model) {
  return model == MobilityModel::proposed ? channel_stats(c, link, I) : baseline_stats(c, link, I);
}

struct LinkPerformance {
  double snr = 0.0;  ///< proxy mu_1^2 / sigma_1^2
  DetectorSpec detector;
  double bep = 0.0;
  ValidityReport validity;
  ChannelStatistics off;
  ChannelStatistics on;
};

/// OOK (I0 = 0, I1 = I) with the ML threshold of the chosen mobility model.
inline LinkPerformance ook_link_performance(const DerivedCoefficients& c, const LinkConfig& link,
                                            double I, MobilityModel model) {
  detail::require_intensity(I);
  if (!(I > 0.0)) throw ParameterError("intensity", "OOK requires I > 0");
  LinkPerformance p;
  p.off = model_stats(c, link, 0.0, model);
  p.on = model_stats(c, link, I, model);
  p.snr = p.on.mu * p.on.mu / p.on.sigma_Y_sq;
  p.detector = DetectorSpec::ml(p.off, p.on);
  p.bep = bep(p.detector);
  p.validity = validity_report(c, link, I);
  return p;
}

inline constexpr double kBepFloor = 1e-300;

struct EstimationGap {
  double log10_ratio = 0.0;  ///< log10(BEP_proposed / BEP_baseline)
  double bep_proposed = 0.0;
  double bep_baseline = 0.0;
  bool clamped = false;      ///< a BEP fell below kBepFloor and was clamped
};

inline EstimationGap estimation_gap(const DerivedCoefficients& c, const LinkConfig& link, double I) {
  EstimationGap g;
  g.bep_proposed = ook_link_performance(c, link, I, MobilityModel::proposed).bep;
  g.bep_baseline = ook_link_performance(c, link, I, MobilityModel::baseline).bep;
  const double p = std::max(g.bep_proposed, kBepFloor);
  const double b = std::max(g.bep_baseline, kBepFloor);
  g.clamped = g.bep_proposed < kBepFloor || g.bep_baseline < kBepFloor;
  g.log10_ratio = std::log10(p) - std::log10(b);
  return g;
}

}  // namespace chemotx
