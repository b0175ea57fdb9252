// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>

#include "chemotx/errors.hpp"

namespace chemotx {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

/**
 * Raw physical inputs in SI units.
 *
 * Chemistry is expressed in molecule counts: `kappa_base` is a surface flux in
 * molecules m^-2 s^-1 and `b_dp` a diffusiophoretic mobility in
 * m^5 s^-1 molecule^-1. Multiply by Avogadro's number (mobility) or divide by
 * it (flux) to convert from molar units.
 *
 * The defaults describe a 1 um polystyrene Janus sphere with a hemispherical
 * catalytic cap in water at 293 K. `kappa_base` and `b_dp` are calibrated so
 * that the propulsion gain is 5e-8 m/s per unit intensity (5 um/s at I = 100).
 */
struct PhysicalParams {
  double a = 1e-6;                                ///< particle radius, m
  double eta = 1e-3;                              ///< dynamic viscosity, Pa s
  double T_env = 293.0;                           ///< temperature, K
  double alpha = std::numbers::pi / 2.0;          ///< catalytic cap half-angle, rad
  double kappa_base = 1e18;                       ///< surface flux amplitude
  double b_dp = -4e-34;                           ///< diffusiophoretic mobility (signed)
  double D_fuel = 2e-9;                           ///< fuel diffusivity, m^2/s
  double D_B = 2e-9;                              ///< information-molecule diffusivity, m^2/s
  double beta_R = 1.0;                            ///< receiver gain
  double k_B = kBoltzmann;

  void validate() const {
    detail::require_positive(a, "a");
    detail::require_positive(eta, "eta");
    detail::require_positive(T_env, "T_env");
    detail::require_finite(alpha, "alpha");
    if (alpha < 0.0 || alpha > std::numbers::pi) throw ParameterError("alpha", "must lie in [0, pi]");
    detail::require_nonnegative(kappa_base, "kappa_base");
    detail::require_finite(b_dp, "b_dp");
    detail::require_positive(D_fuel, "D_fuel");
    detail::require_positive(D_B, "D_B");
    detail::require_finite(beta_R, "beta_R");
    detail::require_positive(k_B, "k_B");
  }
};

/// Transport and link coefficients computed once from PhysicalParams.
struct DerivedCoefficients {
  double D_t = 0.0;        ///< translational diffusion, m^2/s
  double D_r = 0.0;        ///< rotational diffusion, 1/s
  double tau_r = 0.0;      ///< rotational relaxation time, s
  double A_cap = 0.0;      ///< catalytic cap area, m^2
  double K_control = 0.0;  ///< propulsion gain, m/s per unit intensity
  double kappa_em = 0.0;   ///< emission gain, molecules/s per unit intensity
  double G_ch = 0.0;       ///< channel constant, molecules/m per unit intensity
  double H0 = 0.0;         ///< observation gain, observation-units m per unit intensity
  double D_B = 0.0;        ///< information-molecule diffusivity, carried for validity checks
};

inline DerivedCoefficients derive_coefficients(const PhysicalParams& p) {
  p.validate();
  using std::numbers::pi;
  DerivedCoefficients c;
  // Stokes-Einstein, translational and rotational
  c.D_t = p.k_B * p.T_env / (6.0 * pi * p.eta * p.a);
  c.D_r = p.k_B * p.T_env / (8.0 * pi * p.eta * p.a * p.a * p.a);
  c.tau_r = 1.0 / c.D_r;
  c.A_cap = 2.0 * pi * p.a * p.a * (1.0 - std::cos(p.alpha));
  const double s = std::sin(p.alpha);
  c.K_control = -p.b_dp * p.kappa_base * s * s / (4.0 * p.D_fuel);
  c.kappa_em = p.kappa_base * c.A_cap;
  c.G_ch = c.kappa_em / (4.0 * pi * p.D_B);
  c.H0 = p.beta_R * c.G_ch;
  c.D_B = p.D_B;
  return c;
}

namespace detail {
inline void require_intensity(double I) {
  require_finite(I, "intensity");
  if (I < 0.0) throw ParameterError("intensity", "must be >= 0");
}
}  // namespace detail

/// Linear control law U = K_control * I.
inline double propulsion_speed(const DerivedCoefficients& c, double intensity) {
  detail::require_intensity(intensity);
  return c.K_control * intensity;
}

/// Emission rate q = kappa_em * I, molecules/s.
inline double emission_rate(const DerivedCoefficients& c, double intensity) {
  detail::require_intensity(intensity);
  return c.kappa_em * intensity;
}

/// Intermediate quantities of the first-Legendre-mode propulsion derivation.
struct AppendixChain {
  double A1 = 0.0;  ///< l=1 coefficient of the surface concentration
  double B1 = 0.0;  ///< slip dipole coefficient
  double U = 0.0;   ///< swim speed, (2/3) B1
};

/**
 * Evaluates the propulsion speed through the surface-concentration dipole
 * A1 -> slip dipole B1 -> U = (2/3) B1 instead of the lumped gain.
 * Must agree with propulsion_speed(derive_coefficients(p), I) to ~1 ulp.
 */
inline AppendixChain appendix_chain(const PhysicalParams& p, double intensity) {
  p.validate();
  detail::require_intensity(intensity);
  const double s = std::sin(p.alpha);
  AppendixChain out;
  out.A1 = -(3.0 * p.a / (8.0 * p.D_fuel)) * s * s * p.kappa_base * intensity;
  out.B1 = (p.b_dp / p.a) * out.A1;
  out.U = (2.0 / 3.0) * out.B1;
  return out;
}

}  // namespace chemotx
