// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "chemotx/errors.hpp"
#include "chemotx/physics.hpp"
#include "chemotx/random.hpp"

namespace chemotx {

/// Parameters of a controlled active Brownian particle over one symbol.
struct MobilityParams {
  double D_t = 0.0;  ///< m^2/s
  double D_r = 0.0;  ///< 1/s
  double U = 0.0;    ///< propulsion speed, m/s (held constant over the symbol)
  double T = 0.0;    ///< symbol duration, s

  void validate() const {
    detail::require_positive(D_t, "D_t");
    detail::require_positive(D_r, "D_r");
    detail::require_positive(T, "T");
    detail::require_nonnegative(U, "U");
  }

  static MobilityParams from(const DerivedCoefficients& c, double intensity, double T) {
    return {c.D_t, c.D_r, std::abs(propulsion_speed(c, intensity)), T};
  }
};

inline constexpr double kGSeriesSwitch = 1e-4;

/**
 * Orientation-persistence integral
 *   g(T) = (exp(-D_r T) + D_r T - 1) / D_r^2,
 * so that U^2 g(T) is the active part of the axial displacement variance.
 * Below D_r T = 1e-4 the Taylor series is used; above it, expm1 keeps the
 * cancellation in the numerator harmless.
 */
inline double g_of_T(double D_r, double T) {
  detail::require_positive(D_r, "D_r");
  detail::require_nonnegative(T, "T");
  const double x = D_r * T;
  if (x < kGSeriesSwitch) {
    return T * T * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0);
  }
  return (std::expm1(-x) + x) / (D_r * D_r);
}

/// Exact axial position variance at the decision time: 2 D_t T + U^2 g(T).
inline double position_variance(const MobilityParams& m) {
  m.validate();
  return 2.0 * m.D_t * m.T + m.U * m.U * g_of_T(m.D_r, m.T);
}

struct IntegratorConfig {
  double dt = 1e-4;                     ///< s
  std::uint64_t n_steps = 10000;
  std::uint64_t seed = 0;
  double x0 = 0.0;                      ///< m
  std::optional<double> wall_position;  ///< reflective plane, m; motion confined to x <= wall

  /// Steps chosen as round(T / dt).
  static IntegratorConfig for_duration(double T, double dt, std::uint64_t seed) {
    detail::require_positive(T, "T");
    detail::require_positive(dt, "dt");
    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.n_steps = static_cast<std::uint64_t>(std::llround(T / dt));
    cfg.seed = seed;
    return cfg;
  }

  void validate(const MobilityParams& m) const {
    detail::require_positive(dt, "dt");
    detail::require_finite(x0, "x0");
    if (dt > 1.0 / m.D_r / 100.0) {
      throw ParameterError("dt", "must resolve the rotational relaxation time (dt <= tau_r/100)");
    }
    if (std::abs(static_cast<double>(n_steps) * dt - m.T) > dt) {
      throw ParameterError("n_steps", "n_steps * dt must equal T within one step");
    }
    if (wall_position) {
      detail::require_finite(*wall_position, "wall_position");
      if (x0 > *wall_position) throw ParameterError("x0", "starts beyond the reflective wall");
    }
  }
};

namespace detail {

/// Rotates the unit vector (c, s) by angle `delta`.
inline void rotate(double& c, double& s, double delta) noexcept {
  double cd, sd;
  if (std::abs(delta) < 0.05) {
    // Taylor series; truncation below 1e-17 for |delta| < 0.05
    const double d2 = delta * delta;
    cd = 1.0 - d2 * (0.5 - d2 * (1.0 / 24.0 - d2 * (1.0 / 720.0 - d2 / 40320.0)));
    sd = delta * (1.0 - d2 * (1.0 / 6.0 - d2 * (1.0 / 120.0 - d2 / 5040.0)));
  } else {
    cd = std::cos(delta);
    sd = std::sin(delta);
  }
  const double c2 = c * cd - s * sd;
  s = s * cd + c * sd;
  c = c2;
}

}  // namespace detail

/**
 * Euler-Maruyama integration of the axial position and in-plane orientation
 *   x += U cos(phi) dt + sqrt(2 D_t dt) N,   phi += sqrt(2 D_r dt) N',
 * starting from phi ~ Uniform[0, 2 pi). The start angle is drawn from `eng`;
 * each step then takes one translational and one rotational variate from
 * `normal(eng)`, in that order. Parameters must already be validated.
 *
 * The orientation is carried as (cos phi, sin phi) and advanced by exact
 * rotation, renormalized every 1024 steps.
 */
template <class Engine, class Normal = NormalSampler>
double integrate_axial(const MobilityParams& m, const IntegratorConfig& cfg, Engine& eng, Normal& normal) {
  const double trans = std::sqrt(2.0 * m.D_t * cfg.dt);
  const double rot = std::sqrt(2.0 * m.D_r * cfg.dt);
  const double drift = m.U * cfg.dt;
  const double phi0 = 2.0 * std::numbers::pi * uniform01(eng);
  double c = std::cos(phi0);
  double s = std::sin(phi0);
  double x = cfg.x0;
  const bool walled = cfg.wall_position.has_value();
  const double wall = cfg.wall_position.value_or(0.0);
  for (std::uint64_t k = 0; k < cfg.n_steps; ++k) {
    x += drift * c + trans * normal(eng);
    detail::rotate(c, s, rot * normal(eng));
    if (walled && x > wall) x = 2.0 * wall - x;
    if ((k & 1023U) == 1023U) {
      const double inv = 1.0 / std::sqrt(c * c + s * s);
      c *= inv;
      s *= inv;
    }
  }
  if (!std::isfinite(x)) throw IntegratorDivergence("non-finite axial position after integration");
  return x;
}

/// Final axial position x(T) of one trajectory seeded by cfg.seed.
inline double simulate_trajectory(const MobilityParams& m, const IntegratorConfig& cfg) {
  m.validate();
  cfg.validate(m);
  Xoshiro256 eng(cfg.seed);
  NormalSampler normal;
  return integrate_axial(m, cfg, eng, normal);
}

/**
 * Runs `fn(k)` for k in [0, n) across up to `threads` workers (0 = hardware
 * concurrency). Work is split into contiguous blocks; results must be written
 * by index so the outcome does not depend on scheduling.
 */
template <class Fn>
void parallel_for_index(std::size_t n, unsigned threads, Fn&& fn) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(n, lo + block);
        for (std::size_t k = lo; k < hi; ++k) fn(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// n_trials independent x(T) samples; trial k is seeded with sub_seed(cfg.seed, k).
inline std::vector<double> sample_positions(const MobilityParams& m, const IntegratorConfig& cfg,
                                            std::size_t n_trials, unsigned threads = 0) {
  if (n_trials < 1) throw ParameterError("n_trials", "must be >= 1");
  m.validate();
  cfg.validate(m);
  std::vector<double> out(n_trials);
  parallel_for_index(n_trials, threads, [&](std::size_t k) {
    Xoshiro256 eng(sub_seed(cfg.seed, k));
    NormalSampler normal;
    out[k] = integrate_axial(m, cfg, eng, normal);
  });
  return out;
}

}  // namespace chemotx
