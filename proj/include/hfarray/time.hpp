#pragma once

// Stationary-phase (phase-time) tunneling time through a barrier array:
//   tau = d delta / dE + (n b + (n - 1) L) m / (hbar k),  m / (hbar k) = 1 / (2 sqrt(E)).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>

#include "hfarray/array.hpp"
#include "hfarray/error.hpp"

namespace hfarray {

struct TunnelingTimeResult {
  double tau = 0.0;
  double phase = 0.0;           // principal arg of t at E
  double dphase_de = 0.0;
  double traversal_term = 0.0;
  double step_h = 0.0;
  int halvings = 0;             // step halvings spent on StepTooCoarse retries
};

struct TimeOptions {
  double step = 0.0;            // 0 selects default_step(E)
  int max_halvings = 3;
};

/// Stencil half-width for the central phase difference.
inline double default_step(double e) {
  return std::min(1e-6 * std::max(e, 1.0), 1e-4 * e);
}

/// |arg| at or above this across the stencil is treated as a possible wrap.
inline constexpr double max_stencil_phase = std::numbers::pi - 0.1;

/// Transmission amplitude t = 1 / M22 of the whole array.
inline complex transmission(const ArraySpec& arr, double e) {
  const TransferMatrix2 m = total_transfer_matrix(arr, e);
  return scattering_amplitudes(m).t_r;
}

/// Principal value in (-pi, pi].
inline double transmission_phase(const ArraySpec& arr, double e) {
  const double phase = std::arg(transmission(arr, e));
  return phase == -std::numbers::pi ? std::numbers::pi : phase;
}

/// Central difference arg(t(E + h) conj(t(E - h))) / 2h. Taking the argument
/// of the quotient unwraps the branch cut as long as the true change is < pi.
inline double phase_derivative(const ArraySpec& arr, double e, double h) {
  if (!(h > 0.0) || !(e > h)) {
    std::ostringstream os;
    os << "stencil [E - h, E + h] must stay positive (E=" << e << ", h=" << h << ")";
    throw error(errc::non_positive_stencil, os.str());
  }
  const complex plus = transmission(arr, e + h);
  const complex minus = transmission(arr, e - h);
  const double diff = std::arg((plus / std::abs(plus)) * std::conj(minus / std::abs(minus)));
  if (std::abs(diff) >= max_stencil_phase) {
    std::ostringstream os;
    os << "phase changes by " << diff << " across stencil h=" << h << " at E=" << e;
    throw error(errc::step_too_coarse, os.str());
  }
  return diff / (2.0 * h);
}

inline TunnelingTimeResult tunneling_time(const ArraySpec& arr, double e, const TimeOptions& opts = {}) {
  if (!(e > 0.0)) throw error(errc::non_positive_energy, "energy must be positive");
  TunnelingTimeResult out;
  out.phase = transmission_phase(arr, e);
  out.traversal_term = arr.span() * units::mass / (units::hbar * std::sqrt(e));

  double h = opts.step > 0.0 ? opts.step : default_step(e);
  for (int attempt = 0;; ++attempt) {
    try {
      out.dphase_de = units::hbar * phase_derivative(arr, e, h);
      out.step_h = h;
      out.halvings = attempt;
      break;
    } catch (const error& err) {
      if (err.code() != errc::step_too_coarse || attempt >= opts.max_halvings) throw;
      h /= 2.0;
    }
  }
  out.tau = out.dphase_de + out.traversal_term;
  return out;
}

/// Exact E-derivative of atan[((k^2 - q^2) / 2qk) tanh(qb)] for a real barrier,
/// k = sqrt(E), q = sqrt(v_r - E). Tends to 1 / (kq) as b grows.
inline double analytic_real_barrier_time(double v_r, double b, double e) {
  if (!(e > 0.0)) throw error(errc::non_positive_energy, "energy must be positive");
  if (!(e < v_r)) {
    std::ostringstream os;
    os << "E=" << e << " is not below v_r=" << v_r;
    throw error(errc::above_barrier, os.str());
  }
  if (!(b >= 0.0)) throw error(errc::invalid_geometry, "width must be non-negative");

  const double k = std::sqrt(e);
  const double q = std::sqrt(v_r - e);
  const double num = 2.0 * e - v_r;  // k^2 - q^2
  const double den = 2.0 * k * q;
  const double g = num / den;
  // d(num/den)/dE simplifies because num^2 + den^2 = v_r^2.
  const double dg = 2.0 * v_r * v_r / (den * den * den);
  const double th = std::tanh(q * b);
  const double ch = std::cosh(q * b);
  const double dth = std::isfinite(ch) ? -b / (2.0 * q * ch * ch) : 0.0;
  const double f = g * th;
  const double df = dg * th + g * dth;
  return units::hbar * df / (1.0 + f * f);
}

/// max_{i in trailing window} |tau_i - tau_last| / |tau_last|, over the
/// `window` entries preceding the last one.
inline double saturation_metric(std::span<const double> taus, std::size_t window) {
  if (window < 2 || taus.size() <= window) {
    std::ostringstream os;
    os << "window " << window << " needs at least " << window + 1 << " values (got " << taus.size() << ")";
    throw error(errc::window_too_large, os.str());
  }
  const double last = taus.back();
  double worst = 0.0;
  for (std::size_t i = taus.size() - 1 - window; i + 1 < taus.size(); ++i) {
    const double dev = std::abs(taus[i] - last) / std::abs(last);
    if (std::isnan(dev)) return dev;  // std::max would silently drop it
    worst = std::max(worst, dev);
  }
  return worst;
}

inline constexpr std::size_t default_saturation_window = 5;
inline constexpr double default_saturation_threshold = 0.01;

}  // namespace hfarray
