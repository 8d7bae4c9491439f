#pragma once

// Self-checks run by `hfarray validate`: analytic limits, closed form versus
// boundary-condition oracle, the uncoupled reduction and the matrix invariants.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "hfarray/array.hpp"
#include "hfarray/experiments.hpp"
#include "hfarray/oracle.hpp"
#include "hfarray/time.hpp"
#include "hfarray/twochannel.hpp"

namespace hfarray::validation {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Uniform draws of valid single-barrier specs over v_r in [0.5, 20],
/// v_i in [0, 20], v_c in [0, 15], delta in [-5, 5], b in [0.01, 5],
/// a1 in [0, 3] and E in (0, v_r).
struct RandomSpecSampler {
  std::uint64_t seed = 20240601;

  struct Sample {
    BarrierSpec spec;
    double e = 0.0;
  };

  Sample operator()(std::uint64_t index) const {
    const SplitMix64 rng(seed);
    auto u = [&](int slot, double lo, double hi) { return lo + (hi - lo) * rng.uniform(8 * index + slot); };
    Sample s;
    s.spec.v_r = u(0, 0.5, 20.0);
    s.spec.v_i = u(1, 0.0, 20.0);
    s.spec.v_c = u(2, 0.0, 15.0);
    s.spec.delta = u(3, -5.0, 5.0);
    s.spec.a1 = u(4, 0.0, 3.0);
    s.spec.a2 = s.spec.a1 + u(5, 0.01, 5.0);
    s.e = s.spec.v_r * u(6, 1e-3, 0.999);
    return s;
  }
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace detail

/// Numerical tau of single real barriers (through the coupled machinery at
/// v_c = 0) against the closed-form arctan derivative.
inline CheckResult check_real_barrier_time() {
  CheckResult r{"real-barrier-analytic", true, {}};
  double worst = 0.0;
  for (double b : {0.5, 1.0, 2.0, 5.0}) {
    const ArraySpec arr = build_uniform_array(1, b, 0.0, 1.0, 1.0, 0.0, 0.02);
    const double num = tunneling_time(arr, 0.5).tau;
    const double ref = analytic_real_barrier_time(1.0, b, 0.5);
    worst = std::max(worst, std::abs(num - ref) / std::abs(ref));
  }
  const double tau5 = tunneling_time(build_uniform_array(1, 5.0, 0.0, 1.0, 1.0, 0.0, 0.02), 0.5).tau;
  const double tau10 = tunneling_time(build_uniform_array(1, 10.0, 0.0, 1.0, 1.0, 0.0, 0.02), 0.5).tau;
  r.passed = worst <= 1e-6 && std::abs(tau5 - 1.99666) <= 1e-4 && std::abs(tau10 - 2.0) <= 1e-3;
  r.detail = "max rel dev " + detail::fmt(worst) + ", tau(b=5)=" + format_double(tau5) +
             ", tau(b=10)=" + format_double(tau10);
  return r;
}

/// Closed-form M against the 8x8 boundary solve on `count` random specs.
inline CheckResult check_oracle_equivalence(std::size_t count = 200) {
  CheckResult r{"oracle-equivalence", true, {}};
  const RandomSpecSampler sampler;
  double worst = 0.0;
  double worst_det = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const auto s = sampler(j);
    const TransferMatrix2 closed = barrier_transfer_matrix(s.spec, s.e);
    const TransferMatrix2 brute = oracle_transfer_matrix(s.spec, s.e);
    worst = std::max(worst, relative_deviation(closed, brute));
    worst_det = std::max(worst_det, det_deviation(closed));
  }
  r.passed = worst <= 1e-7 && worst_det <= 1e-9;
  r.detail = std::to_string(count) + " specs, max rel dev " + detail::fmt(worst) + ", max det dev " +
             detail::fmt(worst_det);
  return r;
}

/// Coupled matrix at v_c = 0 against the reduced real-barrier matrix on a
/// 20 x 20 (E, b) grid with v_r = 1.
inline CheckResult check_vc_zero_reduction() {
  CheckResult r{"vc-zero-reduction", true, {}};
  double worst = 0.0;
  double worst_m22 = 0.0;
  for (int ie = 0; ie < 20; ++ie) {
    const double e = 0.05 + 0.9 * ie / 19.0;
    for (int ib = 0; ib < 20; ++ib) {
      const double b = 0.05 + 4.95 * ib / 19.0;
      const BarrierSpec spec{1.0, 1.0, 0.0, 0.02, 0.3, 0.3 + b};
      const TransferMatrix2 m = barrier_transfer_matrix(spec, e);
      worst = std::max(worst, relative_deviation(m, vc_zero_transfer_matrix(spec, e)));
      const complex m22 = vc_zero_m22(spec, e);
      worst_m22 = std::max(worst_m22, std::abs(m.m22 - m22) / std::abs(m22));
    }
  }
  r.passed = worst <= 1e-10 && worst_m22 <= 1e-10;
  r.detail = "max rel dev " + detail::fmt(worst) + ", M22 " + detail::fmt(worst_m22);
  return r;
}

inline CheckResult check_det_multiplicativity() {
  CheckResult r{"det-multiplicativity", true, {}};
  double worst = 0.0;
  for (double v_c : {0.1, 0.3, 0.9, 1.9}) {
    for (std::size_t n : {1u, 5u, 20u, 50u}) {
      const ArraySpec arr = build_uniform_array(n, 0.2, 0.01, 1.0, 1.0, v_c, 0.02);
      worst = std::max(worst, det_deviation(total_transfer_matrix(arr, 0.5)));
    }
  }
  r.passed = worst <= 1e-9;
  r.detail = "max det dev " + detail::fmt(worst);
  return r;
}

inline CheckResult check_decay_constant_sum() {
  CheckResult r{"alpha2-plus-beta2", true, {}};
  const RandomSpecSampler sampler{7};
  double worst = 0.0;
  for (std::uint64_t j = 0; j < 500; ++j) {
    const auto s = sampler(j);
    const ChannelKinematics kin = channel_kinematics(s.spec, s.e);
    worst = std::max(worst, std::abs(kin.alpha_sq + kin.beta_sq - 2.0 * (s.spec.v_r - s.e)));
  }
  r.passed = worst <= 1e-13;
  r.detail = "max abs dev " + detail::fmt(worst);
  return r;
}

inline CheckResult check_elastic_unitarity() {
  CheckResult r{"elastic-unitarity", true, {}};
  const SplitMix64 rng(99);
  double worst = 0.0;
  for (std::uint64_t j = 0; j < 100; ++j) {
    const double v_r = 0.5 + 9.5 * rng.uniform(6 * j);
    const double b = 0.05 + 1.0 * rng.uniform(6 * j + 1);
    const double l = 2.0 * rng.uniform(6 * j + 2);
    const auto n = static_cast<std::size_t>(1 + 15 * rng.uniform(6 * j + 3));
    const double e = v_r * (0.01 + 0.98 * rng.uniform(6 * j + 4));
    const ArraySpec arr = build_uniform_array(n, b, l, v_r, 0.7 * v_r, 0.0, 0.1);
    const auto c = scattering_coefficients(scattering_amplitudes(total_transfer_matrix(arr, e)));
    worst = std::max(worst, std::abs(c.t_coeff + c.r_l_coeff - 1.0));
  }
  r.passed = worst <= 1e-10;
  r.detail = "max |T + R - 1| " + detail::fmt(worst);
  return r;
}

inline CheckResult check_translation_covariance() {
  CheckResult r{"translation-covariance", true, {}};
  const RandomSpecSampler sampler{11};
  double worst = 0.0;
  for (std::uint64_t j = 0; j < 100; ++j) {
    const auto s = sampler(j);
    const double shift = 0.37 + 0.5 * static_cast<double>(j % 7);
    BarrierSpec moved = s.spec;
    moved.a1 += shift;
    moved.a2 += shift;
    const TransferMatrix2 m0 = barrier_transfer_matrix(s.spec, s.e);
    const TransferMatrix2 m1 = barrier_transfer_matrix(moved, s.e);
    // Only the e^{-+i(a1+a2)k} phases of the off-diagonal elements move.
    const complex ph = std::exp(complex(0.0, -2.0 * shift * std::sqrt(s.e)));
    const double scale = m0.max_abs();
    worst = std::max({worst, std::abs(m1.m11 - m0.m11) / scale, std::abs(m1.m22 - m0.m22) / scale,
                      std::abs(m1.m12 - m0.m12 * ph) / scale, std::abs(m1.m21 - m0.m21 * std::conj(ph)) / scale});
  }
  r.passed = worst <= 1e-9;
  r.detail = "max rel dev " + detail::fmt(worst);
  return r;
}

/// Matrix elements just either side of d = 0 at fixed v_c.
inline CheckResult check_degenerate_continuity() {
  CheckResult r{"degenerate-d-continuity", true, {}};
  double worst = 0.0;
  for (double v_c : {0.3, 1.0, 5.0}) {
    for (double e : {0.2, 0.5, 0.8}) {
      // d = (v_r - v_i - delta) / 2 = +-1e-8 with v_r = 1, delta = 0.02.
      const BarrierSpec plus{1.0, 1.0 - 0.02 - 2e-8, v_c, 0.02, 0.0, 0.7};
      const BarrierSpec minus{1.0, 1.0 - 0.02 + 2e-8, v_c, 0.02, 0.0, 0.7};
      const BarrierSpec exact{1.0, 0.98, v_c, 0.02, 0.0, 0.7};
      const TransferMatrix2 mp = barrier_transfer_matrix(plus, e);
      const TransferMatrix2 mm = barrier_transfer_matrix(minus, e);
      const TransferMatrix2 m0 = barrier_transfer_matrix(exact, e);
      worst = std::max({worst, relative_deviation(mp, mm), relative_deviation(m0, mm)});
    }
  }
  r.passed = worst < 1e-5;
  r.detail = "max rel dev " + detail::fmt(worst);
  return r;
}

inline std::vector<CheckResult> run_all() {
  return {check_real_barrier_time(),   check_oracle_equivalence(),     check_vc_zero_reduction(),
          check_det_multiplicativity(), check_decay_constant_sum(),    check_elastic_unitarity(),
          check_translation_covariance(), check_degenerate_continuity()};
}

}  // namespace hfarray::validation
