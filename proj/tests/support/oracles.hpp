#pragma once

// Reference values computed independently of the library's code paths.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "hfarray/twochannel.hpp"

namespace hfarray::test {

using big = boost::multiprecision::cpp_bin_float_50;

/// d sec(theta) with theta = atan(v_c / d), evaluated literally in 50 digits.
inline double d_sec_theta(double v_r, double v_i, double v_c, double delta) {
  const big d = (big(v_r) - big(v_i) - big(delta)) / 2;
  return static_cast<double>(d / cos(atan(big(v_c) / d)));
}

/// Transmission amplitude of a real barrier on [0, b]:
/// 2kq e^{-ibk} / (2kq cosh(qb) - i (2E - v_r) sinh(qb)).
inline std::complex<double> real_barrier_amplitude(double v_r, double b, double e) {
  const double k = std::sqrt(e);
  const std::complex<double> q = std::sqrt(std::complex<double>(v_r - e, 0.0));
  const std::complex<double> i(0.0, 1.0);
  return 2.0 * k * q * std::exp(-i * (b * k)) /
         (2.0 * k * q * std::cosh(q * b) - i * (2.0 * e - v_r) * std::sinh(q * b));
}

/// tau = d/dE atan[((k^2 - q^2)/(2qk)) tanh(qb)] by a 50-digit central
/// difference with h = 1e-20.
inline double real_barrier_time_fd(double v_r, double b, double e) {
  auto phase = [&](const big& en) {
    const big k = sqrt(en);
    const big q = sqrt(big(v_r) - en);
    return atan((k * k - q * q) / (2 * q * k) * tanh(q * big(b)));
  };
  const big h("1e-20");
  return static_cast<double>((phase(big(e) + h) - phase(big(e) - h)) / (2 * h));
}

/// Hand-rolled generator of valid barrier specs for property tests.
struct SpecGenerator {
  std::mt19937_64 rng;

  explicit SpecGenerator(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  struct Draw {
    BarrierSpec spec;
    double e;
  };

  Draw operator()() {
    Draw d;
    d.spec.v_r = uniform(0.5, 20.0);
    d.spec.v_i = uniform(0.0, 20.0);
    d.spec.v_c = uniform(0.0, 15.0);
    d.spec.delta = uniform(-5.0, 5.0);
    d.spec.a1 = uniform(0.0, 3.0);
    d.spec.a2 = d.spec.a1 + uniform(0.01, 5.0);
    d.e = d.spec.v_r * uniform(1e-3, 0.999);
    return d;
  }
};

}  // namespace hfarray::test
