#pragma once

// Single complex square barrier realized as an elastic channel evanescently
// coupled to an absorptive (delta > 0) or emissive (delta < 0) inelastic
// channel. Units: hbar = 1 and 2m = 1 throughout, so E = k^2.

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>

#include "hfarray/error.hpp"

namespace hfarray {

using complex = std::complex<double>;

namespace units {
inline constexpr double hbar = 1.0;
inline constexpr double mass = 0.5;
}  // namespace units

/// |d| below this (scaled by 1 + v_c) is treated as the degenerate d = 0 point.
inline constexpr double degenerate_d_tolerance = 1e-12;
/// Largest |alpha| b or |beta| b accepted before sinh/cosh leave double range.
inline constexpr double hyperbolic_cap = 300.0;

struct BarrierSpec {
  double v_r = 0.0;    // real barrier height
  double v_i = 0.0;    // inelastic-channel potential
  double v_c = 0.0;    // elastic/inelastic coupling, >= 0
  double delta = 0.0;  // inelastic energy shift, signed
  double a1 = 0.0;
  double a2 = 0.0;

  double width() const noexcept { return a2 - a1; }
};

inline std::string describe(const BarrierSpec& s) {
  std::ostringstream os;
  os.precision(17);
  os << "{v_r=" << s.v_r << ", v_i=" << s.v_i << ", v_c=" << s.v_c << ", delta=" << s.delta
     << ", a1=" << s.a1 << ", a2=" << s.a2 << "}";
  return os.str();
}

/// Rejects non-finite fields, negative coupling and a2 < a1. A zero-width
/// barrier is valid and scatters as the identity.
inline void validate(const BarrierSpec& s) {
  for (double v : {s.v_r, s.v_i, s.v_c, s.delta, s.a1, s.a2}) {
    if (!std::isfinite(v)) throw error(errc::invalid_spec, "non-finite field in " + describe(s));
  }
  if (s.v_c < 0.0) throw error(errc::invalid_spec, "negative coupling v_c in " + describe(s));
  if (s.a2 < s.a1) throw error(errc::invalid_spec, "a2 < a1 in " + describe(s));
}

template <class Real, class Complex = std::complex<Real>>
struct BasicKinematics {
  Real k{};                          // sqrt(E)
  Complex k_prime{};                 // sqrt(E - delta), principal branch
  Complex alpha_sq{};
  Complex beta_sq{};
  Complex alpha{};
  Complex beta{};
  Real theta{};                      // in (-pi/2, pi/2]
  Real d{};                          // (v_r - v_i - delta) / 2
  Real d_sec{};                      // d sec(theta)
  bool degenerate_d = false;
};

using ChannelKinematics = BasicKinematics<double>;

namespace detail {

template <class Real, class Complex = std::complex<Real>>
Complex principal_sqrt(Real x) {
  using std::sqrt;
  return sqrt(Complex(x, Real(0)));
}

template <class Real, class Complex = std::complex<Real>>
BasicKinematics<Real, Complex> kinematics(const BarrierSpec& spec, double e) {
  using std::atan;
  using std::copysign;
  using std::hypot;
  using std::sqrt;

  if (!(e > 0.0)) {
    std::ostringstream os;
    os << "energy " << e << " must be positive";
    throw error(errc::non_positive_energy, os.str());
  }
  validate(spec);

  const Real energy = e;
  const Real v_r = spec.v_r;
  const Real v_c = spec.v_c;

  BasicKinematics<Real, Complex> kin;
  kin.k = sqrt(energy);
  kin.k_prime = principal_sqrt<Real, Complex>(energy - Real(spec.delta));
  kin.d = (v_r - Real(spec.v_i) - Real(spec.delta)) / 2;

  // d (sec(theta) - 1); theta = atan(v_c / d) on the principal branch so that
  // theta -> 0 as v_c -> 0 for either sign of d.
  Real shift;
  if (std::abs(spec.v_r - spec.v_i - spec.delta) / 2 <
      degenerate_d_tolerance * (1.0 + std::abs(spec.v_c))) {
    kin.degenerate_d = true;
    kin.theta = v_c > 0 ? boost::math::constants::half_pi<Real>() : Real(0);
    kin.d_sec = v_c;
    shift = v_c;
  } else {
    kin.theta = atan(v_c / kin.d);
    kin.d_sec = copysign(hypot(kin.d, v_c), kin.d);
    shift = kin.d_sec - kin.d;
  }

  kin.alpha_sq = Complex(v_r - energy + shift, Real(0));
  kin.beta_sq = Complex(v_r - energy - shift, Real(0));
  kin.alpha = sqrt(kin.alpha_sq);
  kin.beta = sqrt(kin.beta_sq);
  return kin;
}

}  // namespace detail

/// Wavenumbers, interior decay constants and mixing angle at energy e.
/// Note alpha^2 + beta^2 = 2 (v_r - E) for these interior constants.
inline ChannelKinematics channel_kinematics(const BarrierSpec& spec, double e) {
  return detail::kinematics<double>(spec, e);
}

/// 2x2 elastic-channel transfer matrix: (P, Q) = M (A, D).
struct TransferMatrix2 {
  complex m11{1.0, 0.0};
  complex m12{0.0, 0.0};
  complex m21{0.0, 0.0};
  complex m22{1.0, 0.0};

  static TransferMatrix2 identity() noexcept { return {}; }

  complex det() const noexcept { return m11 * m22 - m12 * m21; }

  /// Largest element modulus.
  double max_abs() const noexcept {
    return std::max(std::max(std::abs(m11), std::abs(m12)), std::max(std::abs(m21), std::abs(m22)));
  }

  friend TransferMatrix2 operator*(const TransferMatrix2& l, const TransferMatrix2& r) noexcept {
    return {l.m11 * r.m11 + l.m12 * r.m21, l.m11 * r.m12 + l.m12 * r.m22,
            l.m21 * r.m11 + l.m22 * r.m21, l.m21 * r.m12 + l.m22 * r.m22};
  }
};

/// max |a_ij - b_ij| / max(|b_ij|).
inline double relative_deviation(const TransferMatrix2& a, const TransferMatrix2& b) {
  const double scale = b.max_abs();
  const double diff = std::max(std::max(std::abs(a.m11 - b.m11), std::abs(a.m12 - b.m12)),
                               std::max(std::abs(a.m21 - b.m21), std::abs(a.m22 - b.m22)));
  return scale > 0 ? diff / scale : diff;
}

/// |det M - 1| scaled by the size of the products that cancel in det M.
inline double det_deviation(const TransferMatrix2& m) {
  const double scale =
      std::max({1.0, std::abs(m.m11 * m.m22), std::abs(m.m12 * m.m21)});
  return std::abs(m.det() - 1.0) / scale;
}

namespace detail {

template <class Complex>
struct ClosedForm {
  Complex m11, m12, m21, m22;
  double error_estimate = 0.0;  // relative, from det M = 1 and term cancellation
};

template <class Complex, class Real>
double cancellation(const Complex& direct, const Complex& correction) {
  using std::abs;
  const Real sum = abs(direct + correction);
  const Real parts = abs(direct) + abs(correction);
  return sum > 0 ? static_cast<double>(parts / sum) : std::numeric_limits<double>::infinity();
}

// The closed-form elements in working precision Real. The caller has already
// rejected zero widths, vanishing decay constants and oversized arguments.
template <class Real, class C>
ClosedForm<C> closed_form(const BarrierSpec& spec, double e) {
  using std::abs;
  using std::conj;
  using std::cos;
  using std::cosh;
  using std::exp;
  using std::sin;
  using std::sinh;

  const auto kin = kinematics<Real, C>(spec, e);
  const Real a1 = spec.a1;
  const Real a2 = spec.a2;
  const Real b = a2 - a1;

  const C i(Real(0), Real(1));
  const Real k = kin.k;
  const C kp = kin.k_prime;
  const C al = kin.alpha;
  const C be = kin.beta;

  const C v = Real(2) * sinh(al * b);
  const C w = Real(2) * cosh(al * b);
  const C y = Real(2) * cosh(be * b);
  const C z = Real(2) * sinh(be * b);

  const Real half = kin.theta / 2;
  const Real c2 = cos(half) * cos(half);
  const Real s2 = sin(half) * sin(half);
  const Real st2 = sin(kin.theta) * sin(kin.theta);

  const C k2(k * k, Real(0));
  const C al2 = al * al;
  const C be2 = be * be;
  const C wy = w - y;

  const C den_a = Real(4) * be * (kp * kp * v + Real(2) * i * kp * w * al - v * al2) * c2;
  const C den_b = Real(4) * al * (kp * kp * z + Real(2) * i * kp * y * be - z * be2) * s2;
  const C den = den_a + den_b;
  const C pre = Real(1) / (Real(4) * k * al * be);

  // Off-diagonal coupling numerators (shared by M12 and M21).
  const C off_u = kp * (z * al - v * be) - i * wy * al * be;
  const C off_v = v * al - z * be - i * kp * wy;
  const C off = k2 * off_u * off_u - al2 * be2 * off_v * off_v;

  const C d11 = al * (i * k2 * z + Real(2) * k * y * be - i * z * be2) * c2 +
                be * (i * k2 * v + Real(2) * k * w * al - i * v * al2) * s2;
  const C d12 = -i * z * al * (k2 + be2) * c2 - i * v * be * (k2 + al2) * s2;
  const C d21 = -d12;
  const C d22 = al * (-i * k2 * z + Real(2) * k * y * be + i * z * be2) * c2 +
                be * (-i * k2 * v + Real(2) * k * w * al + i * v * al2) * s2;

  // The sin^2(theta) terms vanish for uncoupled channels; skip them so that a
  // vanishing denominator cannot produce 0/0.
  C x11(Real(0), Real(0)), x12 = x11, x21 = x11, x22 = x11;
  double den_ratio = 1.0;
  if (st2 != 0) {
    const C t11 = k * kp * z * al - (k * kp * v + i * (k - kp) * wy * al + v * al2) * be + z * al * be2;
    const C t22 = k * kp * z * al + (-k * kp * v - i * (k + kp) * wy * al + v * al2) * be - z * al * be2;
    x11 = -i * t11 * t11 * st2 / den;
    x12 = i * off * st2 / den;
    x21 = -x12;
    x22 = i * t22 * t22 * st2 / den;
    den_ratio = cancellation<C, Real>(den_a, den_b);
  }

  const C ph_diff = exp(i * (a1 - a2) * k);  // e^{i(a1-a2)k}
  const C ph_sum = exp(-i * (a1 + a2) * k);  // e^{-i(a1+a2)k}

  ClosedForm<C> out;
  out.m11 = ph_diff * pre * (d11 + x11);
  out.m12 = ph_sum * pre * (d12 + x12);
  out.m21 = conj(ph_sum) * pre * (d21 + x21);
  out.m22 = conj(ph_diff) * pre * (d22 + x22);

  const double ratio = std::max({cancellation<C, Real>(d11, x11), cancellation<C, Real>(d12, x12),
                                 cancellation<C, Real>(d21, x21), cancellation<C, Real>(d22, x22)});
  const double eps = static_cast<double>(std::numeric_limits<Real>::epsilon());
  const C p = out.m11 * out.m22;
  const C q = out.m12 * out.m21;
  const Real scale = std::max({Real(1), Real(abs(p)), Real(abs(q))});
  const double det_dev = static_cast<double>(Real(abs(p - q - Real(1))) / scale);
  out.error_estimate = std::max(det_dev, eps * ratio * den_ratio);
  return out;
}

template <class C>
TransferMatrix2 narrow(const ClosedForm<C>& f) {
  auto cast = [](const C& x) { return complex(static_cast<double>(x.real()), static_cast<double>(x.imag())); };
  return {cast(f.m11), cast(f.m12), cast(f.m21), cast(f.m22)};
}

}  // namespace detail

/// Estimated relative error above which a closed-form evaluation is redone
/// in the next wider precision.
inline constexpr double closed_form_tolerance = 1e-14;

/// Closed-form transfer matrix of one coupled two-channel barrier.
///
/// The four elements are evaluated from the closed-form expressions in the
/// shorthand v = 2 sinh(alpha b), w = 2 cosh(alpha b), y = 2 cosh(beta b),
/// z = 2 sinh(beta b), with the absolute-position phases e^{+-i(a1 +- a2)k}.
/// M21 is taken as M12 with k -> -k, the symmetry that also maps M11 onto M22.
///
/// When one mode is opaque and the other is not, the sin^2(theta) terms
/// cancel the direct terms to about e^{|alpha| b} relative. Evaluation starts
/// in long double and moves to 50 and then 100 digits while the estimated
/// error stays above closed_form_tolerance.
inline TransferMatrix2 barrier_transfer_matrix(const BarrierSpec& spec, double e) {
  namespace mp = boost::multiprecision;
  const auto kin = detail::kinematics<double>(spec, e);
  const double b = spec.width();
  if (b == 0.0) return TransferMatrix2::identity();

  if (std::abs(kin.alpha) * b > hyperbolic_cap || std::abs(kin.beta) * b > hyperbolic_cap) {
    std::ostringstream os;
    os << "hyperbolic argument exceeds " << hyperbolic_cap << " for " << describe(spec) << " at E=" << e;
    throw error(errc::numerical_overflow, os.str());
  }
  if (std::abs(kin.alpha) == 0 || std::abs(kin.beta) == 0) {
    std::ostringstream os;
    os << "decay constant vanishes for " << describe(spec) << " at E=" << e;
    throw error(errc::numerical_overflow, os.str());
  }

  const auto fast = detail::closed_form<long double, std::complex<long double>>(spec, e);
  if (fast.error_estimate <= closed_form_tolerance) return detail::narrow(fast);
  const auto wide = detail::closed_form<mp::cpp_bin_float_50, mp::cpp_complex_50>(spec, e);
  if (wide.error_estimate <= closed_form_tolerance) return detail::narrow(wide);
  const auto widest = detail::closed_form<mp::cpp_bin_float_100, mp::cpp_complex_100>(spec, e);
  if (widest.error_estimate <= closed_form_tolerance) return detail::narrow(widest);

  std::ostringstream os;
  os << "closed form cancels beyond 100-digit precision (estimated error " << widest.error_estimate << ") for "
     << describe(spec) << " at E=" << e;
  throw error(errc::numerical_overflow, os.str());
}

namespace detail {

// sinh(q b) / q with the q -> 0 limit.
inline complex sinh_over(complex q, double b) {
  return std::abs(q) == 0.0 ? complex(b, 0.0) : std::sinh(q * b) / q;
}

inline void require_uncoupled(const BarrierSpec& spec) {
  if (spec.v_c != 0.0) throw error(errc::coupling_not_zero, "v_c must be 0 in " + describe(spec));
}

}  // namespace detail

/// Closed-form M22 of the uncoupled (real) barrier:
/// e^{ibk} [2kq cosh(qb) - i(2E - v_r) sinh(qb)] / (2kq), q = sqrt(v_r - E).
inline complex vc_zero_m22(const BarrierSpec& spec, double e) {
  detail::require_uncoupled(spec);
  if (!(e > 0.0)) throw error(errc::non_positive_energy, "energy must be positive");
  validate(spec);
  const double b = spec.width();
  if (b == 0.0) return {1.0, 0.0};
  const double k = std::sqrt(e);
  const complex q = detail::principal_sqrt(spec.v_r - e);
  const complex i(0.0, 1.0);
  return std::exp(i * (b * k)) *
         (std::cosh(q * b) - i * (2.0 * e - spec.v_r) * detail::sinh_over(q, b) / (2.0 * k));
}

/// Full transfer matrix of the uncoupled barrier. M22 is vc_zero_m22; the
/// other elements follow from the k -> -k symmetry and k^2 + q^2 = v_r.
inline TransferMatrix2 vc_zero_transfer_matrix(const BarrierSpec& spec, double e) {
  const complex m22 = vc_zero_m22(spec, e);
  const double b = spec.width();
  if (b == 0.0) return TransferMatrix2::identity();
  const double k = std::sqrt(e);
  const complex q = detail::principal_sqrt(spec.v_r - e);
  const complex i(0.0, 1.0);
  const complex s = detail::sinh_over(q, b);
  const complex m11 =
      std::exp(-i * (b * k)) * (std::cosh(q * b) + i * (2.0 * e - spec.v_r) * s / (2.0 * k));
  const complex m12 = -i * std::exp(-i * ((spec.a1 + spec.a2) * k)) * spec.v_r * s / (2.0 * k);
  const complex m21 = i * std::exp(i * ((spec.a1 + spec.a2) * k)) * spec.v_r * s / (2.0 * k);
  return {m11, m12, m21, m22};
}

}  // namespace hfarray
