#pragma once

// Brute-force check of the closed-form transfer matrix: the eight continuity
// conditions of the two channels at a1 and a2 are solved as a dense linear
// system, without using any of the closed-form M elements.
//
// Inside the barrier
//   psi = (B e^{ax} + C e^{-ax}) sin(t/2) + (F e^{bx} + G e^{-bx}) cos(t/2)
//   phi = (B e^{ax} + C e^{-ax}) cos(t/2) - (F e^{bx} + G e^{-bx}) sin(t/2)
// Outside: psi = A e^{ikx} + D e^{-ikx}, phi = R_inel e^{-ik'x} for x < a1 and
// psi = P e^{ikx} + Q e^{-ikx}, phi = T_inel e^{ik'x} for x > a2.
//
// The inelastic channel equation is taken with phi on its right-hand side,
// the form the interior wavefunctions above belong to. Derivative continuity
// of psi at a2 uses ik(P e^{ika2} - Q e^{-ika2}).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>

#include "hfarray/error.hpp"
#include "hfarray/twochannel.hpp"

namespace hfarray {

enum class Incidence { left, right };

struct BoundarySolution {
  complex a, d, p, q;       // elastic asymptotic amplitudes
  complex r_inel, t_inel;   // inelastic asymptotic amplitudes
  complex b_amp, c_amp, f_amp, g_amp;
  double rcond = 0.0;       // reciprocal condition estimate of the equilibrated system
};

/// Systems with a reciprocal condition estimate below this are rejected.
inline constexpr double oracle_min_rcond = 1e-14;

namespace detail {

struct Matching {
  complex k, kp, al, be, s, c;
};

inline Matching matching_constants(const BarrierSpec& spec, double e) {
  const ChannelKinematics kin = channel_kinematics(spec, e);
  return {complex(kin.k, 0.0), kin.k_prime, kin.alpha, kin.beta,
          complex(std::sin(kin.theta / 2), 0.0), complex(std::cos(kin.theta / 2), 0.0)};
}

}  // namespace detail

/// Solves the eight matching equations with the incident amplitude fixed to
/// one: A = 1, Q = 0 for left incidence and A = 0, Q = 1 for right incidence.
inline BoundarySolution solve_boundary_conditions(const BarrierSpec& spec, double e, Incidence incidence) {
  const auto m = detail::matching_constants(spec, e);
  const complex i(0.0, 1.0);
  const double a1 = spec.a1;
  const double a2 = spec.a2;
  const complex A = incidence == Incidence::left ? 1.0 : 0.0;
  const complex Q = incidence == Incidence::left ? 0.0 : 1.0;

  auto ex = [](complex x) { return std::exp(x); };
  const complex ea1 = ex(m.al * a1), ea1n = ex(-m.al * a1), ea2 = ex(m.al * a2), ea2n = ex(-m.al * a2);
  const complex eb1 = ex(m.be * a1), eb1n = ex(-m.be * a1), eb2 = ex(m.be * a2), eb2n = ex(-m.be * a2);
  const complex ek1 = ex(i * m.k * a1), ek1n = ex(-i * m.k * a1), ek2 = ex(i * m.k * a2), ek2n = ex(-i * m.k * a2);

  // Unknowns: D, P, B, C, F, G, R_inel, T_inel.
  using Mat = Eigen::Matrix<complex, 8, 8>;
  using Vec = Eigen::Matrix<complex, 8, 1>;
  Mat sys = Mat::Zero();
  Vec rhs = Vec::Zero();
  const complex al = m.al, be = m.be, s = m.s, c = m.c, k = m.k, kp = m.kp;

  // psi and psi' at a1
  sys.row(0) << ek1n, 0, -ea1 * s, -ea1n * s, -eb1 * c, -eb1n * c, 0, 0;
  rhs(0) = -A * ek1;
  sys.row(1) << -i * k * ek1n, 0, -al * ea1 * s, al * ea1n * s, -be * eb1 * c, be * eb1n * c, 0, 0;
  rhs(1) = -i * k * A * ek1;
  // psi and psi' at a2
  sys.row(2) << 0, ek2, -ea2 * s, -ea2n * s, -eb2 * c, -eb2n * c, 0, 0;
  rhs(2) = -Q * ek2n;
  sys.row(3) << 0, i * k * ek2, -al * ea2 * s, al * ea2n * s, -be * eb2 * c, be * eb2n * c, 0, 0;
  rhs(3) = i * k * Q * ek2n;
  // phi and phi' at a1
  sys.row(4) << 0, 0, -ea1 * c, -ea1n * c, eb1 * s, eb1n * s, ex(-i * kp * a1), 0;
  sys.row(5) << 0, 0, -al * ea1 * c, al * ea1n * c, be * eb1 * s, -be * eb1n * s, -i * kp * ex(-i * kp * a1), 0;
  // phi and phi' at a2
  sys.row(6) << 0, 0, -ea2 * c, -ea2n * c, eb2 * s, eb2n * s, 0, ex(i * kp * a2);
  sys.row(7) << 0, 0, -al * ea2 * c, al * ea2n * c, be * eb2 * s, -be * eb2n * s, 0, i * kp * ex(i * kp * a2);

  // Column equilibration: the interior unknowns multiply e^{+-alpha a}, which
  // differ by many orders of magnitude when the barrier is opaque.
  Eigen::Matrix<double, 8, 1> scale;
  for (int j = 0; j < 8; ++j) {
    scale(j) = sys.col(j).cwiseAbs().maxCoeff();
    if (!(scale(j) > 0.0) || !std::isfinite(scale(j))) scale(j) = 1.0;
    sys.col(j) /= scale(j);
  }

  const Eigen::PartialPivLU<Mat> lu(sys);
  const double rcond = lu.rcond();
  if (!(rcond >= oracle_min_rcond)) {
    std::ostringstream os;
    os << "boundary system condition estimate " << (rcond > 0 ? 1.0 / rcond : INFINITY) << " for "
       << describe(spec) << " at E=" << e;
    throw error(errc::singular_system, os.str());
  }
  Vec x = lu.solve(rhs);
  for (int j = 0; j < 8; ++j) x(j) /= scale(j);

  BoundarySolution sol;
  sol.a = A;
  sol.q = Q;
  sol.d = x(0);
  sol.p = x(1);
  sol.b_amp = x(2);
  sol.c_amp = x(3);
  sol.f_amp = x(4);
  sol.g_amp = x(5);
  sol.r_inel = x(6);
  sol.t_inel = x(7);
  sol.rcond = rcond;
  return sol;
}

/// Relative residual of each matching equation, evaluated from the
/// wavefunctions themselves: |lhs - rhs| / (largest term in the equation).
inline std::array<double, 8> boundary_residuals(const BarrierSpec& spec, double e, const BoundarySolution& sol) {
  const auto m = detail::matching_constants(spec, e);
  const complex i(0.0, 1.0);

  struct Terms {
    complex value;
    double largest;
  };
  auto sum = [](std::initializer_list<complex> terms) {
    Terms t{0.0, 0.0};
    for (const complex& x : terms) {
      t.value += x;
      t.largest = std::max(t.largest, std::abs(x));
    }
    return t;
  };
  // Interior mode pieces at x: alpha mode (B, C) and beta mode (F, G).
  auto alpha_mode = [&](double x, int deriv) {
    const complex up = sol.b_amp * std::exp(m.al * x);
    const complex down = sol.c_amp * std::exp(-m.al * x);
    return deriv == 0 ? std::array{up, down} : std::array{m.al * up, -m.al * down};
  };
  auto beta_mode = [&](double x, int deriv) {
    const complex up = sol.f_amp * std::exp(m.be * x);
    const complex down = sol.g_amp * std::exp(-m.be * x);
    return deriv == 0 ? std::array{up, down} : std::array{m.be * up, -m.be * down};
  };

  std::array<double, 8> res{};
  int row = 0;
  for (double x : {spec.a1, spec.a2}) {
    const bool left = x == spec.a1;
    const complex in = left ? sol.a : sol.p;
    const complex back = left ? sol.d : sol.q;
    for (int deriv = 0; deriv < 2; ++deriv) {
      const auto am = alpha_mode(x, deriv);
      const auto bm = beta_mode(x, deriv);
      const complex fwd = in * std::exp(i * m.k * x) * (deriv ? i * m.k : complex(1.0));
      const complex bwd = back * std::exp(-i * m.k * x) * (deriv ? -i * m.k : complex(1.0));
      const Terms t = sum({fwd, bwd, -am[0] * m.s, -am[1] * m.s, -bm[0] * m.c, -bm[1] * m.c});
      res[row++] = t.largest > 0 ? std::abs(t.value) / t.largest : 0.0;
    }
  }
  for (double x : {spec.a1, spec.a2}) {
    const bool left = x == spec.a1;
    for (int deriv = 0; deriv < 2; ++deriv) {
      const auto am = alpha_mode(x, deriv);
      const auto bm = beta_mode(x, deriv);
      const complex outer = left ? sol.r_inel * std::exp(-i * m.kp * x) * (deriv ? -i * m.kp : complex(1.0))
                                 : sol.t_inel * std::exp(i * m.kp * x) * (deriv ? i * m.kp : complex(1.0));
      const Terms t = sum({outer, -am[0] * m.c, -am[1] * m.c, bm[0] * m.s, bm[1] * m.s});
      res[row++] = t.largest > 0 ? std::abs(t.value) / t.largest : 0.0;
    }
  }
  return res;
}

/// Transfer matrix rebuilt from a left- and a right-incidence solve.
/// Left (A=1, Q=0): P = M11 + M12 D, 0 = M21 + M22 D.
/// Right (A=0, Q=1): P = M12 D, 1 = M22 D.
inline TransferMatrix2 oracle_transfer_matrix(const BarrierSpec& spec, double e) {
  if (spec.width() == 0.0) {
    validate(spec);
    return TransferMatrix2::identity();
  }
  const BoundarySolution l = solve_boundary_conditions(spec, e, Incidence::left);
  const BoundarySolution r = solve_boundary_conditions(spec, e, Incidence::right);
  TransferMatrix2 m;
  m.m22 = 1.0 / r.d;
  m.m12 = r.p / r.d;
  m.m21 = -m.m22 * l.d;
  m.m11 = l.p - m.m12 * l.d;
  return m;
}

}  // namespace hfarray
