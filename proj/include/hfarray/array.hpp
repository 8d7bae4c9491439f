#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "hfarray/error.hpp"
#include "hfarray/twochannel.hpp"

namespace hfarray {

/// Barrier j occupies [j (b + L), j (b + L) + b].
struct ArraySpec {
  std::vector<BarrierSpec> barriers;
  double b = 0.0;
  double l_gap = 0.0;

  std::size_t count() const noexcept { return barriers.size(); }

  /// Span of the whole array, n b + (n - 1) L.
  double span() const noexcept {
    const auto n = static_cast<double>(count());
    return n == 0 ? 0.0 : n * b + (n - 1) * l_gap;
  }
};

struct ScatteringAmplitudes {
  complex r_l;
  complex r_r;
  complex t_l;
  complex t_r;
};

struct ScatteringCoefficients {
  double t_coeff = 0.0;       // |t|^2, equal for both incidences
  double r_l_coeff = 0.0;     // |r_l|^2
  double r_r_coeff = 0.0;     // |r_r|^2
  double absorptivity = 0.0;  // 1 - R_l - T, left incidence
};

inline double barrier_left_edge(std::size_t j, double b, double l_gap) {
  return static_cast<double>(j) * (b + l_gap);
}

namespace detail {

inline void check_geometry(std::size_t n, double b, double l_gap) {
  if (n == 0 || !(b > 0.0) || !(l_gap >= 0.0) || !std::isfinite(b) || !std::isfinite(l_gap)) {
    std::ostringstream os;
    os << "need n >= 1, b > 0, L >= 0 (got n=" << n << ", b=" << b << ", L=" << l_gap << ")";
    throw error(errc::invalid_geometry, os.str());
  }
}

}  // namespace detail

/// Checks the lattice placement of every barrier and each barrier's own
/// validity. Per-barrier v_c or delta may vary.
inline void validate(const ArraySpec& arr) {
  detail::check_geometry(arr.count(), arr.b, arr.l_gap);
  const double tol = 1e-12 * (1.0 + arr.span());
  for (std::size_t j = 0; j < arr.count(); ++j) {
    const auto& s = arr.barriers[j];
    validate(s);
    const double a1 = barrier_left_edge(j, arr.b, arr.l_gap);
    if (std::abs(s.a1 - a1) > tol || std::abs(s.a2 - (a1 + arr.b)) > tol) {
      std::ostringstream os;
      os << "barrier " << j << " is off the placement lattice: " << describe(s);
      throw error(errc::invalid_geometry, os.str());
    }
  }
}

inline ArraySpec build_uniform_array(std::size_t n, double b, double l_gap, double v_r, double v_i,
                                     double v_c, double delta) {
  detail::check_geometry(n, b, l_gap);
  ArraySpec arr;
  arr.b = b;
  arr.l_gap = l_gap;
  arr.barriers.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a1 = barrier_left_edge(j, b, l_gap);
    arr.barriers.push_back({v_r, v_i, v_c, delta, a1, a1 + b});
  }
  validate(arr);
  return arr;
}

/// The leftmost n barriers of arr.
inline ArraySpec prefix(const ArraySpec& arr, std::size_t n) {
  if (n == 0 || n > arr.count()) {
    std::ostringstream os;
    os << "prefix length " << n << " outside [1, " << arr.count() << "]";
    throw error(errc::invalid_geometry, os.str());
  }
  ArraySpec out{{arr.barriers.begin(), arr.barriers.begin() + static_cast<std::ptrdiff_t>(n)},
                arr.b, arr.l_gap};
  return out;
}

/// M_tot = M_{n-1} ... M_1 M_0, each factor at its own a1, a2. Gaps need no
/// separate propagation factor: the absolute-position phases carry them.
inline TransferMatrix2 total_transfer_matrix(const ArraySpec& arr, double e) {
  validate(arr);
  TransferMatrix2 total = TransferMatrix2::identity();
  for (const auto& barrier : arr.barriers) total = barrier_transfer_matrix(barrier, e) * total;
  return total;
}

inline ScatteringAmplitudes scattering_amplitudes(const TransferMatrix2& m) {
  if (!(std::abs(m.m22) >= 1e-300)) throw error(errc::singular_m22, "|M22| vanishes (transmission pole)");
  return {m.m21 / m.m22, m.m12 / m.m22, m.det() / m.m22, 1.0 / m.m22};
}

/// T is taken from t_r = 1/M22: t_l = det/M22 carries the rounding of det M,
/// which grows with |M|^2 for opaque arrays, while det M = 1 makes them equal.
inline ScatteringCoefficients scattering_coefficients(const ScatteringAmplitudes& amps) {
  ScatteringCoefficients c;
  c.t_coeff = std::norm(amps.t_r);
  c.r_l_coeff = std::norm(amps.r_l);
  c.r_r_coeff = std::norm(amps.r_r);
  c.absorptivity = 1.0 - c.r_l_coeff - c.t_coeff;
  return c;
}

}  // namespace hfarray
