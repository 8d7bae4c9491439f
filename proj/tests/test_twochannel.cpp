#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "hfarray/twochannel.hpp"
#include "support/oracles.hpp"

using namespace hfarray;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

BarrierSpec fig2_barrier(double v_c, double a1 = 0.0, double b = 0.2) {
  return {1.0, 1.0, v_c, 0.02, a1, a1 + b};
}

}  // namespace

TEST_CASE("uncoupled kinematics", "[twochannel]") {
  const auto kin = channel_kinematics(fig2_barrier(0.0), 0.5);
  CHECK(kin.theta == 0.0);
  CHECK_THAT(kin.alpha.real(), WithinRel(std::sqrt(0.5), 1e-15));
  CHECK_THAT(kin.beta.real(), WithinRel(std::sqrt(0.5), 1e-15));
  CHECK(kin.alpha.imag() == 0.0);
  CHECK_THAT(kin.k, WithinRel(std::sqrt(0.5), 1e-15));
  CHECK_THAT(kin.k_prime.real(), WithinRel(std::sqrt(0.48), 1e-15));
  CHECK(kin.k_prime.imag() == 0.0);
}

TEST_CASE("coupled kinematics against extended-precision d sec(theta)", "[twochannel]") {
  const auto kin = channel_kinematics(fig2_barrier(0.3), 0.5);
  CHECK_THAT(kin.d, WithinAbs(-0.01, 1e-15));
  const double d_sec = test::d_sec_theta(1.0, 1.0, 0.3, 0.02);
  CHECK_THAT(kin.d_sec, WithinRel(d_sec, 1e-14));
  CHECK_THAT(d_sec, WithinAbs(-0.30017, 5e-6));
  // 50-digit values of v_r - E +- (d sec(theta) - d).
  CHECK_THAT(kin.alpha_sq.real(), WithinRel(0.20983337960392732, 1e-13));
  CHECK_THAT(kin.beta_sq.real(), WithinRel(0.79016662039607268, 1e-13));
  CHECK_THAT(kin.alpha_sq.real() + kin.beta_sq.real(), WithinAbs(1.0, 1e-14));
}

TEST_CASE("alpha^2 + beta^2 = 2 (v_r - E) for random specs", "[twochannel][property]") {
  test::SpecGenerator gen(1);
  for (int j = 0; j < 1000; ++j) {
    const auto d = gen();
    const auto kin = channel_kinematics(d.spec, d.e);
    REQUIRE_THAT(std::abs(kin.alpha_sq + kin.beta_sq - 2.0 * (d.spec.v_r - d.e)), WithinAbs(0.0, 1e-13));
    REQUIRE(kin.theta > -std::numbers::pi / 2);
    REQUIRE(kin.theta <= std::numbers::pi / 2);
  }
}

TEST_CASE("theta vanishes with the coupling for either sign of d", "[twochannel]") {
  for (double v_i : {0.2, 3.0}) {  // d > 0 and d < 0
    const BarrierSpec spec{1.0, v_i, 1e-9, 0.02, 0.0, 0.5};
    CHECK(std::abs(channel_kinematics(spec, 0.5).theta) < 1e-8);
  }
}

TEST_CASE("inelastic wavenumber branch", "[twochannel]") {
  SECTION("open channel") {
    const auto kin = channel_kinematics({1.0, 1.0, 0.3, -3.6, 0.0, 0.2}, 0.1);
    CHECK(kin.k_prime.real() > 0.0);
    CHECK(kin.k_prime.imag() == 0.0);
  }
  SECTION("closed channel decays") {
    const auto kin = channel_kinematics({1.0, 1.0, 0.3, 3.6, 0.0, 0.2}, 0.1);
    CHECK(kin.k_prime.imag() > 0.0);
    CHECK_THAT(kin.k_prime.imag(), WithinRel(std::sqrt(3.5), 1e-14));
  }
}

TEST_CASE("kinematics errors", "[twochannel]") {
  CHECK_THROWS_AS(channel_kinematics(fig2_barrier(0.3), 0.0), error);
  try {
    channel_kinematics(fig2_barrier(0.3), -1.0);
  } catch (const error& err) {
    CHECK(err.code() == errc::non_positive_energy);
  }
  try {
    channel_kinematics(fig2_barrier(-0.1), 0.5);
    FAIL("negative coupling accepted");
  } catch (const error& err) {
    CHECK(err.code() == errc::invalid_spec);
  }
}

TEST_CASE("degenerate d is flagged and uses the +v_c limit", "[twochannel]") {
  const auto kin = channel_kinematics({1.0, 0.98, 0.4, 0.02, 0.0, 0.3}, 0.5);
  CHECK(kin.degenerate_d);
  CHECK_THAT(kin.theta, WithinAbs(std::numbers::pi / 2, 1e-15));
  CHECK_THAT(kin.alpha_sq.real(), WithinAbs(0.9, 1e-15));
  CHECK_THAT(kin.beta_sq.real(), WithinAbs(0.1, 1e-15));
  CHECK_FALSE(channel_kinematics(fig2_barrier(0.4), 0.5).degenerate_d);
}

TEST_CASE("zero-width barrier is the identity", "[twochannel]") {
  const TransferMatrix2 m = barrier_transfer_matrix({1.0, 1.0, 0.3, 0.02, 0.4, 0.4}, 0.5);
  CHECK(m.m11 == complex(1.0));
  CHECK(m.m22 == complex(1.0));
  CHECK(m.m12 == complex(0.0));
  CHECK(m.m21 == complex(0.0));
  CHECK(vc_zero_m22({1.0, 0.0, 0.0, 0.0, 0.4, 0.4}, 0.5) == complex(1.0));
}

TEST_CASE("uncoupled barrier reproduces the real-barrier amplitude", "[twochannel]") {
  const TransferMatrix2 m = barrier_transfer_matrix(fig2_barrier(0.0), 0.5);
  const complex t = 1.0 / m.m22;
  const complex direct = test::real_barrier_amplitude(1.0, 0.2, 0.5);
  CHECK_THAT(std::abs(t - direct), WithinAbs(0.0, 1e-14));
  // 50-digit evaluation of the same formula.
  CHECK_THAT(std::abs(t), WithinRel(0.99008266100739437, 1e-14));
  CHECK_THAT(std::arg(t), WithinRel(-0.14142135623730950, 1e-13));
  CHECK_THAT(std::abs(1.0 / vc_zero_m22(fig2_barrier(0.0), 0.5)), WithinRel(0.99008266100739437, 1e-14));
}

TEST_CASE("det M = 1 at the Fig. 2 coupling", "[twochannel]") {
  const TransferMatrix2 m = barrier_transfer_matrix(fig2_barrier(0.3), 0.5);
  CHECK_THAT(std::abs(m.det() - 1.0), WithinAbs(0.0, 1e-12));
}

TEST_CASE("det M = 1 for random specs", "[twochannel][property]") {
  test::SpecGenerator gen(2);
  for (int j = 0; j < 2000; ++j) {
    const auto d = gen();
    INFO(describe(d.spec) << " E=" << d.e);
    REQUIRE(det_deviation(barrier_transfer_matrix(d.spec, d.e)) <= 1e-12);
  }
}

TEST_CASE("opaque alpha mode with a propagating beta mode", "[twochannel]") {
  // |alpha| b ~ 24 with beta imaginary: the direct and sin^2(theta) terms
  // cancel to O(1), beyond what long double holds.
  const BarrierSpec spec{14.94993884797629, 15.478238270451337, 12.991037785020376, -0.57762080039629105,
                         2.9958557492112425, 7.9121578605859035};
  const double e = 3.74976;
  const auto kin = channel_kinematics(spec, e);
  REQUIRE(kin.beta.real() == 0.0);
  REQUIRE(kin.alpha.real() * spec.width() > 20.0);
  const auto fast = detail::closed_form<long double, std::complex<long double>>(spec, e);
  CHECK(fast.error_estimate > closed_form_tolerance);
  const TransferMatrix2 m = barrier_transfer_matrix(spec, e);
  CHECK(det_deviation(m) < 1e-13);
  CHECK(m.max_abs() < 10.0);
}

TEST_CASE("cancellation beyond 100 digits is refused", "[twochannel]") {
  // d = 0, so alpha^2 = 16 and beta^2 = -14; alpha b = 248.
  const BarrierSpec spec{20.0, 20.0, 15.0, 0.0, 0.0, 62.0};
  try {
    barrier_transfer_matrix(spec, 19.0);
    FAIL("hopeless cancellation accepted");
  } catch (const error& err) {
    CHECK(err.code() == errc::numerical_overflow);
  }
}

TEST_CASE("v_c = 0 matches the reduced real-barrier matrix", "[twochannel][property]") {
  test::SpecGenerator gen(3);
  for (int j = 0; j < 500; ++j) {
    auto d = gen();
    d.spec.v_c = 0.0;
    const TransferMatrix2 m = barrier_transfer_matrix(d.spec, d.e);
    INFO(describe(d.spec) << " E=" << d.e);
    REQUIRE(relative_deviation(m, vc_zero_transfer_matrix(d.spec, d.e)) <= 1e-10);
    REQUIRE(std::abs(m.m22 - vc_zero_m22(d.spec, d.e)) / std::abs(m.m22) <= 1e-10);
  }
}

TEST_CASE("vc_zero_m22 rejects coupled barriers", "[twochannel]") {
  try {
    vc_zero_m22(fig2_barrier(0.3), 0.5);
    FAIL("coupled barrier accepted");
  } catch (const error& err) {
    CHECK(err.code() == errc::coupling_not_zero);
  }
}

TEST_CASE("translation only moves the position phases", "[twochannel][property]") {
  test::SpecGenerator gen(4);
  for (int j = 0; j < 300; ++j) {
    const auto d = gen();
    const double s = gen.uniform(-2.0, 5.0);
    BarrierSpec moved = d.spec;
    moved.a1 += s;
    moved.a2 += s;
    const TransferMatrix2 m0 = barrier_transfer_matrix(d.spec, d.e);
    const TransferMatrix2 m1 = barrier_transfer_matrix(moved, d.e);
    const double scale = m0.max_abs();
    const complex ph = std::exp(complex(0.0, -2.0 * s * std::sqrt(d.e)));
    REQUIRE(std::abs(m1.m11 - m0.m11) / scale < 1e-9);
    REQUIRE(std::abs(m1.m22 - m0.m22) / scale < 1e-9);
    REQUIRE(std::abs(m1.m12 - m0.m12 * ph) / scale < 1e-9);
    REQUIRE(std::abs(m1.m21 - m0.m21 * std::conj(ph)) / scale < 1e-9);
  }
}

TEST_CASE("continuity across d = 0", "[twochannel]") {
  for (double v_c : {0.2, 1.0, 7.0}) {
    for (double e : {0.1, 0.5, 0.9}) {
      const TransferMatrix2 plus = barrier_transfer_matrix({1.0, 0.98 - 2e-8, v_c, 0.02, 0.0, 1.1}, e);
      const TransferMatrix2 minus = barrier_transfer_matrix({1.0, 0.98 + 2e-8, v_c, 0.02, 0.0, 1.1}, e);
      const TransferMatrix2 at = barrier_transfer_matrix({1.0, 0.98, v_c, 0.02, 0.0, 1.1}, e);
      CHECK(relative_deviation(plus, minus) < 1e-5);
      CHECK(relative_deviation(at, plus) < 1e-5);
    }
  }
}

TEST_CASE("above-barrier energies evaluate through complex arithmetic", "[twochannel]") {
  const BarrierSpec spec{1.0, 0.5, 0.3, 0.1, 0.0, 1.5};
  const TransferMatrix2 m = barrier_transfer_matrix(spec, 3.0);
  CHECK(std::isfinite(m.m22.real()));
  CHECK(det_deviation(m) < 1e-12);
}

TEST_CASE("opaque widths are rejected", "[twochannel]") {
  try {
    barrier_transfer_matrix({20.0, 1.0, 0.3, 0.02, 0.0, 100.0}, 0.5);
    FAIL("overflowing width accepted");
  } catch (const error& err) {
    CHECK(err.code() == errc::numerical_overflow);
  }
}
