#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "vasc/rcr.hpp"

using namespace vasc;

namespace {
const RcrParameters kRef{0.1, 2.0, 0.9}; // tau = 1.8
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((RcrParameters{-0.1, 1.0, 1.0}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((RcrParameters{0.1, 0.0, 1.0}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((RcrParameters{0.1, 1.0, -1.0}.validate()),
                  std::invalid_argument);
  CHECK_NOTHROW(kRef.validate());
  CHECK(kRef.time_constant() == doctest::Approx(1.8));
}

TEST_CASE("step response closed form") {
  // P(t) = P_inf + (P0 - P_inf) exp(-t/tau), P_inf = q (Rp + Rd)
  const double q = 2.0;
  const double p_inf = q * (kRef.r_proximal + kRef.r_distal);
  CHECK(step_response(kRef, q, 0.0, 0.0) == doctest::Approx(0.0));
  CHECK(step_response(kRef, q, 0.0, 1e9) == doctest::Approx(p_inf));
  const double t = 0.7;
  const double expect = p_inf + (5.0 - p_inf) * std::exp(-t / 1.8);
  CHECK(step_response(kRef, q, 5.0, t) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("semianalytic solution matches step response for constant inflow") {
  const double q = 1.3;
  const auto inflow = PeriodicWaveform::constant(1.0, q);
  const double dt = 1e-3;
  const double p0 = 2.0;
  const auto series = rcr_pressure_semianalytic(kRef, inflow, p0, 5.0, dt);
  REQUIRE(series.size() == 5001);
  // the running trapezoidal convolution is 2nd order: tolerance ~ dt^2
  for (std::size_t k = 0; k < series.size(); k += 250) {
    const double t = static_cast<double>(k) * dt;
    CHECK(series[k] ==
          doctest::Approx(step_response(kRef, q, p0, t)).epsilon(1e-5));
  }
}

TEST_CASE("semianalytic solution converges at 2nd order on pulsatile inflow") {
  const auto inflow = testing::make_pulsatile_inflow(0.8, 1.0);
  auto end_value = [&](double dt) {
    const auto s = rcr_pressure_semianalytic(kRef, inflow, 0.0, 4.0, dt);
    return s.back();
  };
  const double ref = end_value(0.8 / 51200);
  const double e1 = std::abs(end_value(0.8 / 400) - ref);
  const double e2 = std::abs(end_value(0.8 / 800) - ref);
  CHECK(e1 / e2 > 3.0); // ~4 for a 2nd-order scheme
}

TEST_CASE("mean over cycle is the trapezoid of the window") {
  // series = t on [0, 2.0], dt = 0.5, period 1.0
  const std::vector<double> series{0.0, 0.5, 1.0, 1.5, 2.0};
  CHECK(mean_over_cycle(series, 0.5, 1.0, 0) == doctest::Approx(0.5));
  CHECK(mean_over_cycle(series, 0.5, 1.0, 1) == doctest::Approx(1.5));
  CHECK_THROWS_AS(mean_over_cycle(series, 0.5, 1.0, 2), std::out_of_range);
  CHECK_THROWS_AS(mean_over_cycle(series, 0.3, 1.0, 0), std::invalid_argument);
}

TEST_CASE("mean-pressure recursion and error definitions") {
  const double p0 = 20.0;
  const double pinf = 100.0;
  const double tau_over_T = 2.0;
  CHECK(mean_pressure_recursion(p0, pinf, tau_over_T, 0) == doctest::Approx(p0));
  const double p3 = pinf + std::exp(-3.0 / 2.0) * (p0 - pinf);
  CHECK(mean_pressure_recursion(p0, pinf, tau_over_T, 3) ==
        doctest::Approx(p3).epsilon(1e-15));

  CHECK(asymptotic_error(p3, pinf) ==
        doctest::Approx(std::exp(-1.5) * 0.8).epsilon(1e-14));
  const double p2 = mean_pressure_recursion(p0, pinf, tau_over_T, 2);
  CHECK(cyclic_error(p2, p3, pinf) ==
        doctest::Approx(std::abs(p3 - p2) / pinf).epsilon(1e-14));
}

TEST_CASE("cycle-count predictions") {
  // n = ceil((tau/T) ln(|1 - P0/Pinf| / eps))
  CHECK(cycles_to_convergence_zero_ic(2.0, 0.01) == 10);  // ceil(9.2103)
  CHECK(cycles_to_convergence_zero_ic(0.3, 0.01) == 2);   // ceil(1.3816)
  CHECK(cycles_to_convergence_zero_ic(4.4, 0.01) == 21);  // ceil(20.2627)
  CHECK(cycles_to_convergence_zero_ic(4.4, 1.0) == 0);
  CHECK(cycles_to_convergence(4.4, 0.01, 0.0) == 21);
  CHECK(cycles_to_convergence(4.4, 0.01, 1.0) == 0); // already periodic
  CHECK(cycles_to_convergence(4.4, 0.01, 0.995) == 0); // gap below tolerance
  // starting beyond the target works the same: |1 - 1.5| = 0.5
  CHECK(cycles_to_convergence(2.0, 0.01, 1.5) ==
        static_cast<int>(std::ceil(2.0 * std::log(0.5 / 0.01))));
}

TEST_CASE("error ratio alpha") {
  CHECK(error_ratio_alpha(4.4) == doctest::Approx(3.9189231093907297).epsilon(1e-12));
  CHECK(std::abs(error_ratio_alpha(1.0 / std::numbers::ln2) - 1.0) < 1e-12);
  // below the threshold the cyclic error overstates the asymptotic error
  CHECK(error_ratio_alpha(1.0) < 1.0);
  CHECK(error_ratio_alpha(2.0) > 1.0);
}

TEST_CASE("alpha links cyclic and asymptotic errors exactly") {
  const double p0 = 0.0;
  const double pinf = 75.0;
  for (double tau_over_T : {1.0, 2.0, 4.4}) {
    const double alpha = error_ratio_alpha(tau_over_T);
    for (int n = 2; n <= 20; ++n) {
      const double pn = mean_pressure_recursion(p0, pinf, tau_over_T, n);
      const double pm = mean_pressure_recursion(p0, pinf, tau_over_T, n - 1);
      const double eps_inf = asymptotic_error(pn, pinf);
      const double eps_cyc = cyclic_error(pm, pn, pinf);
      CHECK(alpha * eps_cyc == doctest::Approx(eps_inf).epsilon(1e-12));
    }
  }
}
