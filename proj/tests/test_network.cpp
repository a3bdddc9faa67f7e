#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "vasc/network.hpp"
#include "vasc/rcr.hpp"

using namespace vasc;

TEST_CASE("network validation") {
  const auto inflow = PeriodicWaveform::constant(1.0, 1.0);
  RcrParameters p{0.1, 1.0, 1.0};

  SUBCASE("valid network passes") {
    CHECK_NOTHROW(testing::make_rcr_network(p, inflow).validate());
  }
  SUBCASE("negative element value") {
    auto net = testing::make_rcr_network(p, inflow);
    net.elements[0].value = -1.0;
    CHECK_THROWS_AS(net.validate(), std::invalid_argument);
  }
  SUBCASE("self-loop element") {
    auto net = testing::make_rcr_network(p, inflow);
    net.elements[0].node_to = 0;
    CHECK_THROWS_AS(net.validate(), std::invalid_argument);
  }
  SUBCASE("no ground") {
    auto net = testing::make_rcr_network(p, inflow);
    net.grounds.clear();
    CHECK_THROWS_AS(net.validate(), std::invalid_argument);
  }
  SUBCASE("disconnected node") {
    auto net = testing::make_rcr_network(p, inflow);
    net.node_count = 4;
    CHECK_THROWS_AS(net.validate(), std::invalid_argument);
  }
}

TEST_CASE("rk4 settles to the resistive pressure for constant inflow") {
  const RcrParameters p{0.2, 0.5, 1.1}; // tau = 0.55
  const double q = 1.7;
  const auto inflow = PeriodicWaveform::constant(1.0, q);
  const auto trace = simulate_rcr_rk4(p, inflow, 0.0, 1e-3, 12);
  const double p_inf = q * (p.r_proximal + p.r_distal);
  CHECK(trace.node_pressure[0].back() == doctest::Approx(p_inf).epsilon(1e-9));
  CHECK(trace.element_flow[0].back() == doctest::Approx(q));
  CHECK(trace.time.size() == 12001);
}

TEST_CASE("rk4 converges at 4th order against the exact exponential") {
  const RcrParameters p{0.1, 2.0, 0.9};
  const double q = 1.0;
  const auto inflow = PeriodicWaveform::constant(1.0, q);
  auto end_error = [&](double dt) {
    const auto trace = simulate_rcr_rk4(p, inflow, 3.0, dt, 2);
    return std::abs(trace.node_pressure[0].back() - step_response(p, q, 3.0, 2.0));
  };
  const double e1 = end_error(1.0 / 10);
  const double e2 = end_error(1.0 / 20);
  const double order = std::log2(e1 / e2);
  CHECK(order > 3.7);
}

TEST_CASE("generalized-alpha matches the semianalytic RCR solution") {
  std::mt19937 rng(7101);
  const double period = 0.9;
  const auto inflow = testing::make_pulsatile_inflow(period, 1.2);
  const auto params = testing::make_random_rcr(rng, 1.5 * period);
  const auto net = testing::make_rcr_network(params, inflow);
  const double dt = period / 1000;
  const int cycles = 5;

  const double p_init = 10.0;
  NetworkSimOptions options;
  // the capacitor node carries the differential state; the inlet pressure is
  // algebraic, P_in = P_mid + Rp Q, so P_in(0+) = p_init requires:
  options.initial_pressures = {p_init, p_init - params.r_proximal * inflow.value(0.0),
                               0.0};
  const auto trace = simulate_network(net, dt, cycles, options);
  const auto exact = rcr_pressure_semianalytic(params, inflow, p_init,
                                               cycles * period, dt);
  REQUIRE(trace.node_pressure[0].size() == exact.size());
  double scale = 0.0;
  for (double v : exact) scale = std::max(scale, std::abs(v));
  double err = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k)
    err = std::max(err, std::abs(trace.node_pressure[0][k] - exact[k]) / scale);
  CHECK(err < 1e-3);
}

TEST_CASE("diode switches between resistive branches") {
  // inflow -> node0, R1 0->1; from node1: diode 1->2 then R2 2->3(gnd),
  // and a bleed resistor R3 1->3. Pure resistive network: each step is
  // algebraic, so the active-set solution must match hand algebra.
  const double r1 = 0.3;
  const double r2 = 1.0;
  const double r3 = 5.0;
  LumpedNetwork net;
  net.node_count = 4;
  net.elements.push_back({ElementKind::resistor, r1, 0, 1});
  net.elements.push_back({ElementKind::diode, 0.0, 1, 2});
  net.elements.push_back({ElementKind::resistor, r2, 2, 3});
  net.elements.push_back({ElementKind::resistor, r3, 1, 3});
  // sinusoid crossing zero: open for q > 0, closed for q < 0
  PeriodicWaveform inflow(1.0, [] {
    std::vector<std::pair<double, double>> s;
    for (int k = 0; k < 64; ++k) {
      const double t = k / 64.0;
      s.emplace_back(t, std::sin(2.0 * std::numbers::pi * t));
    }
    return s;
  }());
  net.inflows.push_back({0, inflow});
  net.grounds.push_back({3, 0.0});

  const double dt = 1.0 / 64.0; // knots on the grid: q is exact per step
  const auto trace = simulate_network(net, dt, 1);
  for (std::size_t k = 1; k < trace.time.size(); ++k) {
    const double q = inflow.value(trace.time[k]);
    const double p1_expect =
        q > 0.0 ? q / (1.0 / r3 + 1.0 / r2) : q * r3;
    CHECK(trace.node_pressure[1][k] == doctest::Approx(p1_expect).epsilon(1e-8));
    const double q_diode = q > 0.0 ? p1_expect / r2 : 0.0;
    CHECK(trace.element_flow[1][k] == doctest::Approx(q_diode).epsilon(1e-8));
  }
}

TEST_CASE("steady-state pressures of an RCR") {
  const RcrParameters p{0.4, 2.0, 1.6};
  const auto inflow = testing::make_pulsatile_inflow(1.0, 2.0);
  const auto net = testing::make_rcr_network(p, inflow);
  const auto pressures = steady_state_pressures(net);
  const double q_bar = inflow.mean();
  REQUIRE(pressures.size() == 3);
  CHECK(pressures[0] == doctest::Approx(q_bar * (p.r_proximal + p.r_distal)));
  CHECK(pressures[1] == doctest::Approx(q_bar * p.r_distal));
  CHECK(pressures[2] == doctest::Approx(0.0));
}

TEST_CASE("run_rcr_to_periodic reaches the limit cycle") {
  const double period = 1.0;
  const auto inflow = testing::make_pulsatile_inflow(period, 1.0);
  const RcrParameters p{0.1, 0.2, 1.0}; // tau/T = 0.2
  PeriodicRunOptions options;
  options.epsilon = 1e-10;
  const auto result = run_rcr_to_periodic(p, inflow, period / 500, options);
  CHECK(result.converged);
  CHECK(result.cycles_used >= 3);
  CHECK(result.cycles_used <= 8);
  // the periodic cycle mean is exactly q_bar (Rp + Rd)
  const double p_inf = inflow.mean() * (p.r_proximal + p.r_distal);
  CHECK(result.cycle_mean[0] == doctest::Approx(p_inf).epsilon(1e-6));

  // restarting from the periodic state converges within the first cycle
  PeriodicRunOptions warm = options;
  warm.p_initial = result.pressure_cycles[0].value(0.0);
  const auto again = run_rcr_to_periodic(p, inflow, period / 500, warm);
  CHECK(again.converged);
  CHECK(again.cycles_used == 1);
}

TEST_CASE("run_network_to_periodic agrees with the RCR variant") {
  const double period = 0.8;
  const auto inflow = testing::make_pulsatile_inflow(period, 1.5);
  const RcrParameters p{0.15, 0.4, 1.2};
  const auto net = testing::make_rcr_network(p, inflow);
  PeriodicRunOptions options;
  options.epsilon = 1e-9;
  const auto result = run_network_to_periodic(net, period / 500, options);
  CHECK(result.converged);
  const double p_inf = inflow.mean() * (p.r_proximal + p.r_distal);
  CHECK(result.cycle_mean[0] == doctest::Approx(p_inf).epsilon(1e-5));
}

TEST_CASE("detect_single_rcr") {
  const auto inflow = PeriodicWaveform::constant(1.0, 1.0);
  const RcrParameters p{0.25, 1.5, 0.75};
  SUBCASE("positive case") {
    const auto detected = detect_single_rcr(testing::make_rcr_network(p, inflow));
    REQUIRE(detected.has_value());
    CHECK(detected->r_proximal == doctest::Approx(p.r_proximal));
    CHECK(detected->capacitance == doctest::Approx(p.capacitance));
    CHECK(detected->r_distal == doctest::Approx(p.r_distal));
  }
  SUBCASE("multi-outlet network is rejected") {
    const auto net = testing::make_multi_outlet_network({p, p}, inflow);
    CHECK_FALSE(detect_single_rcr(net).has_value());
  }
  SUBCASE("nonzero ground pressure is rejected") {
    auto net = testing::make_rcr_network(p, inflow);
    net.grounds[0].pressure = 5.0;
    CHECK_FALSE(detect_single_rcr(net).has_value());
  }
}
