#include "vasc/rcr.hpp"

#include <cmath>
#include <stdexcept>

namespace vasc {

void RcrParameters::validate() const {
  if (!std::isfinite(r_proximal) || !std::isfinite(capacitance) ||
      !std::isfinite(r_distal))
    throw std::invalid_argument("RcrParameters: non-finite parameter");
  if (r_proximal < 0.0)
    throw std::invalid_argument("RcrParameters: r_proximal must be >= 0");
  if (!(capacitance > 0.0))
    throw std::invalid_argument("RcrParameters: capacitance must be > 0");
  if (!(r_distal > 0.0))
    throw std::invalid_argument("RcrParameters: r_distal must be > 0");
}

std::vector<double> rcr_pressure_semianalytic(const RcrParameters& params,
                                              const PeriodicWaveform& inflow,
                                              double p_initial, double t_end,
                                              double dt) {
  params.validate();
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("rcr_pressure_semianalytic: dt must be > 0");
  if (t_end < dt)
    throw std::invalid_argument("rcr_pressure_semianalytic: t_end must be >= dt");

  const double tau = params.time_constant();
  const double decay = std::exp(-dt / tau);
  const std::size_t n_steps = static_cast<std::size_t>(std::llround(t_end / dt));

  std::vector<double> pressure(n_steps + 1);
  const double q0 = inflow.value(0.0);
  pressure[0] = p_initial;

  // running convolution: conv_k = int_0^{t_k} exp(-(t_k-s)/tau) Q(s)/C ds
  double conv = 0.0;
  double q_prev = q0;
  double exp_t = 1.0; // exp(-t_k/tau)
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double q = inflow.value(t);
    conv = decay * conv + 0.5 * dt * (decay * q_prev + q) / params.capacitance;
    exp_t *= decay;
    pressure[k] = (p_initial - params.r_proximal * q0) * exp_t +
                  params.r_proximal * q + conv;
    q_prev = q;
  }
  return pressure;
}

double step_response(const RcrParameters& params, double q_bar,
                     double p_initial, double t) {
  params.validate();
  if (t < 0.0) throw std::invalid_argument("step_response: t must be >= 0");
  const double p_inf = q_bar * (params.r_proximal + params.r_distal);
  return p_inf + std::exp(-t / params.time_constant()) * (p_initial - p_inf);
}

double mean_over_cycle(std::span<const double> series, double dt, double period,
                       int cycle_index) {
  if (!(dt > 0.0) || !(period > 0.0) || cycle_index < 0)
    throw std::invalid_argument("mean_over_cycle: invalid arguments");
  const double steps_per_cycle = period / dt;
  const long m = std::lround(steps_per_cycle);
  if (std::abs(steps_per_cycle - static_cast<double>(m)) >
      1e-6 * steps_per_cycle)
    throw std::invalid_argument("mean_over_cycle: dt does not divide the period");
  const std::size_t begin = static_cast<std::size_t>(cycle_index) *
                            static_cast<std::size_t>(m);
  const std::size_t end = begin + static_cast<std::size_t>(m);
  if (end >= series.size())
    throw std::out_of_range("mean_over_cycle: cycle window exceeds series extent");

  double integral = 0.0;
  for (std::size_t i = begin; i < end; ++i)
    integral += 0.5 * (series[i] + series[i + 1]) * dt;
  return integral / (static_cast<double>(m) * dt);
}

double mean_pressure_recursion(double p0_mean, double p_inf_mean,
                               double tau_over_T, int n) {
  if (!(tau_over_T > 0.0))
    throw std::invalid_argument("mean_pressure_recursion: tau/T must be > 0");
  if (n < 0) throw std::invalid_argument("mean_pressure_recursion: n must be >= 0");
  return p_inf_mean +
         std::exp(-static_cast<double>(n) / tau_over_T) * (p0_mean - p_inf_mean);
}

double asymptotic_error(double p_n_mean, double p_inf_mean) {
  if (p_inf_mean == 0.0)
    throw std::invalid_argument("asymptotic_error: zero asymptote");
  return std::abs(p_inf_mean - p_n_mean) / std::abs(p_inf_mean);
}

int cycles_to_convergence(double tau_over_T, double epsilon,
                          double p0_over_pinf) {
  if (!(tau_over_T > 0.0))
    throw std::invalid_argument("cycles_to_convergence: tau/T must be > 0");
  if (!(epsilon > 0.0) || epsilon >= 1.0)
    throw std::invalid_argument("cycles_to_convergence: epsilon must be in (0,1)");
  const double gap = std::abs(1.0 - p0_over_pinf);
  if (gap <= epsilon) return 0;
  const double bound = -tau_over_T * std::log(epsilon / gap);
  // guard against ties landing a hair above an integer
  const int n = static_cast<int>(std::ceil(bound - 1e-12));
  return n < 0 ? 0 : n;
}

int cycles_to_convergence_zero_ic(double tau_over_T, double epsilon) {
  if (epsilon >= 1.0) return 0;
  return cycles_to_convergence(tau_over_T, epsilon, 0.0);
}

double cyclic_error(double p_prev_mean, double p_curr_mean, double p_inf_mean) {
  if (p_inf_mean == 0.0)
    throw std::invalid_argument("cyclic_error: zero asymptote");
  return std::abs(p_curr_mean - p_prev_mean) / std::abs(p_inf_mean);
}

double error_ratio_alpha(double tau_over_T) {
  if (!(tau_over_T > 0.0))
    throw std::invalid_argument("error_ratio_alpha: tau/T must be > 0");
  return 1.0 / std::expm1(1.0 / tau_over_T);
}

} // namespace vasc
