#ifndef VASC_RCR_HPP
#define VASC_RCR_HPP

#include <span>
#include <vector>

#include "vasc/waveform.hpp"

namespace vasc {

/*! @brief Three-element Windkessel parameters: proximal resistance in series
 *  with a parallel distal resistance and capacitance. */
struct RcrParameters {
  double r_proximal = 0.0;
  double capacitance = 0.0;
  double r_distal = 0.0;

  double time_constant() const { return r_distal * capacitance; }
  void validate() const;
};

/*! Per-cycle means of a quantity, indexed from cycle 0. */
struct CycleMeans {
  double period = 0.0;
  std::vector<double> values;
};

/*! Semi-analytic inlet pressure of an RCR driven by a periodic inflow,
 *  evaluated on the uniform grid {0, dt, 2dt, ...} up to t_end.
 *
 *  The solution splits into exponential decay of the initial state, the
 *  proximal resistive drop, and a convolution integral over the distal
 *  sub-circuit; the convolution is advanced with an O(1)-per-step
 *  running trapezoidal recurrence. */
std::vector<double> rcr_pressure_semianalytic(const RcrParameters& params,
                                              const PeriodicWaveform& inflow,
                                              double p_initial, double t_end,
                                              double dt);

/*! Pressure step response to constant inflow q_bar:
 *  P(t) = P_inf + exp(-t/tau) (P0 - P_inf), P_inf = q_bar (Rp + Rd). */
double step_response(const RcrParameters& params, double q_bar,
                     double p_initial, double t);

/*! Trapezoidal time-average of a uniformly sampled series over cycle window
 *  [n T, (n+1) T]. The series starts at t = 0 with spacing dt. */
double mean_over_cycle(std::span<const double> series, double dt, double period,
                       int cycle_index);

/*! Closed-form mean-pressure recursion:
 *  P̄_n = P̄_inf + exp(-n T / tau) (P̄_0 - P̄_inf). */
double mean_pressure_recursion(double p0_mean, double p_inf_mean,
                               double tau_over_T, int n);

/*! Asymptotic error |P̄_inf - P̄_n| / |P̄_inf|. */
double asymptotic_error(double p_n_mean, double p_inf_mean);

/*! Smallest cycle count n with exp(-n T/tau) |1 - P̄_0/P̄_inf| <= epsilon;
 *  0 means already within tolerance. */
int cycles_to_convergence(double tau_over_T, double epsilon,
                          double p0_over_pinf);

/*! Specialization for zero initial conditions (P̄_0 = 0). */
int cycles_to_convergence_zero_ic(double tau_over_T, double epsilon);

/*! Cyclic error |P̄_n - P̄_{n-1}| / |P̄_inf| between consecutive cycles. */
double cyclic_error(double p_prev_mean, double p_curr_mean, double p_inf_mean);

/*! Ratio alpha between asymptotic and cyclic error: 1 / (exp(T/tau) - 1).
 *  Equals 1 at tau/T = 1/ln 2; the cyclic error understates the asymptotic
 *  error whenever tau/T exceeds that threshold. */
double error_ratio_alpha(double tau_over_T);

} // namespace vasc

#endif
