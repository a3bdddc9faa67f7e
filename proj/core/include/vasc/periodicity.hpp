#ifndef VASC_PERIODICITY_HPP
#define VASC_PERIODICITY_HPP

#include <string>
#include <vector>

#include "vasc/network.hpp"
#include "vasc/rcr.hpp"
#include "vasc/waveform.hpp"

namespace vasc {

/*! One outlet of a simulation: flow and pressure sampled on the shared grid,
 *  plus the RCR boundary condition attached to it. */
struct OutletTrace {
  std::string id;
  RcrParameters params;
  std::vector<double> flow;
  std::vector<double> pressure;
};

/*! Multi-cycle time series at every outlet of a simulation. */
struct OutletTraceSet {
  double period = 0.0;
  double dt = 0.0;
  std::vector<OutletTrace> outlets;

  void validate() const;
  int complete_cycles() const;
};

/*! Predicted periodic pressure cycle for one outlet, produced by a 0D RCR
 *  companion model run to its limit cycle. */
struct PeriodicPredictionEntry {
  PeriodicWaveform pressure_cycle;
  double mean = 0.0;
  int cycles_used = 0;
  bool converged = false;
};

struct PeriodicPrediction {
  std::vector<PeriodicPredictionEntry> outlets;
};

struct OutletErrors {
  std::string id;
  std::vector<double> eps_asym_pressure; // per cycle, vs predicted mean
  std::vector<double> eps_asym_flow;     // per cycle, vs last-cycle mean flow
  std::vector<double> eps_cyclic;        // per cycle (first entry is cycle 1)
  double eps_asym_max_over_time = 0.0;   // last cycle, max-over-time diagnostic
};

struct TimeConstantFit {
  double tau_over_T = 0.0;
  double residual = 0.0; // rms residual of the log-linear fit
  int cycles_used = 0;
};

struct ConvergenceReport {
  std::vector<OutletErrors> outlets;
  std::vector<double> predicted_mean;     // P̄_inf estimate per outlet
  std::vector<double> tau_over_T_fitted;  // per outlet, NaN when fit failed
  double mean_outlet_tau_over_T = 0.0;
  double epsilon_target = 0.01;
  int cycles_to_target = 0; // predicted n_inf from measured P̄_0/P̄_inf
  bool flow_periodic = false;
  bool prediction_provisional = false; // flow not yet periodic at target
  bool converged = false;
};

/*! Splits a trace of given cycle count into complete [kT,(k+1)T] windows.
 *  Returns start sample indices; the trailing partial cycle is dropped. */
std::vector<std::size_t> segment_cycles(std::size_t series_length, double dt,
                                        double period);

struct PredictOptions {
  double epsilon_0d = 1e-8;
  int max_cycles = 1000;
  int steps_per_cycle = 1000;
};

/*! Drives the 0D RCR companion model with the outlet's last flow cycle until
 *  it reaches its limit cycle; the final pressure cycle estimates P̄_inf. */
PeriodicPredictionEntry predict_periodic_pressure(
    const PeriodicWaveform& last_cycle_flow, const RcrParameters& params,
    const PredictOptions& options = {});

PeriodicPrediction predict_periodic_pressure(const OutletTraceSet& traces,
                                             const PredictOptions& options = {});

/*! Per-outlet, per-cycle asymptotic and cyclic errors against the predicted
 *  periodic state (cycle means; a max-over-time variant is reported for the
 *  last cycle as a diagnostic). */
std::vector<OutletErrors> asymptotic_error_per_cycle(
    const OutletTraceSet& traces, const PeriodicPrediction& prediction);

/*! Least-squares slope of ln(eps_inf) vs cycle index over cycles above the
 *  error floor; tau/T = -1/slope. Throws if fewer than 3 cycles qualify or
 *  the slope is non-negative. */
TimeConstantFit fit_model_time_constant(const std::vector<double>& eps_per_cycle,
                                        double error_floor = 1e-6);

/*! Arithmetic mean of the outlet time constants R_d C, divided by T. */
double mean_outlet_time_constant(const std::vector<RcrParameters>& outlet_params,
                                 double period);

/*! Full periodicity audit: predicts the periodic state per outlet, computes
 *  error histories, fits the model time constant, and decides convergence at
 *  the last cycle. */
ConvergenceReport check_convergence(const OutletTraceSet& traces,
                                    double epsilon_target = 0.01,
                                    const PredictOptions& options = {});

} // namespace vasc

#endif
