#include "vasc/periodicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vasc {

void OutletTraceSet::validate() const {
  if (!(period > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("OutletTraceSet: period and dt must be > 0");
  if (outlets.empty())
    throw std::invalid_argument("OutletTraceSet: no outlets");
  const std::size_t len = outlets[0].flow.size();
  for (const auto& o : outlets) {
    if (o.flow.size() != len || o.pressure.size() != len)
      throw std::invalid_argument("OutletTraceSet: outlets must share the time grid");
    o.params.validate();
  }
  segment_cycles(len, dt, period); // throws if shorter than one cycle
}

int OutletTraceSet::complete_cycles() const {
  return static_cast<int>(segment_cycles(outlets.at(0).flow.size(), dt, period).size());
}

std::vector<std::size_t> segment_cycles(std::size_t series_length, double dt,
                                        double period) {
  if (!(dt > 0.0) || !(period > 0.0))
    throw std::invalid_argument("segment_cycles: dt and period must be > 0");
  const double ratio = period / dt;
  const long m = std::lround(ratio);
  if (m < 1 || std::abs(ratio - static_cast<double>(m)) > 1e-6 * ratio)
    throw std::invalid_argument("segment_cycles: grid misaligned with the cycle period");
  if (series_length < static_cast<std::size_t>(m) + 1)
    throw std::invalid_argument("segment_cycles: trace shorter than one cycle");
  const std::size_t cycles = (series_length - 1) / static_cast<std::size_t>(m);
  std::vector<std::size_t> starts(cycles);
  for (std::size_t k = 0; k < cycles; ++k)
    starts[k] = k * static_cast<std::size_t>(m);
  return starts;
}

PeriodicPredictionEntry predict_periodic_pressure(
    const PeriodicWaveform& last_cycle_flow, const RcrParameters& params,
    const PredictOptions& options) {
  const double T = last_cycle_flow.period();
  const long n = std::max<long>(static_cast<long>(last_cycle_flow.samples().size()),
                                options.steps_per_cycle);
  PeriodicRunOptions run;
  run.epsilon = options.epsilon_0d;
  run.max_cycles = options.max_cycles;
  PeriodicRunResult res =
      run_rcr_to_periodic(params, last_cycle_flow, T / static_cast<double>(n), run);
  if (!res.converged)
    throw std::runtime_error(
        "predict_periodic_pressure: 0D companion model did not reach its limit "
        "cycle (achieved error " + std::to_string(res.achieved_error) + ")");
  return PeriodicPredictionEntry{std::move(res.pressure_cycles[0]),
                                 res.cycle_mean[0], res.cycles_used, true};
}

namespace {

PeriodicWaveform last_cycle_waveform(const std::vector<double>& series,
                                     double dt, double period) {
  const auto starts = segment_cycles(series.size(), dt, period);
  const std::size_t m = static_cast<std::size_t>(std::lround(period / dt));
  const std::size_t begin = starts.back();
  std::vector<std::pair<double, double>> samples(m);
  for (std::size_t i = 0; i < m; ++i)
    samples[i] = {static_cast<double>(i) * dt, series[begin + i]};
  return PeriodicWaveform(period, std::move(samples));
}

} // namespace

PeriodicPrediction predict_periodic_pressure(const OutletTraceSet& traces,
                                             const PredictOptions& options) {
  traces.validate();
  PeriodicPrediction prediction;
  prediction.outlets.reserve(traces.outlets.size());
  for (const auto& o : traces.outlets) {
    prediction.outlets.push_back(predict_periodic_pressure(
        last_cycle_waveform(o.flow, traces.dt, traces.period), o.params, options));
  }
  return prediction;
}

std::vector<OutletErrors> asymptotic_error_per_cycle(
    const OutletTraceSet& traces, const PeriodicPrediction& prediction) {
  traces.validate();
  if (prediction.outlets.size() != traces.outlets.size())
    throw std::invalid_argument("asymptotic_error_per_cycle: prediction/trace size mismatch");

  std::vector<OutletErrors> errors;
  errors.reserve(traces.outlets.size());
  const int cycles = traces.complete_cycles();
  for (std::size_t o = 0; o < traces.outlets.size(); ++o) {
    const auto& outlet = traces.outlets[o];
    const auto& pred = prediction.outlets[o];
    if (pred.mean == 0.0)
      throw std::invalid_argument("asymptotic_error_per_cycle: zero-mean predicted pressure");

    OutletErrors err;
    err.id = outlet.id;
    std::vector<double> p_means(cycles), q_means(cycles);
    for (int n = 0; n < cycles; ++n) {
      p_means[n] = mean_over_cycle(outlet.pressure, traces.dt, traces.period, n);
      q_means[n] = mean_over_cycle(outlet.flow, traces.dt, traces.period, n);
    }
    const double q_last = q_means.back();
    for (int n = 0; n < cycles; ++n) {
      err.eps_asym_pressure.push_back(asymptotic_error(p_means[n], pred.mean));
      err.eps_asym_flow.push_back(
          q_last != 0.0 ? std::abs(q_means[n] - q_last) / std::abs(q_last)
                        : std::abs(q_means[n] - q_last));
      if (n >= 1)
        err.eps_cyclic.push_back(cyclic_error(p_means[n - 1], p_means[n], pred.mean));
    }

    // max-over-time diagnostic on the last cycle
    const std::size_t m = static_cast<std::size_t>(std::lround(traces.period / traces.dt));
    const std::size_t begin = (static_cast<std::size_t>(cycles) - 1) * m;
    double max_dev = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
      const double t = static_cast<double>(i) * traces.dt;
      max_dev = std::max(max_dev, std::abs(outlet.pressure[begin + i] -
                                           pred.pressure_cycle.value(t)));
    }
    err.eps_asym_max_over_time = max_dev / std::abs(pred.mean);
    errors.push_back(std::move(err));
  }
  return errors;
}

TimeConstantFit fit_model_time_constant(const std::vector<double>& eps_per_cycle,
                                        double error_floor) {
  std::vector<std::pair<double, double>> points; // (n, ln eps)
  for (std::size_t n = 0; n < eps_per_cycle.size(); ++n) {
    const double e = eps_per_cycle[n];
    if (std::isfinite(e) && e > error_floor)
      points.emplace_back(static_cast<double>(n), std::log(e));
  }
  if (points.size() < 3)
    throw std::runtime_error("fit_model_time_constant: fewer than 3 cycles above the error floor");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(points.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (!(slope < 0.0))
    throw std::runtime_error("fit_model_time_constant: non-negative slope (sequence not converging)");
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (const auto& [x, y] : points) {
    const double r = y - (intercept + slope * x);
    ss += r * r;
  }
  return TimeConstantFit{-1.0 / slope, std::sqrt(ss / n),
                         static_cast<int>(points.size())};
}

double mean_outlet_time_constant(const std::vector<RcrParameters>& outlet_params,
                                 double period) {
  if (outlet_params.empty())
    throw std::invalid_argument("mean_outlet_time_constant: no outlets");
  if (!(period > 0.0))
    throw std::invalid_argument("mean_outlet_time_constant: period must be > 0");
  double sum = 0.0;
  for (const auto& p : outlet_params) {
    p.validate();
    sum += p.time_constant();
  }
  return sum / (static_cast<double>(outlet_params.size()) * period);
}

ConvergenceReport check_convergence(const OutletTraceSet& traces,
                                    double epsilon_target,
                                    const PredictOptions& options) {
  if (!(epsilon_target > 0.0) || epsilon_target >= 1.0)
    throw std::invalid_argument("check_convergence: epsilon_target must be in (0,1)");
  traces.validate();

  ConvergenceReport report;
  report.epsilon_target = epsilon_target;

  const PeriodicPrediction prediction = predict_periodic_pressure(traces, options);
  report.outlets = asymptotic_error_per_cycle(traces, prediction);

  std::vector<RcrParameters> params;
  for (const auto& o : traces.outlets) params.push_back(o.params);
  report.mean_outlet_tau_over_T = mean_outlet_time_constant(params, traces.period);

  double fitted_sum = 0.0;
  int fitted_count = 0;
  for (const auto& o : report.outlets) {
    double fit = std::numeric_limits<double>::quiet_NaN();
    try {
      fit = fit_model_time_constant(o.eps_asym_pressure).tau_over_T;
      fitted_sum += fit;
      ++fitted_count;
    } catch (const std::runtime_error&) {
      // too few qualifying cycles or non-decaying sequence; keep NaN
    }
    report.tau_over_T_fitted.push_back(fit);
  }
  const double tau_estimate = fitted_count > 0
                                  ? fitted_sum / fitted_count
                                  : report.mean_outlet_tau_over_T;

  bool pressure_ok = true;
  bool flow_ok = true;
  int worst_remaining = 0;
  const int last = traces.complete_cycles() - 1;
  for (std::size_t o = 0; o < report.outlets.size(); ++o) {
    const auto& err = report.outlets[o];
    report.predicted_mean.push_back(prediction.outlets[o].mean);
    if (err.eps_asym_pressure.back() > epsilon_target) pressure_ok = false;
    // flow cyclic change between the last two cycles (0 for a single cycle)
    const double flow_change =
        err.eps_asym_flow.size() >= 2
            ? err.eps_asym_flow[err.eps_asym_flow.size() - 2]
            : 0.0;
    if (flow_change > epsilon_target) flow_ok = false;

    const double gap_ratio = prediction.outlets[o].mean != 0.0
        ? mean_over_cycle(traces.outlets[o].pressure, traces.dt, traces.period, last) /
              prediction.outlets[o].mean
        : 1.0;
    worst_remaining = std::max(
        worst_remaining, cycles_to_convergence(tau_estimate, epsilon_target, gap_ratio));
  }
  report.flow_periodic = flow_ok;
  report.prediction_provisional = !flow_ok;
  // predicted total cycle count (1-based) at which the target is reached
  report.cycles_to_target = last + worst_remaining + 1;
  report.converged = pressure_ok && flow_ok;
  return report;
}

} // namespace vasc
