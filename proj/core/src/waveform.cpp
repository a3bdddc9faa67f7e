#include "vasc/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vasc {

PeriodicWaveform::PeriodicWaveform(double period,
                                   std::vector<std::pair<double, double>> samples)
    : period_(period), samples_(std::move(samples)) {
  if (!(period_ > 0.0) || !std::isfinite(period_))
    throw std::invalid_argument("PeriodicWaveform: period must be positive and finite");
  if (samples_.size() < 2)
    throw std::invalid_argument("PeriodicWaveform: at least 2 samples required");
  double prev = -1.0;
  for (const auto& [t, v] : samples_) {
    if (!std::isfinite(t) || !std::isfinite(v))
      throw std::invalid_argument("PeriodicWaveform: non-finite sample");
    if (t < 0.0 || t >= period_)
      throw std::invalid_argument("PeriodicWaveform: sample time outside [0, T)");
    if (t <= prev)
      throw std::invalid_argument("PeriodicWaveform: sample times must be strictly increasing");
    prev = t;
  }
}

PeriodicWaveform PeriodicWaveform::constant(double period, double value) {
  return PeriodicWaveform(period, {{0.0, value}, {0.5 * period, value}});
}

std::size_t PeriodicWaveform::segment_of(double t_folded) const {
  // first sample with time > t_folded, then step back one
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t_folded,
                             [](double t, const std::pair<double, double>& s) {
                               return t < s.first;
                             });
  if (it == samples_.begin()) return samples_.size() - 1; // wrap segment
  return static_cast<std::size_t>(it - samples_.begin()) - 1;
}

double PeriodicWaveform::value(double t) const {
  double tf = t - period_ * std::floor(t / period_);
  std::size_t i = segment_of(tf);
  std::size_t j = (i + 1) % samples_.size();
  double t0 = samples_[i].first;
  double t1 = samples_[j].first;
  if (j == 0) t1 += period_;
  if (tf < t0) tf += period_; // folded into the wrap segment from below
  double w = (t1 > t0) ? (tf - t0) / (t1 - t0) : 0.0;
  return samples_[i].second + w * (samples_[j].second - samples_[i].second);
}

double PeriodicWaveform::slope(double t) const {
  double tf = t - period_ * std::floor(t / period_);
  std::size_t i = segment_of(tf);
  std::size_t j = (i + 1) % samples_.size();
  double t0 = samples_[i].first;
  double t1 = samples_[j].first;
  if (j == 0) t1 += period_;
  return (samples_[j].second - samples_[i].second) / (t1 - t0);
}

double PeriodicWaveform::mean() const {
  double integral = 0.0;
  const std::size_t n = samples_.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    integral += (samples_[i + 1].first - samples_[i].first) *
                0.5 * (samples_[i].second + samples_[i + 1].second);
  }
  // wrap segment from the last sample back to the first
  integral += (period_ - samples_[n - 1].first + samples_[0].first) *
              0.5 * (samples_[n - 1].second + samples_[0].second);
  return integral / period_;
}

} // namespace vasc
