#ifndef VASC_WAVEFORM_HPP
#define VASC_WAVEFORM_HPP

#include <utility>
#include <vector>

namespace vasc {

/*! @brief Sampled periodic signal over one period T.
 *
 * Interpretation is piecewise-linear between samples with periodic wrap:
 * the segment between the last sample and the first sample (shifted by T)
 * closes the period. Sample times must be strictly increasing in [0, T).
 */
class PeriodicWaveform {
public:
  PeriodicWaveform(double period, std::vector<std::pair<double, double>> samples);

  static PeriodicWaveform constant(double period, double value);

  double period() const { return period_; }
  const std::vector<std::pair<double, double>>& samples() const { return samples_; }

  /*! Piecewise-linear value at time t, wrapped periodically. */
  double value(double t) const;

  /*! Slope of the segment containing t (right-sided at sample knots). */
  double slope(double t) const;

  /*! Time-average over one period (trapezoidal, closing the wrap). */
  double mean() const;

private:
  // index of the segment whose start knot is at or before the folded time
  std::size_t segment_of(double t_folded) const;

  double period_;
  std::vector<std::pair<double, double>> samples_;
};

} // namespace vasc

#endif
