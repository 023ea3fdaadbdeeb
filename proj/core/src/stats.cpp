#include "d2rl/stats.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace d2rl {

std::vector<double> rolling_average(std::span<const double> values, std::size_t window) {
  RollingMean rolling(window);
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(rolling.push(v));
  return out;
}

RollingMean::RollingMean(std::size_t window) {
  if (window == 0) throw std::invalid_argument("rolling window must be at least 1");
  ring_.assign(window, 0.0);
}

double RollingMean::push(double sample) {
  if (count_ == ring_.size()) {
    sum_ -= ring_[next_];
  } else {
    ++count_;
  }
  ring_[next_] = sample;
  sum_ += sample;
  next_ = (next_ + 1) % ring_.size();
  // Resum once per lap so the running sum does not drift.
  if (next_ == 0) sum_ = std::accumulate(ring_.begin(), ring_.end(), 0.0);
  return value();
}

double RollingMean::value() const noexcept { return count_ ? sum_ / static_cast<double>(count_) : 0.0; }

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty range");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mu = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

ConfidenceBand confidence_band(std::span<const std::vector<double>> curves) {
  if (curves.size() < 2) throw std::invalid_argument("confidence_band needs at least two curves");
  const std::size_t length = curves.front().size();
  for (const auto& c : curves)
    if (c.size() != length) throw std::invalid_argument("confidence_band: curves differ in length");
  ConfidenceBand band;
  band.mean.resize(length);
  band.lo.resize(length);
  band.hi.resize(length);
  band.half_width.resize(length);
  std::vector<double> column(curves.size());
  const double root_n = std::sqrt(static_cast<double>(curves.size()));
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t i = 0; i < curves.size(); ++i) column[i] = curves[i][t];
    const double mu = mean(column);
    const double hw = 1.96 * sample_sd(column) / root_n;
    band.mean[t] = mu;
    band.half_width[t] = hw;
    band.lo[t] = mu - hw;
    band.hi[t] = mu + hw;
  }
  return band;
}

}  // namespace d2rl
