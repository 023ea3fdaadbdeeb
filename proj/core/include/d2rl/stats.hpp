#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace d2rl {

/// Trailing mean over the last min(window, t + 1) samples.
/// Throws std::invalid_argument when window == 0.
std::vector<double> rolling_average(std::span<const double> values, std::size_t window);

/// Incremental form of rolling_average for streaming use.
class RollingMean {
 public:
  explicit RollingMean(std::size_t window);

  double push(double value);
  double value() const noexcept;

 private:
  std::vector<double> ring_;
  std::size_t next_ = 0;
  std::size_t count_ = 0;
  double sum_ = 0.0;
};

struct ConfidenceBand {
  std::vector<double> mean;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> half_width;
};

/// Pointwise mean +- 1.96 * sample sd / sqrt(n) over equal-length curves.
/// Throws std::invalid_argument with fewer than two curves or ragged lengths.
ConfidenceBand confidence_band(std::span<const std::vector<double>> curves);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> values);

}  // namespace d2rl
