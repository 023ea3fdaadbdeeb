#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace d2rl {

/// Quantile levels tau_i = (2i - 1) / (2m), i = 1..m: the midpoints of m
/// equal-width bins of [0, 1].
class TauGrid {
 public:
  /// Throws std::invalid_argument when m == 0.
  explicit TauGrid(std::size_t m);

  std::size_t size() const noexcept { return taus_.size(); }
  double operator[](std::size_t i) const { return taus_[i]; }
  std::span<const double> taus() const noexcept { return taus_; }

  friend bool operator==(const TauGrid&, const TauGrid&) = default;

 private:
  std::vector<double> taus_;
};

TauGrid tau_locations(std::size_t m);

/// One quantile-regression step toward the tau-quantile of the reward
/// distribution: theta + step * (tau - 1{reward < theta}).
///
/// The indicator is a strict less-than, so a reward equal to theta pushes
/// theta up by step * tau.
inline double qr_update(double theta, double tau, double reward, double step) noexcept {
  return theta + step * (tau - (reward < theta ? 1.0 : 0.0));
}

/// Current estimates theta_1..theta_m of the limiting per-step reward
/// distribution at the levels of a TauGrid.
class QuantileSet {
 public:
  explicit QuantileSet(TauGrid grid, double initial = 0.0);
  QuantileSet(TauGrid grid, std::vector<double> thetas);

  const TauGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return thetas_.size(); }
  std::span<const double> thetas() const noexcept { return thetas_; }
  double operator[](std::size_t i) const { return thetas_[i]; }

  /// Applies qr_update to every theta_i with the same observed reward.
  void update(double reward, double step) noexcept;

  friend bool operator==(const QuantileSet&, const QuantileSet&) = default;

 private:
  TauGrid grid_;
  std::vector<double> thetas_;
};

/// Arithmetic mean of the quantile estimates; the agents' average-reward readout.
double mean_of_quantiles(const QuantileSet& qs) noexcept;
double mean_of_quantiles(std::span<const double> thetas) noexcept;

struct HuberParams {
  double lambda = 1.0;

  /// Throws std::invalid_argument unless lambda > 0.
  void validate() const;
};

struct HuberValue {
  double loss;
  double derivative;
};

/// Quantile Huber loss h^lambda_tau(x) and its derivative in x.
///
///   |tau - 1{x<0}| * x^2 / 2                 for |x| <= lambda
///   |tau - 1{x<0}| * lambda * (|x| - lambda/2) otherwise
HuberValue quantile_huber(double x, double tau, const HuberParams& params) noexcept;

/// Step-size schedule as a function of the update count t = 0, 1, 2, ...
class StepSchedule {
 public:
  enum class Kind { kConstant, kPolynomial, kConstantThenDecay };

  static StepSchedule constant(double base);
  /// base / (1 + t)^power, with power in (0.5, 1].
  static StepSchedule polynomial(double base, double power);
  /// base until t reaches `hold`, then base / (1 + t - hold)^power.
  static StepSchedule constant_then_decay(double base, std::uint64_t hold, double power);

  /// Parses "constant", "poly:<power>" or "hold:<steps>:<power>" around `base`.
  static StepSchedule parse(const std::string& text, double base);

  double operator()(std::uint64_t t) const noexcept;

  Kind kind() const noexcept { return kind_; }
  double base() const noexcept { return base_; }
  /// Largest value the schedule ever takes (its value at t = 0).
  double supremum() const noexcept { return base_; }
  std::string describe() const;

 private:
  StepSchedule(Kind kind, double base, double power, std::uint64_t hold)
      : kind_(kind), base_(base), power_(power), hold_(hold) {}

  Kind kind_;
  double base_;
  double power_;
  std::uint64_t hold_;
};

}  // namespace d2rl
