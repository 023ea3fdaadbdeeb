#include "d2rl/quantile.hpp"

#include "d2rl/text.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace d2rl {

TauGrid::TauGrid(std::size_t m) {
  if (m == 0) throw std::invalid_argument("TauGrid: quantile count must be at least 1");
  taus_.resize(m);
  const double denom = 2.0 * static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) taus_[i] = (2.0 * static_cast<double>(i) + 1.0) / denom;
}

TauGrid tau_locations(std::size_t m) { return TauGrid(m); }

QuantileSet::QuantileSet(TauGrid grid, double initial)
    : grid_(std::move(grid)), thetas_(grid_.size(), initial) {}

QuantileSet::QuantileSet(TauGrid grid, std::vector<double> thetas)
    : grid_(std::move(grid)), thetas_(std::move(thetas)) {
  if (thetas_.size() != grid_.size())
    throw std::invalid_argument("QuantileSet: estimate count does not match the grid");
}

void QuantileSet::update(double reward, double step) noexcept {
  for (std::size_t i = 0; i < thetas_.size(); ++i)
    thetas_[i] = qr_update(thetas_[i], grid_[i], reward, step);
}

double mean_of_quantiles(std::span<const double> thetas) noexcept {
  if (thetas.empty()) return 0.0;
  return std::accumulate(thetas.begin(), thetas.end(), 0.0) / static_cast<double>(thetas.size());
}

double mean_of_quantiles(const QuantileSet& qs) noexcept { return mean_of_quantiles(qs.thetas()); }

void HuberParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("HuberParams: lambda must be positive and finite");
}

HuberValue quantile_huber(double x, double tau, const HuberParams& params) noexcept {
  const double weight = std::abs(tau - (x < 0.0 ? 1.0 : 0.0));
  const double lambda = params.lambda;
  if (std::abs(x) <= lambda) return {weight * 0.5 * x * x, weight * x};
  const double sign = x < 0.0 ? -1.0 : 1.0;
  return {weight * lambda * (std::abs(x) - 0.5 * lambda), weight * lambda * sign};
}

StepSchedule StepSchedule::constant(double base) {
  if (!(base > 0.0)) throw std::invalid_argument("StepSchedule: base step must be positive");
  return StepSchedule(Kind::kConstant, base, 0.0, 0);
}

StepSchedule StepSchedule::polynomial(double base, double power) {
  if (!(base > 0.0)) throw std::invalid_argument("StepSchedule: base step must be positive");
  if (!(power > 0.5 && power <= 1.0))
    throw std::invalid_argument("StepSchedule: decay power must lie in (0.5, 1]");
  return StepSchedule(Kind::kPolynomial, base, power, 0);
}

StepSchedule StepSchedule::constant_then_decay(double base, std::uint64_t hold, double power) {
  if (!(base > 0.0)) throw std::invalid_argument("StepSchedule: base step must be positive");
  if (!(power > 0.5 && power <= 1.0))
    throw std::invalid_argument("StepSchedule: decay power must lie in (0.5, 1]");
  return StepSchedule(Kind::kConstantThenDecay, base, power, hold);
}

namespace {

template <class T>
T parse_number(std::string_view text, const char* what) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw std::invalid_argument(std::string("StepSchedule: bad ") + what + " '" + std::string(text) + "'");
  return value;
}

}  // namespace

StepSchedule StepSchedule::parse(const std::string& text, double base) {
  if (text.empty() || text == "constant") return constant(base);
  const std::string_view view(text);
  if (view.starts_with("poly:")) return polynomial(base, parse_number<double>(view.substr(5), "power"));
  if (view.starts_with("hold:")) {
    const auto rest = view.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos)
      throw std::invalid_argument("StepSchedule: expected hold:<steps>:<power>");
    return constant_then_decay(base, parse_number<std::uint64_t>(rest.substr(0, colon), "hold"),
                               parse_number<double>(rest.substr(colon + 1), "power"));
  }
  throw std::invalid_argument("StepSchedule: unknown schedule '" + text + "'");
}

double StepSchedule::operator()(std::uint64_t t) const noexcept {
  switch (kind_) {
    case Kind::kConstant:
      return base_;
    case Kind::kPolynomial:
      return base_ / std::pow(1.0 + static_cast<double>(t), power_);
    case Kind::kConstantThenDecay:
      if (t < hold_) return base_;
      return base_ / std::pow(1.0 + static_cast<double>(t - hold_), power_);
  }
  return base_;
}

std::string StepSchedule::describe() const {
  switch (kind_) {
    case Kind::kConstant:
      return "constant";
    case Kind::kPolynomial:
      return "poly:" + text::format_double(power_);
    case Kind::kConstantThenDecay:
      return "hold:" + std::to_string(hold_) + ":" + text::format_double(power_);
  }
  return "constant";
}

}  // namespace d2rl
