#include "d2rl/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace d2rl {

// ---------------------------------------------------------------------------
// Tile coding

TileCoder::TileCoder(std::size_t n_tilings, std::vector<TileDimension> dims)
    : n_tilings_(n_tilings), dims_(std::move(dims)), tiles_per_tiling_(1) {
  if (n_tilings_ == 0) throw std::invalid_argument("TileCoder: need at least one tiling");
  if (dims_.empty()) throw std::invalid_argument("TileCoder: need at least one dimension");
  for (const auto& d : dims_) {
    if (d.tiles == 0 || !(d.hi > d.lo)) throw std::invalid_argument("TileCoder: bad dimension bounds");
    tiles_per_tiling_ *= d.tiles;
  }
}

TileCoder TileCoder::pendulum(std::size_t n_tilings, std::size_t tiles_per_dim) {
  return TileCoder(n_tilings, {{-std::numbers::pi, std::numbers::pi, tiles_per_dim, true},
                               {-8.0, 8.0, tiles_per_dim, false}});
}

std::vector<std::size_t> TileCoder::tile_coordinates(std::span<const double> state, std::size_t k) const {
  if (state.size() != dims_.size())
    throw std::invalid_argument("TileCoder: state has " + std::to_string(state.size()) + " dimensions, expected " +
                                std::to_string(dims_.size()));
  if (k >= n_tilings_) throw std::out_of_range("TileCoder: tiling index out of range");
  std::vector<std::size_t> coords(dims_.size());
  const double shift = static_cast<double>(k) / static_cast<double>(n_tilings_);
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    const auto& dim = dims_[d];
    const double width = dim.hi - dim.lo;
    double v = state[d];
    if (dim.wrap) {
      v = v - width * std::floor((v - dim.lo) / width);
      if (v >= dim.hi) v -= width;
    } else {
      v = std::clamp(v, dim.lo, dim.hi);
    }
    const double scaled = (v - dim.lo) / width * static_cast<double>(dim.tiles);
    auto c = static_cast<std::size_t>(std::floor(std::max(0.0, scaled + shift)));
    c = dim.wrap ? c % dim.tiles : std::min(c, dim.tiles - 1);
    coords[d] = c;
  }
  return coords;
}

void TileCoder::active(std::span<const double> state, ActiveSet& out) const {
  out.clear();
  out.reserve(n_tilings_);
  for (std::size_t k = 0; k < n_tilings_; ++k) {
    const auto coords = tile_coordinates(state, k);
    std::size_t index = 0;
    for (std::size_t d = 0; d < dims_.size(); ++d) index = index * dims_[d].tiles + coords[d];
    out.push_back(k * tiles_per_tiling_ + index);
  }
}

ActiveSet TileCoder::active(std::span<const double> state) const {
  ActiveSet out;
  active(state, out);
  return out;
}

ActiveSet action_features(std::span<const std::size_t> state_active, std::size_t action,
                          std::size_t features_per_action) {
  ActiveSet out(state_active.begin(), state_active.end());
  for (auto& i : out) i += action * features_per_action;
  return out;
}

double linear_value(std::span<const double> w, std::span<const std::size_t> active) {
  double total = 0.0;
  for (std::size_t i : active) {
    if (i >= w.size()) throw std::invalid_argument("linear_value: feature index out of range");
    total += w[i];
  }
  return total;
}

void add_to_active(std::span<double> w, std::span<const std::size_t> active, double scale) {
  for (std::size_t i : active) {
    if (i >= w.size()) throw std::invalid_argument("add_to_active: feature index out of range");
    w[i] += scale;
  }
}

// ---------------------------------------------------------------------------
// Softmax policy

std::vector<double> softmax(std::span<const double> preferences) {
  if (preferences.empty()) throw std::invalid_argument("softmax: no preferences");
  const double top = *std::max_element(preferences.begin(), preferences.end());
  std::vector<double> out(preferences.size());
  double total = 0.0;
  for (std::size_t a = 0; a < out.size(); ++a) {
    out[a] = std::exp(preferences[a] - top);
    total += out[a];
  }
  for (auto& p : out) p /= total;
  return out;
}

SoftmaxPolicy::SoftmaxPolicy(std::size_t n_actions, std::size_t features_per_action)
    : n_actions_(n_actions), features_(features_per_action), u_(n_actions * features_per_action, 0.0) {
  if (n_actions_ == 0 || features_ == 0) throw std::invalid_argument("SoftmaxPolicy: empty shape");
}

std::vector<double> SoftmaxPolicy::preferences(std::span<const std::size_t> state_active) const {
  std::vector<double> h(n_actions_, 0.0);
  for (std::size_t a = 0; a < n_actions_; ++a) {
    const std::size_t base = a * features_;
    for (std::size_t i : state_active) {
      if (i >= features_) throw std::invalid_argument("SoftmaxPolicy: feature index out of range");
      h[a] += u_[base + i];
    }
  }
  return h;
}

std::vector<double> SoftmaxPolicy::probs(std::span<const std::size_t> state_active) const {
  return softmax(preferences(state_active));
}

std::size_t SoftmaxPolicy::sample(std::span<const std::size_t> state_active, Rng& rng) const {
  const auto p = probs(state_active);
  return rng.discrete(p);
}

std::vector<double> SoftmaxPolicy::log_prob_gradient(std::span<const std::size_t> state_active,
                                                     std::size_t action) const {
  if (action >= n_actions_) throw std::out_of_range("SoftmaxPolicy: action out of range");
  const auto p = probs(state_active);
  std::vector<double> grad(u_.size(), 0.0);
  for (std::size_t b = 0; b < n_actions_; ++b) {
    const double coeff = (b == action ? 1.0 : 0.0) - p[b];
    for (std::size_t i : state_active) grad[b * features_ + i] += coeff;
  }
  return grad;
}

void SoftmaxPolicy::add_log_prob_gradient(std::span<const std::size_t> state_active, std::size_t action,
                                          double scale) {
  if (action >= n_actions_) throw std::out_of_range("SoftmaxPolicy: action out of range");
  const auto p = probs(state_active);
  for (std::size_t b = 0; b < n_actions_; ++b) {
    const double coeff = scale * ((b == action ? 1.0 : 0.0) - p[b]);
    for (std::size_t i : state_active) u_[b * features_ + i] += coeff;
  }
}

// ---------------------------------------------------------------------------
// Return-quantile heads

LinearReturnQuantiles::LinearReturnQuantiles(std::size_t n_actions, std::size_t n, std::size_t features)
    : n_actions_(n_actions), grid_(n), features_(features), w_(n_actions * n * features, 0.0) {
  if (n_actions_ == 0 || features_ == 0) throw std::invalid_argument("LinearReturnQuantiles: empty shape");
}

double LinearReturnQuantiles::value(std::span<const std::size_t> active, std::size_t action,
                                    std::size_t j) const {
  if (action >= n_actions_ || j >= n()) throw std::out_of_range("LinearReturnQuantiles: head out of range");
  const std::size_t base = offset(action, j);
  double total = 0.0;
  for (std::size_t i : active) {
    if (i >= features_) throw std::invalid_argument("LinearReturnQuantiles: feature index out of range");
    total += w_[base + i];
  }
  return total;
}

std::vector<double> LinearReturnQuantiles::values(std::span<const std::size_t> active, std::size_t action) const {
  std::vector<double> out(n());
  for (std::size_t j = 0; j < n(); ++j) out[j] = value(active, action, j);
  return out;
}

double LinearReturnQuantiles::mean(std::span<const std::size_t> active, std::size_t action) const {
  return mean_of_quantiles(values(active, action));
}

void LinearReturnQuantiles::add(std::span<const std::size_t> active, std::size_t action, std::size_t j,
                                double scale) {
  if (action >= n_actions_ || j >= n()) throw std::out_of_range("LinearReturnQuantiles: head out of range");
  const std::size_t base = offset(action, j);
  for (std::size_t i : active) w_[base + i] += scale;
}

double return_quantile_loss(std::span<const double> estimates, std::span<const double> targets,
                            const TauGrid& grid, const HuberParams& huber) {
  if (estimates.size() != grid.size()) throw std::invalid_argument("return_quantile_loss: size mismatch");
  const double inv_n = 1.0 / static_cast<double>(targets.size());
  double total = 0.0;
  for (std::size_t j = 0; j < estimates.size(); ++j)
    for (double target : targets) total += inv_n * quantile_huber(target - estimates[j], grid[j], huber).loss;
  return total;
}

std::vector<double> return_quantile_loss_gradient(std::span<const double> estimates,
                                                  std::span<const double> targets, const TauGrid& grid,
                                                  const HuberParams& huber) {
  if (estimates.size() != grid.size()) throw std::invalid_argument("return_quantile_loss: size mismatch");
  const double inv_n = 1.0 / static_cast<double>(targets.size());
  std::vector<double> grad(estimates.size(), 0.0);
  for (std::size_t j = 0; j < estimates.size(); ++j)
    for (double target : targets)
      grad[j] -= inv_n * quantile_huber(target - estimates[j], grid[j], huber).derivative;
  return grad;
}

// ---------------------------------------------------------------------------
// Updates

StepTrace d2_fa_td_step(std::span<double> w, QuantileSet& qs, std::span<const std::size_t> x_s,
                        std::span<const std::size_t> x_next, double r, const AgentHyper& hyper) {
  const double rbar = mean_of_quantiles(qs);
  const double delta = r - rbar + linear_value(w, x_next) - linear_value(w, x_s);
  add_to_active(w, x_s, hyper.alpha * delta);
  qs.update(r, hyper.eta_theta * hyper.alpha);
  return {rbar, delta, 0.0};
}

StepTrace d2_fa_q_step(std::span<double> w, QuantileSet& qs, std::span<const std::size_t> x_sa,
                       std::span<const ActiveSet> x_next_actions, double r, const AgentHyper& hyper) {
  if (x_next_actions.empty()) throw std::invalid_argument("d2_fa_q_step: no next-state actions");
  const double rbar = mean_of_quantiles(qs);
  std::vector<double> next_values(x_next_actions.size());
  for (std::size_t a = 0; a < x_next_actions.size(); ++a) next_values[a] = linear_value(w, x_next_actions[a]);
  const double delta = r - rbar + next_values[argmax(next_values)] - linear_value(w, x_sa);
  add_to_active(w, x_sa, hyper.alpha * delta);
  qs.update(r, hyper.eta_theta * hyper.alpha);
  return {rbar, delta, 0.0};
}

StepTrace d2_actor_critic_step(std::span<double> w, SoftmaxPolicy& policy, QuantileSet& qs,
                               std::span<const std::size_t> x_s, std::size_t action,
                               std::span<const std::size_t> x_next, double r, const AgentHyper& hyper) {
  const double rbar = mean_of_quantiles(qs);
  const double delta = r - rbar + linear_value(w, x_next) - linear_value(w, x_s);
  add_to_active(w, x_s, hyper.alpha * delta);
  policy.add_log_prob_gradient(x_s, action, hyper.eta_pi * hyper.alpha * delta);
  qs.update(r, hyper.eta_theta * hyper.alpha);
  return {rbar, delta, 0.0};
}

namespace {

/// Applies -alpha * dL/dOmega(s, a, j) * x(s) to every head of `action`.
double descend_return_heads(LinearReturnQuantiles& omega, std::span<const std::size_t> x_s, std::size_t action,
                            std::span<const double> targets, double alpha, const HuberParams& huber) {
  const auto estimates = omega.values(x_s, action);
  const auto grad = return_quantile_loss_gradient(estimates, targets, omega.grid(), huber);
  double moved = 0.0;
  for (std::size_t j = 0; j < grad.size(); ++j) {
    omega.add(x_s, action, j, -alpha * grad[j]);
    moved += std::abs(alpha * grad[j]);
  }
  return moved / static_cast<double>(grad.size());
}

std::vector<double> shifted(std::vector<double> values, double shift) {
  for (auto& v : values) v += shift;
  return values;
}

}  // namespace

StepTrace d3_fa_td_step(LinearReturnQuantiles& omega, QuantileSet& qs, std::span<const std::size_t> x_s,
                        std::span<const std::size_t> x_next, double r, const AgentHyper& hyper,
                        const HuberParams& huber) {
  const double rbar = mean_of_quantiles(qs);
  const auto targets = shifted(omega.values(x_next, 0), r - rbar);
  const double moved = descend_return_heads(omega, x_s, 0, targets, hyper.alpha, huber);
  qs.update(r, hyper.eta_theta * hyper.alpha);
  return {rbar, 0.0, moved};
}

StepTrace d3_fa_q_step(LinearReturnQuantiles& omega, QuantileSet& qs, std::span<const std::size_t> x_s,
                       std::size_t action, std::span<const std::size_t> x_next, double r,
                       const AgentHyper& hyper, const HuberParams& huber) {
  const double rbar = mean_of_quantiles(qs);
  std::vector<double> means(omega.n_actions());
  for (std::size_t b = 0; b < means.size(); ++b) means[b] = omega.mean(x_next, b);
  const auto targets = shifted(omega.values(x_next, argmax(means)), r - rbar);
  const double moved = descend_return_heads(omega, x_s, action, targets, hyper.alpha, huber);
  qs.update(r, hyper.eta_theta * hyper.alpha);
  return {rbar, 0.0, moved};
}

StepTrace d3_actor_critic_step(LinearReturnQuantiles& omega, SoftmaxPolicy& policy, QuantileSet& qs,
                               std::span<const std::size_t> x_s, std::size_t action,
                               std::span<const std::size_t> x_next, double r, const AgentHyper& hyper,
                               const HuberParams& huber) {
  const double rbar = mean_of_quantiles(qs);
  const auto next_values = omega.values(x_next, 0);
  const double delta = r - rbar + mean_of_quantiles(next_values) - omega.mean(x_s, 0);
  const auto targets = shifted(next_values, r - rbar);
  const double moved = descend_return_heads(omega, x_s, 0, targets, hyper.alpha, huber);
  policy.add_log_prob_gradient(x_s, action, hyper.eta_pi * hyper.alpha * delta);
  qs.update(r, hyper.eta_theta * hyper.alpha);
  return {rbar, delta, moved};
}

StepTrace differential_actor_critic_step(std::span<double> w, double& rbar, SoftmaxPolicy& policy,
                                         std::span<const std::size_t> x_s, std::size_t action,
                                         std::span<const std::size_t> x_next, double r,
                                         const AgentHyper& hyper) {
  const double used = rbar;
  const double delta = r - rbar + linear_value(w, x_next) - linear_value(w, x_s);
  rbar += hyper.eta_rbar * hyper.alpha * delta;
  add_to_active(w, x_s, hyper.alpha * delta);
  policy.add_log_prob_gradient(x_s, action, hyper.eta_pi * hyper.alpha * delta);
  return {used, delta, 0.0};
}

}  // namespace d2rl
