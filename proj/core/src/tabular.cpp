#include "d2rl/tabular.hpp"

#include <cmath>
#include <stdexcept>

namespace d2rl {

void AgentHyper::validate() const {
  auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  if (!positive(alpha) || !positive(eta_theta) || !positive(eta_rbar) || !positive(eta_pi))
    throw std::invalid_argument("AgentHyper: step sizes must be positive and finite");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("AgentHyper: epsilon outside [0, 1]");
}

ReturnQuantileTable::ReturnQuantileTable(std::size_t n_states, std::size_t n_actions, std::size_t n,
                                         double initial)
    : n_states_(n_states), n_actions_(n_actions), grid_(n), omega_(n_states * n_actions * n, initial) {
  if (n_states == 0 || n_actions == 0) throw std::invalid_argument("ReturnQuantileTable: empty shape");
}

std::span<double> ReturnQuantileTable::cell(std::size_t s, std::size_t a) {
  if (s >= n_states_ || a >= n_actions_) throw std::out_of_range("ReturnQuantileTable: index out of range");
  return std::span<double>(omega_).subspan((s * n_actions_ + a) * n(), n());
}

std::span<const double> ReturnQuantileTable::cell(std::size_t s, std::size_t a) const {
  if (s >= n_states_ || a >= n_actions_) throw std::out_of_range("ReturnQuantileTable: index out of range");
  return std::span<const double>(omega_).subspan((s * n_actions_ + a) * n(), n());
}

double ReturnQuantileTable::mean(std::size_t s, std::size_t a) const { return mean_of_quantiles(cell(s, a)); }

std::vector<double> ReturnQuantileTable::action_means(std::size_t s) const {
  std::vector<double> out(n_actions_);
  for (std::size_t a = 0; a < n_actions_; ++a) out[a] = mean(s, a);
  return out;
}

std::size_t epsilon_greedy(std::span<const double> values, double epsilon, Rng& rng) {
  if (values.empty()) throw std::invalid_argument("epsilon_greedy: empty action-value row");
  if (rng.uniform01() < epsilon) return rng.uniform_index(values.size());
  return argmax(values);
}

StepTrace d2_q_step(QTable& q, QuantileSet& qs, std::size_t s, std::size_t a, double r, std::size_t next,
                    const AgentHyper& hyper) {
  const double rbar = mean_of_quantiles(qs);
  const double delta = r - rbar + q.max(next) - q(s, a);
  q(s, a) += hyper.alpha * delta;
  qs.update(r, hyper.eta_theta * hyper.alpha);
  return {rbar, delta, 0.0};
}

StepTrace d2_td_step(VTable& v, QuantileSet& qs, std::size_t s, double r, std::size_t next,
                     const AgentHyper& hyper) {
  const double rbar = mean_of_quantiles(qs);
  const double delta = r - rbar + v(next) - v(s);
  v(s) += hyper.alpha * delta;
  qs.update(r, hyper.eta_theta * hyper.alpha);
  return {rbar, delta, 0.0};
}

double omega_increment(double omega_j, double tau_j, std::span<const double> targets) noexcept {
  double below = 0.0;
  for (double target : targets)
    if (target - omega_j < 0.0) below += 1.0;
  const double n = static_cast<double>(targets.size());
  // (1/n) sum_k [tau_j - 1{...}] = tau_j - below / n
  return tau_j - below / n;
}

namespace {

double update_return_cell(std::span<double> cell, const TauGrid& grid, std::span<const double> targets,
                          double alpha) {
  double moved = 0.0;
  for (std::size_t j = 0; j < cell.size(); ++j) {
    const double step = alpha * omega_increment(cell[j], grid[j], targets);
    cell[j] += step;
    moved += std::abs(step);
  }
  return moved / static_cast<double>(cell.size());
}

}  // namespace

StepTrace d3_q_step(ReturnQuantileTable& omega, QuantileSet& qs, std::size_t s, std::size_t a, double r,
                    std::size_t next, const AgentHyper& hyper) {
  const double rbar = mean_of_quantiles(qs);
  const std::size_t best = argmax(omega.action_means(next));
  const auto source = omega.cell(next, best);
  std::vector<double> targets(source.size());
  for (std::size_t k = 0; k < source.size(); ++k) targets[k] = r - rbar + source[k];
  const double moved = update_return_cell(omega.cell(s, a), omega.grid(), targets, hyper.alpha);
  qs.update(r, hyper.eta_theta * hyper.alpha);
  return {rbar, 0.0, moved};
}

StepTrace d3_td_step(ReturnQuantileTable& omega, QuantileSet& qs, std::size_t s, double r, std::size_t next,
                     const AgentHyper& hyper) {
  if (omega.n_actions() != 1) throw std::invalid_argument("d3_td_step: expected a state-only table");
  const double rbar = mean_of_quantiles(qs);
  const auto source = omega.cell(next);
  std::vector<double> targets(source.size());
  for (std::size_t k = 0; k < source.size(); ++k) targets[k] = r - rbar + source[k];
  const double moved = update_return_cell(omega.cell(s), omega.grid(), targets, hyper.alpha);
  qs.update(r, hyper.eta_theta * hyper.alpha);
  return {rbar, 0.0, moved};
}

StepTrace differential_q_step(QTable& q, double& rbar, std::size_t s, std::size_t a, double r,
                              std::size_t next, const AgentHyper& hyper) {
  const double used = rbar;
  const double delta = r - rbar + q.max(next) - q(s, a);
  rbar += hyper.eta_rbar * hyper.alpha * delta;
  q(s, a) += hyper.alpha * delta;
  return {used, delta, 0.0};
}

}  // namespace d2rl
