#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "d2rl/quantile.hpp"
#include "d2rl/random.hpp"
#include "d2rl/values.hpp"

namespace d2rl {

/// Step sizes and exploration shared by all agents. `alpha` is the step in
/// effect for the current update; the quantile step is eta_theta * alpha,
/// the scalar average-reward step eta_rbar * alpha, the policy step eta_pi * alpha.
struct AgentHyper {
  double alpha = 0.01;
  double eta_theta = 1.0;
  double eta_rbar = 1.0;
  double eta_pi = 1.0;
  double epsilon = 0.1;

  /// Throws std::invalid_argument unless every step multiplier is positive
  /// and epsilon lies in [0, 1].
  void validate() const;
};

/// Per-cell differential-return quantiles Omega_j(s, a), j = 1..n. State-only
/// tables use a single action slot. Quantile crossing is allowed.
class ReturnQuantileTable {
 public:
  ReturnQuantileTable(std::size_t n_states, std::size_t n_actions, std::size_t n, double initial = 0.0);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  std::size_t n() const noexcept { return grid_.size(); }
  const TauGrid& grid() const noexcept { return grid_; }

  std::span<double> cell(std::size_t s, std::size_t a = 0);
  std::span<const double> cell(std::size_t s, std::size_t a = 0) const;
  /// (1/n) sum_j Omega_j(s, a).
  double mean(std::size_t s, std::size_t a = 0) const;
  /// Means of every action at s.
  std::vector<double> action_means(std::size_t s) const;

  std::span<const double> flat() const noexcept { return omega_; }

  friend bool operator==(const ReturnQuantileTable&, const ReturnQuantileTable&) = default;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  TauGrid grid_;
  std::vector<double> omega_;
};

/// What a single update saw and did; used by instrumentation and logging.
struct StepTrace {
  double rbar = 0.0;          ///< average-reward estimate used in the update
  double td_error = 0.0;      ///< scalar TD error (D2 / baselines)
  double omega_change = 0.0;  ///< mean |increment| over the updated Omega_j (D3)
};

/// With probability epsilon a uniformly random action, otherwise the
/// lowest-index argmax of `values`. Always consumes one uniform draw, plus an
/// index draw when exploring. Throws std::invalid_argument on an empty row.
std::size_t epsilon_greedy(std::span<const double> values, double epsilon, Rng& rng);

/// Tabular D2 Q-learning update:
///   Rbar = mean(theta); delta = r - Rbar + max_a Q(s', a) - Q(s, a);
///   Q(s, a) += alpha delta; theta_i <- qr_update(theta_i, tau_i, r, eta_theta alpha).
StepTrace d2_q_step(QTable& q, QuantileSet& qs, std::size_t s, std::size_t a, double r, std::size_t next,
                    const AgentHyper& hyper);

/// Tabular D2 TD-learning update (prediction): as d2_q_step with V(s') in the target.
StepTrace d2_td_step(VTable& v, QuantileSet& qs, std::size_t s, double r, std::size_t next,
                     const AgentHyper& hyper);

/// Tabular D3 Q-learning update. a* is the greedy action at s' on the mean of
/// Omega(s', .). Each Omega_j(s, a) moves by
///   alpha (1/n) sum_k [tau_j - 1{r - Rbar + Omega_k(s', a*) - Omega_j(s, a) < 0}]
/// with the targets Omega_k(s', a*) read before any Omega_j is written. Then
/// theta is updated as in D2.
StepTrace d3_q_step(ReturnQuantileTable& omega, QuantileSet& qs, std::size_t s, std::size_t a, double r,
                    std::size_t next, const AgentHyper& hyper);

/// Tabular D3 TD-learning update on a state-only table (targets Omega_k(s')).
StepTrace d3_td_step(ReturnQuantileTable& omega, QuantileSet& qs, std::size_t s, double r, std::size_t next,
                     const AgentHyper& hyper);

/// Differential Q-learning baseline:
///   delta = r - rbar + max_a Q(s', a) - Q(s, a); rbar += eta_rbar alpha delta; Q(s, a) += alpha delta.
StepTrace differential_q_step(QTable& q, double& rbar, std::size_t s, std::size_t a, double r,
                              std::size_t next, const AgentHyper& hyper);

/// Differential-return quantile increment shared by the tabular D3 updates;
/// exposed for tests. `targets` are r - Rbar + Omega_k(s', .).
double omega_increment(double omega_j, double tau_j, std::span<const double> targets) noexcept;

}  // namespace d2rl
