#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "d2rl/quantile.hpp"
#include "d2rl/random.hpp"
#include "d2rl/tabular.hpp"

namespace d2rl {

/// Indices of the binary features that are on.
using ActiveSet = std::vector<std::size_t>;

struct TileDimension {
  double lo;
  double hi;
  std::size_t tiles;
  /// Periodic dimension: values wrap into [lo, hi) and tile indices wrap too.
  bool wrap = false;
};

/// Grid tile coder. Tiling k is displaced by k / n_tilings of a tile width
/// along every dimension. Each state activates exactly one tile per tiling,
/// so n_tilings features are on out of n_tilings * prod(tiles).
class TileCoder {
 public:
  TileCoder(std::size_t n_tilings, std::vector<TileDimension> dims);

  /// Angle in [-pi, pi) (periodic) and angular velocity in [-8, 8].
  static TileCoder pendulum(std::size_t n_tilings = 32, std::size_t tiles_per_dim = 8);

  std::size_t n_tilings() const noexcept { return n_tilings_; }
  std::size_t dimensions() const noexcept { return dims_.size(); }
  std::size_t tiles_per_tiling() const noexcept { return tiles_per_tiling_; }
  std::size_t num_features() const noexcept { return n_tilings_ * tiles_per_tiling_; }

  /// Out-of-range coordinates are clipped (or wrapped). Throws
  /// std::invalid_argument when state.size() != dimensions().
  ActiveSet active(std::span<const double> state) const;
  void active(std::span<const double> state, ActiveSet& out) const;

  /// Per-dimension tile coordinates of `state` in tiling `k`.
  std::vector<std::size_t> tile_coordinates(std::span<const double> state, std::size_t k) const;

 private:
  std::size_t n_tilings_;
  std::vector<TileDimension> dims_;
  std::size_t tiles_per_tiling_;
};

/// Action-conditional features: the state's active set shifted into the
/// disjoint block of `action` (block width `features_per_action`).
ActiveSet action_features(std::span<const std::size_t> state_active, std::size_t action,
                          std::size_t features_per_action);

/// w . x(s) for binary x. Throws std::invalid_argument if an index is out of range.
double linear_value(std::span<const double> w, std::span<const std::size_t> active);

/// w += scale * x(s).
void add_to_active(std::span<double> w, std::span<const std::size_t> active, double scale);

/// Weight vectors of a linear agent: critic (or return-quantile heads) and policy.
struct LinearWeights {
  std::vector<double> w;
  std::vector<double> u;
};

/// Softmax over linear action preferences h(s, a) = u . x_h(s, a), where
/// x_h(s, a) places the state's features in action a's block.
class SoftmaxPolicy {
 public:
  SoftmaxPolicy(std::size_t n_actions, std::size_t features_per_action);

  std::size_t n_actions() const noexcept { return n_actions_; }
  std::size_t features_per_action() const noexcept { return features_; }
  std::vector<double>& weights() noexcept { return u_; }
  const std::vector<double>& weights() const noexcept { return u_; }

  std::vector<double> preferences(std::span<const std::size_t> state_active) const;
  /// Max-subtracted exponentials, normalized.
  std::vector<double> probs(std::span<const std::size_t> state_active) const;
  std::size_t sample(std::span<const std::size_t> state_active, Rng& rng) const;

  /// Dense grad_u ln pi(a | s) = x_h(s, a) - sum_b pi(b | s) x_h(s, b).
  std::vector<double> log_prob_gradient(std::span<const std::size_t> state_active, std::size_t action) const;
  /// u += scale * grad_u ln pi(a | s), touching only the active entries.
  void add_log_prob_gradient(std::span<const std::size_t> state_active, std::size_t action, double scale);

 private:
  std::size_t n_actions_;
  std::size_t features_;
  std::vector<double> u_;
};

/// Stable softmax of a preference vector.
std::vector<double> softmax(std::span<const double> preferences);

/// Linear differential-return quantile heads Omega(s, [a,] j, w) = w_{a,j} . x(s).
class LinearReturnQuantiles {
 public:
  /// n_actions = 1 for state-valued heads.
  LinearReturnQuantiles(std::size_t n_actions, std::size_t n, std::size_t features);

  std::size_t n_actions() const noexcept { return n_actions_; }
  std::size_t n() const noexcept { return grid_.size(); }
  std::size_t features() const noexcept { return features_; }
  const TauGrid& grid() const noexcept { return grid_; }
  std::vector<double>& weights() noexcept { return w_; }
  const std::vector<double>& weights() const noexcept { return w_; }

  double value(std::span<const std::size_t> active, std::size_t action, std::size_t j) const;
  std::vector<double> values(std::span<const std::size_t> active, std::size_t action = 0) const;
  double mean(std::span<const std::size_t> active, std::size_t action = 0) const;
  /// Adds scale * x(s) to head (action, j).
  void add(std::span<const std::size_t> active, std::size_t action, std::size_t j, double scale);

 private:
  std::size_t offset(std::size_t action, std::size_t j) const noexcept { return (action * n() + j) * features_; }

  std::size_t n_actions_;
  TauGrid grid_;
  std::size_t features_;
  std::vector<double> w_;
};

/// sum_j (1/n) sum_k h_{tau_j}(target_k - estimate_j): the quantile Huber
/// objective over all (j, k) pairs with the targets held constant.
double return_quantile_loss(std::span<const double> estimates, std::span<const double> targets,
                            const TauGrid& grid, const HuberParams& huber);

/// d loss / d estimate_j for return_quantile_loss.
std::vector<double> return_quantile_loss_gradient(std::span<const double> estimates,
                                                  std::span<const double> targets, const TauGrid& grid,
                                                  const HuberParams& huber);

/// D2 TD with linear values: delta = r - Rbar + v(s') - v(s); w += alpha delta x(s); theta as in D2.
StepTrace d2_fa_td_step(std::span<double> w, QuantileSet& qs, std::span<const std::size_t> x_s,
                        std::span<const std::size_t> x_next, double r, const AgentHyper& hyper);

/// D2 Q with linear action values. `x_next_actions[a]` is the feature set of
/// (s', a); the max over actions breaks ties toward the lowest index.
StepTrace d2_fa_q_step(std::span<double> w, QuantileSet& qs, std::span<const std::size_t> x_sa,
                       std::span<const ActiveSet> x_next_actions, double r, const AgentHyper& hyper);

/// D2 actor-critic: critic as d2_fa_td_step, actor u += eta_pi alpha delta grad ln pi(a | s).
StepTrace d2_actor_critic_step(std::span<double> w, SoftmaxPolicy& policy, QuantileSet& qs,
                               std::span<const std::size_t> x_s, std::size_t action,
                               std::span<const std::size_t> x_next, double r, const AgentHyper& hyper);

/// D3 TD with linear quantile heads: semi-gradient descent on the quantile
/// Huber objective, differentiating only through Omega(s, j); the targets
/// r - Rbar + Omega(s', k) are constants.
StepTrace d3_fa_td_step(LinearReturnQuantiles& omega, QuantileSet& qs, std::span<const std::size_t> x_s,
                        std::span<const std::size_t> x_next, double r, const AgentHyper& hyper,
                        const HuberParams& huber);

/// D3 Q with linear heads per action; targets come from a* = argmax_a mean_j Omega(s', a, j).
StepTrace d3_fa_q_step(LinearReturnQuantiles& omega, QuantileSet& qs, std::span<const std::size_t> x_s,
                       std::size_t action, std::span<const std::size_t> x_next, double r,
                       const AgentHyper& hyper, const HuberParams& huber);

/// D3 actor-critic: critic as d3_fa_td_step; actor uses
/// delta = r - Rbar + mean_j Omega(s', j) - mean_j Omega(s, j).
StepTrace d3_actor_critic_step(LinearReturnQuantiles& omega, SoftmaxPolicy& policy, QuantileSet& qs,
                               std::span<const std::size_t> x_s, std::size_t action,
                               std::span<const std::size_t> x_next, double r, const AgentHyper& hyper,
                               const HuberParams& huber);

/// Differential actor-critic baseline with a scalar average-reward estimate:
/// rbar += eta_rbar alpha delta, then critic and actor as in D2.
StepTrace differential_actor_critic_step(std::span<double> w, double& rbar, SoftmaxPolicy& policy,
                                         std::span<const std::size_t> x_s, std::size_t action,
                                         std::span<const std::size_t> x_next, double r,
                                         const AgentHyper& hyper);

}  // namespace d2rl
