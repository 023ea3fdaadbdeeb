#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "d2rl/finite_mdp.hpp"
#include "d2rl/quantile.hpp"
#include "d2rl/values.hpp"

namespace d2rl {

/// Stationary Markov policy pi(a | s); rows sum to one.
class PolicyTable {
 public:
  PolicyTable(std::size_t n_states, std::size_t n_actions, std::vector<double> probs);

  static PolicyTable uniform(std::size_t n_states, std::size_t n_actions);
  static PolicyTable deterministic(std::size_t n_actions, std::span<const std::size_t> actions);
  /// Greedy action per state with probability 1 - epsilon + epsilon/|A|,
  /// every other action epsilon/|A|.
  static PolicyTable epsilon_greedy(std::size_t n_actions, std::span<const std::size_t> greedy,
                                    double epsilon);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  double operator()(std::size_t s, std::size_t a) const { return probs_.at(s * n_actions_ + a); }
  std::span<const double> row(std::size_t s) const {
    return std::span<const double>(probs_).subspan(s * n_actions_, n_actions_);
  }

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<double> probs_;
};

/// CDF of a finite distribution: cum[k] = P(R <= support[k]).
struct DiscreteCdf {
  std::vector<double> support;
  std::vector<double> cum;

  static DiscreteCdf from_masses(std::vector<double> support, std::span<const double> masses);

  double mass(std::size_t k) const { return k == 0 ? cum[0] : cum[k] - cum[k - 1]; }
  double mean() const;
  /// F(y) = P(R <= y).
  double operator()(double y) const;
  /// Throws std::invalid_argument unless monotone, ending at 1, with a strictly increasing support.
  void validate() const;
};

/// The set of tau-quantiles of a distribution: a single point unless the
/// CDF has a flat stretch exactly at level tau, in which case every y in
/// [lo, hi] is a tau-quantile.
struct QuantileInterval {
  double lo;
  double hi;

  bool contains(double x, double tolerance = 0.0) const noexcept {
    return x >= lo - tolerance && x <= hi + tolerance;
  }
  /// Distance from x to the interval (0 inside).
  double distance(double x) const noexcept { return x < lo ? lo - x : (x > hi ? x - hi : 0.0); }
};

/// Induced chain P_pi(s, s') = sum_a pi(a|s) p(s'|s,a), row-major.
std::vector<double> policy_transition_matrix(const FiniteMdp& mdp, const PolicyTable& policy);

/// Strongly connected components of a directed graph given by a dense
/// row-major adjacency (nonzero = edge). Returns one component id per node.
std::vector<std::size_t> strongly_connected_components(std::span<const double> adjacency, std::size_t n);

/// True iff the chain induced by `policy` has exactly one closed (recurrent) class.
bool check_unichain(const FiniteMdp& mdp, const PolicyTable& policy);

/// True iff the union over actions of the transition graphs is strongly connected.
bool check_communicating(const FiniteMdp& mdp);

/// Unique mu with mu P_pi = mu, sum mu = 1. Throws PreconditionError if the
/// policy is not unichain and NumericalFailure if the residual exceeds 1e-10.
std::vector<double> stationary_distribution(const FiniteMdp& mdp, const PolicyTable& policy);

/// Distribution of R_t as t -> infinity: mass(r) = sum_s mu(s) sum_a pi(a|s) sum_s' p(s', r | s, a).
DiscreteCdf limiting_reward_distribution(const FiniteMdp& mdp, const PolicyTable& policy);

/// Long-run average reward of `policy`.
double average_reward(const FiniteMdp& mdp, const PolicyTable& policy);

/// Quantile sets of `cdf` at every level of `grid`. Levels within 1e-12 of a
/// CDF value are treated as hitting a flat stretch.
std::vector<QuantileInterval> true_quantiles(const DiscreteCdf& cdf, const TauGrid& grid);

/// Generalized inverse F^{-1}(tau) evaluated on the grid, for distributions
/// known through their quantile function.
std::vector<double> point_quantiles(const std::function<double(double)>& quantile_function,
                                    const TauGrid& grid);

/// (TQ)(s, a) = sum_{s', r} p(s', r | s, a) (r + max_a' Q(s', a')).
QTable q_operator(const FiniteMdp& mdp, const QTable& q);

/// max(x) - min(x). Throws std::invalid_argument on an empty range.
double span(std::span<const double> x);

/// sp(TQ - Q).
double bellman_span(const FiniteMdp& mdp, const QTable& q);

struct RviOptions {
  double tolerance = 1e-10;
  std::uint64_t max_sweeps = 1'000'000;
  /// Weight of the Bellman backup in each sweep. Values below 1 apply the
  /// aperiodicity transformation, which keeps periodic optimal chains convergent.
  double damping = 0.5;
  std::size_t ref_state = 0;
  std::size_t ref_action = 0;
};

struct RviResult {
  QTable q_star;
  double rbar_star;
  std::uint64_t sweeps;
  double final_span;
};

/// Relative value iteration on the average-reward optimality equation.
///
/// Each sweep sets H = TQ - Q and Q <- Q + damping * (H - H(ref)), so the
/// reference entry's Bellman gap is subtracted as the offset. Iteration stops
/// when sp(TQ - Q) <= tolerance and reports rbar_star = H(ref).
/// Throws PreconditionError for non-communicating MDPs and NumericalFailure
/// when max_sweeps is exhausted.
RviResult relative_value_iteration(const FiniteMdp& mdp, const RviOptions& options = {});

/// max over (s, a) of |sum p(s', r|s, a) (r - rbar + max q(s', .)) - q(s, a)|.
double bellman_optimality_residual(const FiniteMdp& mdp, const QTable& q, double rbar);

/// Greedy (lowest-index tie-break) action per state.
std::vector<std::size_t> greedy_actions(const QTable& q);

/// Empirical quantiles of a sample at the grid levels: the smallest sample
/// value x with F_N(x) >= tau. Needs at least 10 samples per level; throws
/// std::invalid_argument otherwise.
std::vector<double> empirical_reward_quantiles(std::span<const double> rewards, const TauGrid& grid);

}  // namespace d2rl
