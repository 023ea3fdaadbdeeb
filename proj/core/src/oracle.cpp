#include "d2rl/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "d2rl/errors.hpp"
#include "d2rl/text.hpp"

namespace d2rl {
namespace {

constexpr double kLevelTolerance = 1e-12;
constexpr double kStationaryResidual = 1e-10;

}  // namespace

// ---------------------------------------------------------------------------
// PolicyTable

PolicyTable::PolicyTable(std::size_t n_states, std::size_t n_actions, std::vector<double> probs)
    : n_states_(n_states), n_actions_(n_actions), probs_(std::move(probs)) {
  if (n_states_ == 0 || n_actions_ == 0) throw std::invalid_argument("PolicyTable: empty shape");
  if (probs_.size() != n_states_ * n_actions_) throw std::invalid_argument("PolicyTable: size mismatch");
  for (std::size_t s = 0; s < n_states_; ++s) {
    double total = 0.0;
    for (double p : row(s)) {
      if (!(p >= 0.0)) throw std::invalid_argument("PolicyTable: negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("PolicyTable: row " + std::to_string(s) + " does not sum to 1");
  }
}

PolicyTable PolicyTable::uniform(std::size_t n_states, std::size_t n_actions) {
  return PolicyTable(n_states, n_actions,
                     std::vector<double>(n_states * n_actions, 1.0 / static_cast<double>(n_actions)));
}

PolicyTable PolicyTable::deterministic(std::size_t n_actions, std::span<const std::size_t> actions) {
  return epsilon_greedy(n_actions, actions, 0.0);
}

PolicyTable PolicyTable::epsilon_greedy(std::size_t n_actions, std::span<const std::size_t> greedy,
                                        double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("PolicyTable: epsilon outside [0, 1]");
  if (n_actions == 0) throw std::invalid_argument("PolicyTable: no actions");
  const double explore = epsilon / static_cast<double>(n_actions);
  std::vector<double> probs(greedy.size() * n_actions, explore);
  for (std::size_t s = 0; s < greedy.size(); ++s) {
    if (greedy[s] >= n_actions) throw std::invalid_argument("PolicyTable: action out of range");
    probs[s * n_actions + greedy[s]] += 1.0 - epsilon;
  }
  return PolicyTable(greedy.size(), n_actions, std::move(probs));
}

// ---------------------------------------------------------------------------
// DiscreteCdf

DiscreteCdf DiscreteCdf::from_masses(std::vector<double> support, std::span<const double> masses) {
  if (support.size() != masses.size() || support.empty())
    throw std::invalid_argument("DiscreteCdf: support and masses must be nonempty and equal length");
  DiscreteCdf cdf;
  cdf.support = std::move(support);
  cdf.cum.resize(masses.size());
  double running = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    running += masses[k];
    cdf.cum[k] = running;
  }
  cdf.validate();
  cdf.cum.back() = 1.0;
  return cdf;
}

double DiscreteCdf::mean() const {
  double total = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) total += support[k] * mass(k);
  return total;
}

double DiscreteCdf::operator()(double y) const {
  const auto it = std::upper_bound(support.begin(), support.end(), y);
  if (it == support.begin()) return 0.0;
  return cum[static_cast<std::size_t>(it - support.begin()) - 1];
}

void DiscreteCdf::validate() const {
  if (support.empty() || support.size() != cum.size())
    throw std::invalid_argument("DiscreteCdf: support and cum must be nonempty and equal length");
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (k > 0 && !(support[k - 1] < support[k]))
      throw std::invalid_argument("DiscreteCdf: support must be strictly increasing");
    if (cum[k] < -kLevelTolerance || (k > 0 && cum[k] < cum[k - 1] - kLevelTolerance))
      throw std::invalid_argument("DiscreteCdf: cumulative masses must be nondecreasing");
  }
  if (std::abs(cum.back() - 1.0) > kLevelTolerance)
    throw std::invalid_argument("DiscreteCdf: total mass " + text::format_double(cum.back()) + " != 1");
}

// ---------------------------------------------------------------------------
// Chain structure

std::vector<double> policy_transition_matrix(const FiniteMdp& mdp, const PolicyTable& policy) {
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions())
    throw std::invalid_argument("policy shape does not match the MDP");
  const std::size_t n = mdp.n_states();
  std::vector<double> p(n * n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      const double w = policy(s, a);
      if (w == 0.0) continue;
      for (std::size_t next = 0; next < n; ++next) p[s * n + next] += w * mdp.transition(s, a, next);
    }
  return p;
}

std::vector<std::size_t> strongly_connected_components(std::span<const double> adjacency, std::size_t n) {
  if (adjacency.size() != n * n) throw std::invalid_argument("adjacency must be n x n");
  // Iterative Tarjan.
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0), component(n, kUnvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next neighbour to try)
  std::size_t counter = 0;
  std::size_t n_components = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next == 0 && index[v] == kUnvisited) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      bool descended = false;
      while (next < n) {
        const std::size_t w = next++;
        if (adjacency[v * n + w] == 0.0) continue;
        if (index[w] == kUnvisited) {
          call.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component[w] = n_components;
        } while (w != v);
        ++n_components;
      }
      const std::size_t finished = v;
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return component;
}

namespace {

std::size_t count_closed_classes(std::span<const double> p, std::size_t n) {
  const auto comp = strongly_connected_components(p, n);
  const std::size_t n_comp = *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<bool> leaks(n_comp, false);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (p[i * n + j] != 0.0 && comp[i] != comp[j]) leaks[comp[i]] = true;
  return static_cast<std::size_t>(std::count(leaks.begin(), leaks.end(), false));
}

}  // namespace

bool check_unichain(const FiniteMdp& mdp, const PolicyTable& policy) {
  const auto p = policy_transition_matrix(mdp, policy);
  return count_closed_classes(p, mdp.n_states()) == 1;
}

bool check_communicating(const FiniteMdp& mdp) {
  const std::size_t n = mdp.n_states();
  std::vector<double> adjacency(n * n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t a = 0; a < mdp.n_actions(); ++a)
      for (std::size_t next = 0; next < n; ++next)
        if (mdp.transition(s, a, next) > 0.0) adjacency[s * n + next] = 1.0;
  const auto comp = strongly_connected_components(adjacency, n);
  return std::all_of(comp.begin(), comp.end(), [&](std::size_t c) { return c == comp[0]; });
}

// ---------------------------------------------------------------------------
// Stationary quantities

std::vector<double> stationary_distribution(const FiniteMdp& mdp, const PolicyTable& policy) {
  if (!check_unichain(mdp, policy))
    throw PreconditionError("stationary_distribution: the induced chain is not unichain");
  const std::size_t n = mdp.n_states();
  const auto p = policy_transition_matrix(mdp, policy);

  // Solve [P^T - I; 1^T] mu = [0; 1].
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = p[i * n + j] - (i == j ? 1.0 : 0.0);
  a.row(static_cast<Eigen::Index>(n)).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + 1));
  b(static_cast<Eigen::Index>(n)) = 1.0;
  const Eigen::VectorXd solution = a.colPivHouseholderQr().solve(b);

  std::vector<double> mu(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = solution(static_cast<Eigen::Index>(i));
    if (v < 0.0 && v > -kStationaryResidual) v = 0.0;
    mu[i] = v;
  }

  double worst = std::abs(std::accumulate(mu.begin(), mu.end(), 0.0) - 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    double flow = 0.0;
    for (std::size_t i = 0; i < n; ++i) flow += mu[i] * p[i * n + j];
    worst = std::max(worst, std::abs(flow - mu[j]));
    if (mu[j] < 0.0) worst = std::max(worst, -mu[j]);
  }
  if (worst > kStationaryResidual)
    throw NumericalFailure("stationary_distribution: residual " + text::format_double(worst) +
                           " exceeds 1e-10");
  return mu;
}

DiscreteCdf limiting_reward_distribution(const FiniteMdp& mdp, const PolicyTable& policy) {
  const auto mu = stationary_distribution(mdp, policy);
  std::vector<double> masses(mdp.n_rewards(), 0.0);
  for (std::size_t s = 0; s < mdp.n_states(); ++s)
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      const double w = mu[s] * policy(s, a);
      if (w == 0.0) continue;
      for (std::size_t next = 0; next < mdp.n_states(); ++next)
        for (std::size_t r = 0; r < mdp.n_rewards(); ++r) masses[r] += w * mdp.probability(s, a, next, r);
    }
  const auto support = mdp.reward_support();
  return DiscreteCdf::from_masses(std::vector<double>(support.begin(), support.end()), masses);
}

double average_reward(const FiniteMdp& mdp, const PolicyTable& policy) {
  return limiting_reward_distribution(mdp, policy).mean();
}

std::vector<QuantileInterval> true_quantiles(const DiscreteCdf& cdf, const TauGrid& grid) {
  cdf.validate();
  std::vector<QuantileInterval> out;
  out.reserve(grid.size());
  const std::size_t last = cdf.support.size() - 1;
  for (double tau : grid.taus()) {
    std::size_t k = 0;
    while (k < last && cdf.cum[k] < tau - kLevelTolerance) ++k;
    QuantileInterval q{cdf.support[k], cdf.support[k]};
    if (std::abs(cdf.cum[k] - tau) <= kLevelTolerance) {
      std::size_t j = k + 1;
      while (j < last && cdf.cum[j] <= tau + kLevelTolerance) ++j;
      if (j <= last) q.hi = cdf.support[j];
    }
    out.push_back(q);
  }
  return out;
}

std::vector<double> point_quantiles(const std::function<double(double)>& quantile_function,
                                    const TauGrid& grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double tau : grid.taus()) out.push_back(quantile_function(tau));
  return out;
}

// ---------------------------------------------------------------------------
// Control

QTable q_operator(const FiniteMdp& mdp, const QTable& q) {
  if (q.n_states() != mdp.n_states() || q.n_actions() != mdp.n_actions())
    throw std::invalid_argument("q_operator: table shape does not match the MDP");
  std::vector<double> best(mdp.n_states());
  for (std::size_t s = 0; s < mdp.n_states(); ++s) best[s] = q.max(s);
  QTable out(mdp.n_states(), mdp.n_actions());
  for (std::size_t s = 0; s < mdp.n_states(); ++s)
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      double total = 0.0;
      for (std::size_t next = 0; next < mdp.n_states(); ++next)
        for (std::size_t r = 0; r < mdp.n_rewards(); ++r) {
          const double p = mdp.probability(s, a, next, r);
          if (p != 0.0) total += p * (mdp.reward_support()[r] + best[next]);
        }
      out(s, a) = total;
    }
  return out;
}

double span(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("span: empty vector");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

double bellman_span(const FiniteMdp& mdp, const QTable& q) {
  const QTable tq = q_operator(mdp, q);
  std::vector<double> gap(tq.flat().size());
  for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = tq.flat()[i] - q.flat()[i];
  return span(gap);
}

RviResult relative_value_iteration(const FiniteMdp& mdp, const RviOptions& options) {
  if (!check_communicating(mdp))
    throw PreconditionError("relative_value_iteration: the MDP is not communicating");
  if (!(options.damping > 0.0 && options.damping <= 1.0))
    throw std::invalid_argument("relative_value_iteration: damping must lie in (0, 1]");
  QTable q(mdp.n_states(), mdp.n_actions());
  std::vector<double> gap(q.flat().size());
  const std::size_t ref = options.ref_state * mdp.n_actions() + options.ref_action;
  if (ref >= gap.size()) throw std::invalid_argument("relative_value_iteration: reference out of range");

  double current_span = std::numeric_limits<double>::infinity();
  for (std::uint64_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    const QTable tq = q_operator(mdp, q);
    for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = tq.flat()[i] - q.flat()[i];
    current_span = span(gap);
    if (current_span <= options.tolerance) return RviResult{q, gap[ref], sweep, current_span};
    const double offset = gap[ref];
    auto values = q.flat();
    for (std::size_t i = 0; i < gap.size(); ++i) values[i] += options.damping * (gap[i] - offset);
  }
  throw NumericalFailure("relative_value_iteration: no convergence after " +
                         std::to_string(options.max_sweeps) + " sweeps (span " +
                         text::format_double(current_span) + ")");
}

double bellman_optimality_residual(const FiniteMdp& mdp, const QTable& q, double rbar) {
  const QTable tq = q_operator(mdp, q);
  double worst = 0.0;
  for (std::size_t i = 0; i < tq.flat().size(); ++i)
    worst = std::max(worst, std::abs(tq.flat()[i] - rbar - q.flat()[i]));
  return worst;
}

std::vector<std::size_t> greedy_actions(const QTable& q) {
  std::vector<std::size_t> out(q.n_states());
  for (std::size_t s = 0; s < q.n_states(); ++s) out[s] = q.greedy(s);
  return out;
}

std::vector<double> empirical_reward_quantiles(std::span<const double> rewards, const TauGrid& grid) {
  if (rewards.size() < 10 * grid.size())
    throw std::invalid_argument("empirical_reward_quantiles: need at least 10 samples per quantile level");
  std::vector<double> sorted(rewards.begin(), rewards.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<double> out;
  out.reserve(grid.size());
  for (double tau : grid.taus()) {
    // Smallest k (1-based) with k / n >= tau.
    auto k = static_cast<std::size_t>(std::max(1.0, std::floor(tau * n) - 1.0));
    while (static_cast<double>(k) / n < tau - kLevelTolerance) ++k;
    out.push_back(sorted[std::min(k, sorted.size()) - 1]);
  }
  return out;
}

}  // namespace d2rl
