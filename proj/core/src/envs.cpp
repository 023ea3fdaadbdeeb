#include "d2rl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "d2rl/oracle.hpp"

namespace d2rl {

// ---------------------------------------------------------------------------
// DiscreteDistribution

DiscreteDistribution DiscreteDistribution::uniform(std::vector<double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw std::invalid_argument("DiscreteDistribution: no values");
  return {std::move(values), std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

double DiscreteDistribution::mean() const noexcept {
  double total = 0.0;
  for (std::size_t i = 0; i < values.size() && i < probs.size(); ++i) total += values[i] * probs[i];
  return total;
}

double DiscreteDistribution::sample(Rng& rng) const { return values[rng.discrete(probs)]; }

void DiscreteDistribution::validate() const {
  if (values.empty() || values.size() != probs.size())
    throw std::invalid_argument("DiscreteDistribution: values and probs must be nonempty and equal length");
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0) || !std::isfinite(values[i]))
      throw std::invalid_argument("DiscreteDistribution: negative mass or non-finite value");
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("DiscreteDistribution: masses do not sum to 1");
}

// ---------------------------------------------------------------------------
// Red-pill blue-pill

void RedPillBluePillConfig::validate() const {
  blue_reward.validate();
  red_reward.validate();
  if (!(blue_reward.mean() > red_reward.mean()))
    throw std::invalid_argument("RedPillBluePillConfig: the blue world must have the higher mean reward");
}

namespace {

const DiscreteDistribution& world_reward(World w, const RedPillBluePillConfig& cfg) {
  return w == World::kBlue ? cfg.blue_reward : cfg.red_reward;
}

World arrival(Pill p) { return p == Pill::kBlue ? World::kBlue : World::kRed; }

}  // namespace

EnvStep<World> rpbp_step(World state, Pill action, const RedPillBluePillConfig& cfg, Rng& rng) {
  const World next = arrival(action);
  const World paying = cfg.reward_on_arrival ? next : state;
  return {world_reward(paying, cfg).sample(rng), next};
}

FiniteMdp rpbp_as_finite_mdp(const RedPillBluePillConfig& cfg) {
  cfg.validate();
  std::vector<double> support;
  for (const auto* d : {&cfg.red_reward, &cfg.blue_reward})
    support.insert(support.end(), d->values.begin(), d->values.end());
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());

  FiniteMdp mdp(2, 2, support);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t a = 0; a < 2; ++a) {
      const World next = arrival(static_cast<Pill>(a));
      const World paying = cfg.reward_on_arrival ? next : static_cast<World>(s);
      const auto& dist = world_reward(paying, cfg);
      for (std::size_t i = 0; i < dist.values.size(); ++i) {
        const auto r = static_cast<std::size_t>(
            std::lower_bound(support.begin(), support.end(), dist.values[i]) - support.begin());
        const auto ns = static_cast<std::size_t>(next);
        mdp.set_probability(s, a, ns, r, mdp.probability(s, a, ns, r) + dist.probs[i]);
      }
    }
  mdp.validate();
  return mdp;
}

RedPillBluePill::RedPillBluePill(RedPillBluePillConfig cfg) : cfg_(std::move(cfg)), state_(cfg_.start) {
  cfg_.validate();
}

std::size_t RedPillBluePill::reset(Rng&) {
  state_ = cfg_.start;
  return static_cast<std::size_t>(state_);
}

EnvStep<std::size_t> RedPillBluePill::step(std::size_t action, Rng& rng) {
  if (action >= 2) throw std::out_of_range("RedPillBluePill: action out of range");
  const auto result = rpbp_step(state_, static_cast<Pill>(action), cfg_, rng);
  state_ = result.next_obs;
  return {result.reward, static_cast<std::size_t>(state_)};
}

// ---------------------------------------------------------------------------
// Pendulum

double wrap_angle(double angle) noexcept {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = angle - kTwoPi * std::floor((angle + std::numbers::pi) / kTwoPi);
  if (wrapped >= std::numbers::pi) wrapped -= kTwoPi;
  if (wrapped < -std::numbers::pi) wrapped += kTwoPi;
  return wrapped;
}

double pendulum_reward(const PendulumState& state, double torque) noexcept {
  const double angle = wrap_angle(state.angle);
  return -(angle * angle + 0.1 * state.ang_vel * state.ang_vel + 0.001 * torque * torque);
}

EnvStep<PendulumState> pendulum_step(const PendulumState& state, std::size_t action,
                                     const PendulumParams& params) {
  if (action >= kPendulumTorques.size()) throw std::out_of_range("pendulum_step: action out of range");
  const double u = kPendulumTorques[action];
  const double g = params.gravity;
  const double m = params.mass;
  const double l = params.length;

  const double reward = pendulum_reward(state, u);
  const double accel = 3.0 * g / (2.0 * l) * std::sin(state.angle) + 3.0 / (m * l * l) * u;
  PendulumState next;
  next.ang_vel = std::clamp(state.ang_vel + accel * params.dt, -params.max_speed, params.max_speed);
  next.angle = wrap_angle(state.angle + next.ang_vel * params.dt);
  return {reward, next};
}

PendulumState Pendulum::reset(Rng& rng) {
  state_.angle = rng.uniform(-params_.init_noise, params_.init_noise);
  state_.ang_vel = rng.uniform(-params_.init_noise, params_.init_noise);
  return state_;
}

EnvStep<PendulumState> Pendulum::step(std::size_t action, Rng&) {
  const auto result = pendulum_step(state_, action, params_);
  state_ = result.next_obs;
  return result;
}

// ---------------------------------------------------------------------------
// Finite MDPs

FiniteMdpEnvironment::FiniteMdpEnvironment(FiniteMdp mdp, std::size_t start_state)
    : mdp_(std::move(mdp)), start_(start_state), state_(start_state) {
  mdp_.validate();
  if (start_ >= mdp_.n_states()) throw std::invalid_argument("FiniteMdpEnvironment: start state out of range");
  const std::size_t pairs = mdp_.n_states() * mdp_.n_actions();
  outcomes_.resize(pairs);
  weights_.resize(pairs);
  for (std::size_t s = 0; s < mdp_.n_states(); ++s)
    for (std::size_t a = 0; a < mdp_.n_actions(); ++a) {
      const std::size_t k = s * mdp_.n_actions() + a;
      for (std::size_t next = 0; next < mdp_.n_states(); ++next)
        for (std::size_t r = 0; r < mdp_.n_rewards(); ++r) {
          const double p = mdp_.probability(s, a, next, r);
          if (p > 0.0) {
            outcomes_[k].push_back({next, mdp_.reward_support()[r]});
            weights_[k].push_back(p);
          }
        }
    }
}

std::size_t FiniteMdpEnvironment::reset(Rng&) {
  state_ = start_;
  return state_;
}

EnvStep<std::size_t> FiniteMdpEnvironment::step(std::size_t action, Rng& rng) {
  if (action >= mdp_.n_actions()) throw std::out_of_range("FiniteMdpEnvironment: action out of range");
  const std::size_t k = state_ * mdp_.n_actions() + action;
  const auto& o = outcomes_[k][rng.discrete(weights_[k])];
  state_ = o.next;
  return {o.reward, o.next};
}

namespace {

bool unichain_under_all_deterministic(const FiniteMdp& mdp) {
  const std::size_t n = mdp.n_states();
  const std::size_t k = mdp.n_actions();
  std::vector<std::size_t> actions(n, 0);
  while (true) {
    if (!check_unichain(mdp, PolicyTable::deterministic(k, actions))) return false;
    std::size_t i = 0;
    while (i < n && ++actions[i] == k) actions[i++] = 0;
    if (i == n) return true;
  }
}

}  // namespace

FiniteMdp random_unichain_mdp(std::size_t n_states, std::size_t n_actions,
                              std::span<const double> reward_support, Rng& rng) {
  if (n_states == 0 || n_actions == 0) throw std::invalid_argument("random_unichain_mdp: sizes must be positive");
  if (reward_support.empty()) throw std::invalid_argument("random_unichain_mdp: empty reward support");
  double policies = 1.0;
  for (std::size_t i = 0; i < n_states; ++i) policies *= static_cast<double>(n_actions);
  if (policies > 1e6)
    throw std::invalid_argument("random_unichain_mdp: too many deterministic policies to verify");

  const std::vector<double> support(reward_support.begin(), reward_support.end());
  const std::size_t n_rewards = support.size();
  for (int attempt = 0; attempt < 100000; ++attempt) {
    FiniteMdp mdp(n_states, n_actions, support);
    for (std::size_t s = 0; s < n_states; ++s)
      for (std::size_t a = 0; a < n_actions; ++a) {
        // Random successor set of size 1..n_states, random reward masses on each.
        const std::size_t fanout = 1 + rng.uniform_index(n_states);
        std::vector<std::size_t> states(n_states);
        std::iota(states.begin(), states.end(), std::size_t{0});
        for (std::size_t i = 0; i < fanout; ++i) std::swap(states[i], states[i + rng.uniform_index(n_states - i)]);
        std::vector<double> weight(n_states * n_rewards, 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < fanout; ++i) {
          const std::size_t rewards_here = 1 + rng.uniform_index(std::min<std::size_t>(n_rewards, 3));
          for (std::size_t j = 0; j < rewards_here; ++j) {
            const double w = 0.05 + rng.uniform01();
            weight[states[i] * n_rewards + rng.uniform_index(n_rewards)] += w;
            total += w;
          }
        }
        // Normalize, then fold the rounding residue into the largest entry.
        std::size_t biggest = 0;
        double sum = 0.0;
        for (std::size_t i = 0; i < weight.size(); ++i) {
          weight[i] /= total;
          sum += weight[i];
          if (weight[i] > weight[biggest]) biggest = i;
        }
        weight[biggest] += 1.0 - sum;
        for (std::size_t i = 0; i < weight.size(); ++i)
          if (weight[i] > 0.0) mdp.set_probability(s, a, i / n_rewards, i % n_rewards, weight[i]);
      }
    if (check_communicating(mdp) && unichain_under_all_deterministic(mdp)) {
      mdp.validate();
      return mdp;
    }
  }
  throw std::runtime_error("random_unichain_mdp: rejection sampling did not find a unichain MDP");
}

}  // namespace d2rl
