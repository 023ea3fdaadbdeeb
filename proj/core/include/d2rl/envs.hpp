#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "d2rl/finite_mdp.hpp"
#include "d2rl/random.hpp"

namespace d2rl {

template <class Obs>
struct EnvStep {
  double reward;
  Obs next_obs;
};

/// Continuing (never-terminating) environment with a finite action set.
template <class Obs>
class Environment {
 public:
  using Observation = Obs;

  virtual ~Environment() = default;
  virtual Obs reset(Rng& rng) = 0;
  virtual EnvStep<Obs> step(std::size_t action, Rng& rng) = 0;
  virtual std::size_t num_actions() const noexcept = 0;
};

/// Finite distribution over reals.
struct DiscreteDistribution {
  std::vector<double> values;
  std::vector<double> probs;

  static DiscreteDistribution uniform(std::vector<double> values);

  double mean() const noexcept;
  double sample(Rng& rng) const;
  /// Throws std::invalid_argument on size mismatch, negative mass or total != 1.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Red-pill blue-pill

enum class World : std::size_t { kRed = 0, kBlue = 1 };
enum class Pill : std::size_t { kRed = 0, kBlue = 1 };

struct RedPillBluePillConfig {
  DiscreteDistribution blue_reward = DiscreteDistribution::uniform({0.0, 1.0, 2.0});
  DiscreteDistribution red_reward = DiscreteDistribution::uniform({-2.0, -1.0, 0.0});
  /// When true the reward is drawn from the distribution of the state the
  /// pill leads to; otherwise from the state the pill was taken in.
  bool reward_on_arrival = true;
  World start = World::kRed;

  /// Both distributions valid and mean(blue) > mean(red).
  void validate() const;
};

/// The next world is the colour of the pill.
EnvStep<World> rpbp_step(World state, Pill action, const RedPillBluePillConfig& cfg, Rng& rng);

/// 2-state, 2-action FiniteMdp with the same one-step law as rpbp_step.
/// State/action indices follow the World/Pill enumerators.
FiniteMdp rpbp_as_finite_mdp(const RedPillBluePillConfig& cfg);

class RedPillBluePill final : public Environment<std::size_t> {
 public:
  explicit RedPillBluePill(RedPillBluePillConfig cfg = {});

  std::size_t reset(Rng& rng) override;
  EnvStep<std::size_t> step(std::size_t action, Rng& rng) override;
  std::size_t num_actions() const noexcept override { return 2; }

  const RedPillBluePillConfig& config() const noexcept { return cfg_; }

 private:
  RedPillBluePillConfig cfg_;
  World state_;
};

// ---------------------------------------------------------------------------
// Inverted pendulum (torque-limited, continuing)

struct PendulumState {
  double angle = 0.0;    ///< radians in [-pi, pi), 0 = upright
  double ang_vel = 0.0;  ///< rad/s in [-8, 8]
};

struct PendulumParams {
  double gravity = 9.8;
  double mass = 1.0;
  double length = 1.0;
  double dt = 0.05;
  double max_speed = 8.0;
  double init_noise = 0.05;
};

inline constexpr std::array<double, 3> kPendulumTorques{-2.0, 0.0, 2.0};

/// Maps any angle to [-pi, pi).
double wrap_angle(double angle) noexcept;

/// Quadratic cost of being in `state` while applying `torque`, negated.
double pendulum_reward(const PendulumState& state, double torque) noexcept;

/// One semi-implicit Euler step of
///   angle'' = 3g/(2l) sin(angle) + 3/(m l^2) u.
/// The velocity is updated and clipped first, then the angle advances with
/// the new velocity and is wrapped. The reward is the negated cost of the
/// state the action was taken in (so the upright rest point earns exactly 0).
EnvStep<PendulumState> pendulum_step(const PendulumState& state, std::size_t action,
                                     const PendulumParams& params = {});

class Pendulum final : public Environment<PendulumState> {
 public:
  explicit Pendulum(PendulumParams params = {}) : params_(params) {}

  /// Upright with uniform noise in [-init_noise, init_noise] on both coordinates.
  PendulumState reset(Rng& rng) override;
  EnvStep<PendulumState> step(std::size_t action, Rng& rng) override;
  std::size_t num_actions() const noexcept override { return kPendulumTorques.size(); }

  const PendulumState& state() const noexcept { return state_; }
  const PendulumParams& params() const noexcept { return params_; }

 private:
  PendulumParams params_;
  PendulumState state_;
};

// ---------------------------------------------------------------------------
// Generic finite MDPs

/// Samples transitions of an explicit FiniteMdp.
class FiniteMdpEnvironment final : public Environment<std::size_t> {
 public:
  explicit FiniteMdpEnvironment(FiniteMdp mdp, std::size_t start_state = 0);

  std::size_t reset(Rng& rng) override;
  EnvStep<std::size_t> step(std::size_t action, Rng& rng) override;
  std::size_t num_actions() const noexcept override { return mdp_.n_actions(); }

  const FiniteMdp& mdp() const noexcept { return mdp_; }
  std::size_t state() const noexcept { return state_; }

 private:
  struct Outcome {
    std::size_t next;
    double reward;
  };

  FiniteMdp mdp_;
  std::size_t start_;
  std::size_t state_;
  std::vector<std::vector<Outcome>> outcomes_;
  std::vector<std::vector<double>> weights_;
};

/// Random MDP that is communicating and unichain under every deterministic
/// policy. Each (s, a) gets a random successor set and random reward masses;
/// candidates are rejection-sampled until both structural checks pass.
/// Throws std::invalid_argument on zero sizes or an empty support.
FiniteMdp random_unichain_mdp(std::size_t n_states, std::size_t n_actions,
                              std::span<const double> reward_support, Rng& rng);

}  // namespace d2rl
