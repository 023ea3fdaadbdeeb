#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "d2rl/envs.hpp"
#include "d2rl/linear.hpp"
#include "d2rl/oracle.hpp"
#include "d2rl/quantile.hpp"
#include "d2rl/random.hpp"
#include "d2rl/tabular.hpp"
#include "d2rl/values.hpp"

namespace d2rl {

/// A parameter block as written to table snapshots.
struct NamedTable {
  std::string name;
  std::vector<double> values;
};

/// Uniform step interface over every learning agent. `act` draws from the
/// agent's behavior policy; `learn` applies one update for the transition
/// (s, a, r, s'). The step size of update t is schedule(t).
template <class Obs>
class Agent {
 public:
  using Observation = Obs;

  virtual ~Agent() = default;

  virtual std::string_view name() const noexcept = 0;
  virtual std::size_t act(const Obs& s, Rng& rng) = 0;
  virtual StepTrace learn(const Obs& s, std::size_t a, double r, const Obs& next) = 0;

  /// Rbar for the D2/D3 agents (mean of the reward quantiles), the scalar
  /// estimate for the baselines.
  virtual double average_reward_estimate() const = 0;
  /// Per-step reward quantile estimates theta; empty for the baselines.
  virtual std::vector<double> reward_quantiles() const = 0;
  /// Omega(s, a, .) for the D3 agents; empty otherwise. State-valued agents ignore `a`.
  virtual std::vector<double> return_quantiles(const Obs&, std::size_t) const { return {}; }
  virtual std::vector<NamedTable> tables() const = 0;

  std::uint64_t updates() const noexcept { return updates_; }

 protected:
  Agent(AgentHyper hyper, StepSchedule schedule) : hyper_(hyper), schedule_(schedule) { hyper_.validate(); }

  /// Hyperparameters with alpha set for the next update; advances the counter.
  const AgentHyper& next_hyper() {
    hyper_.alpha = schedule_(updates_++);
    return hyper_;
  }

  AgentHyper hyper_;
  StepSchedule schedule_;
  std::uint64_t updates_ = 0;
};

using TabularAgent = Agent<std::size_t>;
using PendulumAgent = Agent<PendulumState>;

// ---------------------------------------------------------------------------
// Tabular

class D2QAgent final : public TabularAgent {
 public:
  D2QAgent(std::size_t n_states, std::size_t n_actions, std::size_t m, AgentHyper hyper, StepSchedule schedule);

  std::string_view name() const noexcept override { return "d2_q"; }
  std::size_t act(const std::size_t& s, Rng& rng) override;
  StepTrace learn(const std::size_t& s, std::size_t a, double r, const std::size_t& next) override;
  double average_reward_estimate() const override { return mean_of_quantiles(qs_); }
  std::vector<double> reward_quantiles() const override { return {qs_.thetas().begin(), qs_.thetas().end()}; }
  std::vector<NamedTable> tables() const override;

  const QTable& q() const noexcept { return q_; }
  const QuantileSet& quantiles() const noexcept { return qs_; }

 private:
  QTable q_;
  QuantileSet qs_;
};

/// Prediction agent: follows a fixed policy table.
class D2TdAgent final : public TabularAgent {
 public:
  D2TdAgent(PolicyTable policy, std::size_t m, AgentHyper hyper, StepSchedule schedule);

  std::string_view name() const noexcept override { return "d2_td"; }
  std::size_t act(const std::size_t& s, Rng& rng) override;
  StepTrace learn(const std::size_t& s, std::size_t a, double r, const std::size_t& next) override;
  double average_reward_estimate() const override { return mean_of_quantiles(qs_); }
  std::vector<double> reward_quantiles() const override { return {qs_.thetas().begin(), qs_.thetas().end()}; }
  std::vector<NamedTable> tables() const override;

  const VTable& v() const noexcept { return v_; }

 private:
  PolicyTable policy_;
  VTable v_;
  QuantileSet qs_;
};

class D3QAgent final : public TabularAgent {
 public:
  D3QAgent(std::size_t n_states, std::size_t n_actions, std::size_t m, std::size_t n, AgentHyper hyper,
           StepSchedule schedule);

  std::string_view name() const noexcept override { return "d3_q"; }
  std::size_t act(const std::size_t& s, Rng& rng) override;
  StepTrace learn(const std::size_t& s, std::size_t a, double r, const std::size_t& next) override;
  double average_reward_estimate() const override { return mean_of_quantiles(qs_); }
  std::vector<double> reward_quantiles() const override { return {qs_.thetas().begin(), qs_.thetas().end()}; }
  std::vector<double> return_quantiles(const std::size_t& s, std::size_t a) const override;
  std::vector<NamedTable> tables() const override;

  const ReturnQuantileTable& omega() const noexcept { return omega_; }
  /// Greedy action on the mean of Omega(s, .).
  std::size_t greedy(std::size_t s) const { return argmax(omega_.action_means(s)); }

 private:
  ReturnQuantileTable omega_;
  QuantileSet qs_;
};

class D3TdAgent final : public TabularAgent {
 public:
  D3TdAgent(PolicyTable policy, std::size_t m, std::size_t n, AgentHyper hyper, StepSchedule schedule);

  std::string_view name() const noexcept override { return "d3_td"; }
  std::size_t act(const std::size_t& s, Rng& rng) override;
  StepTrace learn(const std::size_t& s, std::size_t a, double r, const std::size_t& next) override;
  double average_reward_estimate() const override { return mean_of_quantiles(qs_); }
  std::vector<double> reward_quantiles() const override { return {qs_.thetas().begin(), qs_.thetas().end()}; }
  std::vector<double> return_quantiles(const std::size_t& s, std::size_t a) const override;
  std::vector<NamedTable> tables() const override;

  const ReturnQuantileTable& omega() const noexcept { return omega_; }

 private:
  PolicyTable policy_;
  ReturnQuantileTable omega_;
  QuantileSet qs_;
};

class DifferentialQAgent final : public TabularAgent {
 public:
  DifferentialQAgent(std::size_t n_states, std::size_t n_actions, AgentHyper hyper, StepSchedule schedule);

  std::string_view name() const noexcept override { return "diff_q"; }
  std::size_t act(const std::size_t& s, Rng& rng) override;
  StepTrace learn(const std::size_t& s, std::size_t a, double r, const std::size_t& next) override;
  double average_reward_estimate() const override { return rbar_; }
  std::vector<double> reward_quantiles() const override { return {}; }
  std::vector<NamedTable> tables() const override;

  const QTable& q() const noexcept { return q_; }

 private:
  QTable q_;
  double rbar_ = 0.0;
};

// ---------------------------------------------------------------------------
// Pendulum actor-critics (tile-coded critic, softmax actor)

class D2ActorCriticAgent final : public PendulumAgent {
 public:
  D2ActorCriticAgent(TileCoder coder, std::size_t n_actions, std::size_t m, AgentHyper hyper,
                     StepSchedule schedule);

  std::string_view name() const noexcept override { return "d2_ac"; }
  std::size_t act(const PendulumState& s, Rng& rng) override;
  StepTrace learn(const PendulumState& s, std::size_t a, double r, const PendulumState& next) override;
  double average_reward_estimate() const override { return mean_of_quantiles(qs_); }
  std::vector<double> reward_quantiles() const override { return {qs_.thetas().begin(), qs_.thetas().end()}; }
  std::vector<NamedTable> tables() const override;

  const SoftmaxPolicy& policy() const noexcept { return policy_; }
  const TileCoder& coder() const noexcept { return coder_; }

 private:
  TileCoder coder_;
  std::vector<double> w_;
  SoftmaxPolicy policy_;
  QuantileSet qs_;
  ActiveSet x_s_, x_next_;
};

class D3ActorCriticAgent final : public PendulumAgent {
 public:
  D3ActorCriticAgent(TileCoder coder, std::size_t n_actions, std::size_t m, std::size_t n, AgentHyper hyper,
                     StepSchedule schedule, HuberParams huber = {});

  std::string_view name() const noexcept override { return "d3_ac"; }
  std::size_t act(const PendulumState& s, Rng& rng) override;
  StepTrace learn(const PendulumState& s, std::size_t a, double r, const PendulumState& next) override;
  double average_reward_estimate() const override { return mean_of_quantiles(qs_); }
  std::vector<double> reward_quantiles() const override { return {qs_.thetas().begin(), qs_.thetas().end()}; }
  std::vector<double> return_quantiles(const PendulumState& s, std::size_t a) const override;
  std::vector<NamedTable> tables() const override;

  const SoftmaxPolicy& policy() const noexcept { return policy_; }

 private:
  TileCoder coder_;
  LinearReturnQuantiles omega_;
  SoftmaxPolicy policy_;
  QuantileSet qs_;
  HuberParams huber_;
  ActiveSet x_s_, x_next_;
};

class DifferentialActorCriticAgent final : public PendulumAgent {
 public:
  DifferentialActorCriticAgent(TileCoder coder, std::size_t n_actions, AgentHyper hyper, StepSchedule schedule);

  std::string_view name() const noexcept override { return "diff_ac"; }
  std::size_t act(const PendulumState& s, Rng& rng) override;
  StepTrace learn(const PendulumState& s, std::size_t a, double r, const PendulumState& next) override;
  double average_reward_estimate() const override { return rbar_; }
  std::vector<double> reward_quantiles() const override { return {}; }
  std::vector<NamedTable> tables() const override;

  const SoftmaxPolicy& policy() const noexcept { return policy_; }

 private:
  TileCoder coder_;
  std::vector<double> w_;
  SoftmaxPolicy policy_;
  double rbar_ = 0.0;
  ActiveSet x_s_, x_next_;
};

}  // namespace d2rl
