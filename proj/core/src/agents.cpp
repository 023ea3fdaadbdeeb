#include "d2rl/agents.hpp"

#include <stdexcept>

namespace d2rl {

namespace {

std::vector<double> copy(std::span<const double> values) { return {values.begin(), values.end()}; }

std::size_t sample_policy(const PolicyTable& policy, std::size_t s, Rng& rng) {
  return rng.discrete(policy.row(s));
}

}  // namespace

// ---------------------------------------------------------------------------
// Tabular

D2QAgent::D2QAgent(std::size_t n_states, std::size_t n_actions, std::size_t m, AgentHyper hyper,
                   StepSchedule schedule)
    : TabularAgent(hyper, schedule), q_(n_states, n_actions), qs_(TauGrid(m)) {}

std::size_t D2QAgent::act(const std::size_t& s, Rng& rng) {
  return epsilon_greedy(q_.row(s), hyper_.epsilon, rng);
}

StepTrace D2QAgent::learn(const std::size_t& s, std::size_t a, double r, const std::size_t& next) {
  return d2_q_step(q_, qs_, s, a, r, next, next_hyper());
}

std::vector<NamedTable> D2QAgent::tables() const {
  return {{"q", copy(q_.flat())}, {"theta", copy(qs_.thetas())}};
}

D2TdAgent::D2TdAgent(PolicyTable policy, std::size_t m, AgentHyper hyper, StepSchedule schedule)
    : TabularAgent(hyper, schedule), policy_(std::move(policy)), v_(policy_.n_states()), qs_(TauGrid(m)) {}

std::size_t D2TdAgent::act(const std::size_t& s, Rng& rng) { return sample_policy(policy_, s, rng); }

StepTrace D2TdAgent::learn(const std::size_t& s, std::size_t, double r, const std::size_t& next) {
  return d2_td_step(v_, qs_, s, r, next, next_hyper());
}

std::vector<NamedTable> D2TdAgent::tables() const {
  return {{"v", copy(v_.flat())}, {"theta", copy(qs_.thetas())}};
}

D3QAgent::D3QAgent(std::size_t n_states, std::size_t n_actions, std::size_t m, std::size_t n, AgentHyper hyper,
                   StepSchedule schedule)
    : TabularAgent(hyper, schedule), omega_(n_states, n_actions, n), qs_(TauGrid(m)) {}

std::size_t D3QAgent::act(const std::size_t& s, Rng& rng) {
  return epsilon_greedy(omega_.action_means(s), hyper_.epsilon, rng);
}

StepTrace D3QAgent::learn(const std::size_t& s, std::size_t a, double r, const std::size_t& next) {
  return d3_q_step(omega_, qs_, s, a, r, next, next_hyper());
}

std::vector<double> D3QAgent::return_quantiles(const std::size_t& s, std::size_t a) const {
  return copy(omega_.cell(s, a));
}

std::vector<NamedTable> D3QAgent::tables() const {
  return {{"omega", copy(omega_.flat())}, {"theta", copy(qs_.thetas())}};
}

D3TdAgent::D3TdAgent(PolicyTable policy, std::size_t m, std::size_t n, AgentHyper hyper, StepSchedule schedule)
    : TabularAgent(hyper, schedule),
      policy_(std::move(policy)),
      omega_(policy_.n_states(), 1, n),
      qs_(TauGrid(m)) {}

std::size_t D3TdAgent::act(const std::size_t& s, Rng& rng) { return sample_policy(policy_, s, rng); }

StepTrace D3TdAgent::learn(const std::size_t& s, std::size_t, double r, const std::size_t& next) {
  return d3_td_step(omega_, qs_, s, r, next, next_hyper());
}

std::vector<double> D3TdAgent::return_quantiles(const std::size_t& s, std::size_t) const {
  return copy(omega_.cell(s));
}

std::vector<NamedTable> D3TdAgent::tables() const {
  return {{"omega", copy(omega_.flat())}, {"theta", copy(qs_.thetas())}};
}

DifferentialQAgent::DifferentialQAgent(std::size_t n_states, std::size_t n_actions, AgentHyper hyper,
                                       StepSchedule schedule)
    : TabularAgent(hyper, schedule), q_(n_states, n_actions) {}

std::size_t DifferentialQAgent::act(const std::size_t& s, Rng& rng) {
  return epsilon_greedy(q_.row(s), hyper_.epsilon, rng);
}

StepTrace DifferentialQAgent::learn(const std::size_t& s, std::size_t a, double r, const std::size_t& next) {
  return differential_q_step(q_, rbar_, s, a, r, next, next_hyper());
}

std::vector<NamedTable> DifferentialQAgent::tables() const {
  return {{"q", copy(q_.flat())}, {"rbar", {rbar_}}};
}

// ---------------------------------------------------------------------------
// Pendulum

namespace {

void encode(const TileCoder& coder, const PendulumState& s, ActiveSet& out) {
  const double coords[2] = {s.angle, s.ang_vel};
  coder.active(coords, out);
}

}  // namespace

D2ActorCriticAgent::D2ActorCriticAgent(TileCoder coder, std::size_t n_actions, std::size_t m, AgentHyper hyper,
                                       StepSchedule schedule)
    : PendulumAgent(hyper, schedule),
      coder_(std::move(coder)),
      w_(coder_.num_features(), 0.0),
      policy_(n_actions, coder_.num_features()),
      qs_(TauGrid(m)) {}

std::size_t D2ActorCriticAgent::act(const PendulumState& s, Rng& rng) {
  encode(coder_, s, x_s_);
  return policy_.sample(x_s_, rng);
}

StepTrace D2ActorCriticAgent::learn(const PendulumState& s, std::size_t a, double r, const PendulumState& next) {
  encode(coder_, s, x_s_);
  encode(coder_, next, x_next_);
  return d2_actor_critic_step(w_, policy_, qs_, x_s_, a, x_next_, r, next_hyper());
}

std::vector<NamedTable> D2ActorCriticAgent::tables() const {
  return {{"w", w_}, {"u", policy_.weights()}, {"theta", copy(qs_.thetas())}};
}

D3ActorCriticAgent::D3ActorCriticAgent(TileCoder coder, std::size_t n_actions, std::size_t m, std::size_t n,
                                       AgentHyper hyper, StepSchedule schedule, HuberParams huber)
    : PendulumAgent(hyper, schedule),
      coder_(std::move(coder)),
      omega_(1, n, coder_.num_features()),
      policy_(n_actions, coder_.num_features()),
      qs_(TauGrid(m)),
      huber_(huber) {
  huber_.validate();
}

std::size_t D3ActorCriticAgent::act(const PendulumState& s, Rng& rng) {
  encode(coder_, s, x_s_);
  return policy_.sample(x_s_, rng);
}

StepTrace D3ActorCriticAgent::learn(const PendulumState& s, std::size_t a, double r, const PendulumState& next) {
  encode(coder_, s, x_s_);
  encode(coder_, next, x_next_);
  return d3_actor_critic_step(omega_, policy_, qs_, x_s_, a, x_next_, r, next_hyper(), huber_);
}

std::vector<double> D3ActorCriticAgent::return_quantiles(const PendulumState& s, std::size_t) const {
  ActiveSet x;
  encode(coder_, s, x);
  return omega_.values(x);
}

std::vector<NamedTable> D3ActorCriticAgent::tables() const {
  return {{"omega", omega_.weights()}, {"u", policy_.weights()}, {"theta", copy(qs_.thetas())}};
}

DifferentialActorCriticAgent::DifferentialActorCriticAgent(TileCoder coder, std::size_t n_actions,
                                                           AgentHyper hyper, StepSchedule schedule)
    : PendulumAgent(hyper, schedule),
      coder_(std::move(coder)),
      w_(coder_.num_features(), 0.0),
      policy_(n_actions, coder_.num_features()) {}

std::size_t DifferentialActorCriticAgent::act(const PendulumState& s, Rng& rng) {
  encode(coder_, s, x_s_);
  return policy_.sample(x_s_, rng);
}

StepTrace DifferentialActorCriticAgent::learn(const PendulumState& s, std::size_t a, double r,
                                              const PendulumState& next) {
  encode(coder_, s, x_s_);
  encode(coder_, next, x_next_);
  return differential_actor_critic_step(w_, rbar_, policy_, x_s_, a, x_next_, r, next_hyper());
}

std::vector<NamedTable> DifferentialActorCriticAgent::tables() const {
  return {{"w", w_}, {"u", policy_.weights()}, {"rbar", {rbar_}}};
}

}  // namespace d2rl
