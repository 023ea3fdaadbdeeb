#include <benchmark/benchmark.h>

#include <vector>

#include "d2rl/agents.hpp"
#include "d2rl/envs.hpp"
#include "d2rl/harness.hpp"
#include "d2rl/linear.hpp"
#include "d2rl/oracle.hpp"
#include "d2rl/random.hpp"

using namespace d2rl;

namespace {

void BM_PhiloxUniform(benchmark::State& state) {
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(rng.uniform01());
}
BENCHMARK(BM_PhiloxUniform);

void BM_QrUpdate(benchmark::State& state) {
  QuantileSet qs(TauGrid(static_cast<std::size_t>(state.range(0))));
  Rng rng(2);
  for (auto _ : state) {
    qs.update(rng.uniform(-2, 2), 1e-3);
    benchmark::DoNotOptimize(qs.thetas().data());
  }
}
BENCHMARK(BM_QrUpdate)->Arg(10)->Arg(100);

template <class MakeAgent>
void tabular_steps(benchmark::State& state, MakeAgent make) {
  RedPillBluePill env;
  auto agent = make();
  Rng agent_rng(3, streams::kAgent), env_rng(3, streams::kEnvironment);
  std::size_t s = env.reset(env_rng);
  for (auto _ : state) {
    const auto a = agent->act(s, agent_rng);
    const auto out = env.step(a, env_rng);
    agent->learn(s, a, out.reward, out.next_obs);
    s = out.next_obs;
  }
  state.SetItemsProcessed(state.iterations());
}

AgentHyper rpbp_hyper() {
  AgentHyper h;
  h.alpha = 2e-3;
  return h;
}

void BM_D2QStep(benchmark::State& state) {
  tabular_steps(state, [] { return std::make_unique<D2QAgent>(2, 2, 10, rpbp_hyper(), StepSchedule::constant(2e-3)); });
}
BENCHMARK(BM_D2QStep);

void BM_D3QStep(benchmark::State& state) {
  tabular_steps(state, [] {
    return std::make_unique<D3QAgent>(2, 2, 10, static_cast<std::size_t>(10), rpbp_hyper(),
                                      StepSchedule::constant(2e-3));
  });
}
BENCHMARK(BM_D3QStep);

void BM_PendulumD2AcStep(benchmark::State& state) {
  Pendulum env;
  AgentHyper h;
  h.alpha = 2e-2;
  h.eta_theta = 0.1;
  h.eta_pi = 0.1;
  D2ActorCriticAgent agent(TileCoder::pendulum(), 3, 10, h, StepSchedule::constant(h.alpha));
  Rng agent_rng(4, streams::kAgent), env_rng(4, streams::kEnvironment);
  auto s = env.reset(env_rng);
  for (auto _ : state) {
    const auto a = agent.act(s, agent_rng);
    const auto out = env.step(a, env_rng);
    agent.learn(s, a, out.reward, out.next_obs);
    s = out.next_obs;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PendulumD2AcStep);

void BM_RelativeValueIteration(benchmark::State& state) {
  Rng gen(5, streams::kGenerator);
  const std::vector<double> support{-1.0, 0.0, 1.0, 2.0};
  const auto mdp = random_unichain_mdp(static_cast<std::size_t>(state.range(0)), 2, support, gen);
  for (auto _ : state) benchmark::DoNotOptimize(relative_value_iteration(mdp).rbar_star);
}
BENCHMARK(BM_RelativeValueIteration)->Arg(4)->Arg(16);

void BM_RpbpExperiment(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.total_steps = 100000;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg, 0, false).summary.mean_reward);
}
BENCHMARK(BM_RpbpExperiment)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
