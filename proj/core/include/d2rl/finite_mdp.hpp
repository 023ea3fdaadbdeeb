#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace d2rl {

/// Explicit finite MDP given by the joint kernel p(s', r | s, a) over a
/// finite, strictly increasing reward support.
///
/// Text format (whitespace separated, one record per line):
///
///     <n_states> <n_actions> <n_rewards>
///     <reward_0> <reward_1> ... <reward_{n_rewards-1}>
///     <s> <a> <s'> <reward_index> <probability>      (one line per nonzero entry)
///
/// Reals are written in shortest round-trip form, so write/read reproduces
/// every probability and reward bit for bit. Blank lines and lines starting
/// with '#' are ignored when reading.
class FiniteMdp {
 public:
  static constexpr double kRowTolerance = 1e-12;

  FiniteMdp(std::size_t n_states, std::size_t n_actions, std::vector<double> reward_support);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  std::size_t n_rewards() const noexcept { return support_.size(); }
  std::span<const double> reward_support() const noexcept { return support_; }

  double probability(std::size_t s, std::size_t a, std::size_t next, std::size_t r_index) const {
    return prob_[index(s, a, next, r_index)];
  }
  void set_probability(std::size_t s, std::size_t a, std::size_t next, std::size_t r_index, double p);

  /// Marginal p(s' | s, a).
  double transition(std::size_t s, std::size_t a, std::size_t next) const;
  /// E[R | s, a].
  double expected_reward(std::size_t s, std::size_t a) const;
  /// Probabilities over (s', r_index) for one state-action pair, row-major in s'.
  std::span<const double> row(std::size_t s, std::size_t a) const;

  /// Throws std::invalid_argument on negative entries or rows not summing to 1.
  void validate() const;

  std::string to_text() const;
  static FiniteMdp from_text(std::string_view text);

  void write(const std::filesystem::path& path) const;
  static FiniteMdp read(const std::filesystem::path& path);

  friend bool operator==(const FiniteMdp&, const FiniteMdp&) = default;

 private:
  std::size_t index(std::size_t s, std::size_t a, std::size_t next, std::size_t r_index) const;

  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<double> support_;
  std::vector<double> prob_;
};

}  // namespace d2rl
