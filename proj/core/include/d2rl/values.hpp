#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace d2rl {

/// Index of the largest entry; ties go to the lowest index.
/// Throws std::invalid_argument on an empty range.
std::size_t argmax(std::span<const double> values);

/// Tabular state-action values Q(s, a), row-major by state.
class QTable {
 public:
  QTable(std::size_t n_states, std::size_t n_actions, double initial = 0.0)
      : n_states_(n_states), n_actions_(n_actions), values_(n_states * n_actions, initial) {
    if (n_states == 0 || n_actions == 0) throw std::invalid_argument("QTable: empty shape");
  }

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }

  double& operator()(std::size_t s, std::size_t a) { return values_.at(s * n_actions_ + a); }
  double operator()(std::size_t s, std::size_t a) const { return values_.at(s * n_actions_ + a); }

  std::span<const double> row(std::size_t s) const {
    return std::span<const double>(values_).subspan(s * n_actions_, n_actions_);
  }
  std::span<const double> flat() const noexcept { return values_; }
  std::span<double> flat() noexcept { return values_; }

  double max(std::size_t s) const;
  std::size_t greedy(std::size_t s) const { return argmax(row(s)); }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<double> values_;
};

/// Tabular state values V(s).
class VTable {
 public:
  explicit VTable(std::size_t n_states, double initial = 0.0) : values_(n_states, initial) {
    if (n_states == 0) throw std::invalid_argument("VTable: empty shape");
  }

  std::size_t n_states() const noexcept { return values_.size(); }
  double& operator()(std::size_t s) { return values_.at(s); }
  double operator()(std::size_t s) const { return values_.at(s); }
  std::span<const double> flat() const noexcept { return values_; }

  friend bool operator==(const VTable&, const VTable&) = default;

 private:
  std::vector<double> values_;
};

}  // namespace d2rl
