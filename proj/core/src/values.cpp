#include "d2rl/values.hpp"

namespace d2rl {

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax: empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

double QTable::max(std::size_t s) const { return row(s)[argmax(row(s))]; }

}  // namespace d2rl
