#include "tokenbal/load_state.hpp"

#include <numeric>
#include <stdexcept>

namespace tokenbal {

LoadState LoadState::discrete(std::vector<std::int64_t> loads) {
  if (loads.empty()) throw std::invalid_argument("empty load vector");
  LoadState s;
  s.discrete_ = true;
  s.n_ = static_cast<int>(loads.size());
  s.ints_ = std::move(loads);
  return s;
}

LoadState LoadState::continuous(std::vector<double> loads) {
  if (loads.empty()) throw std::invalid_argument("empty load vector");
  LoadState s;
  s.discrete_ = false;
  s.n_ = static_cast<int>(loads.size());
  s.reals_ = std::move(loads);
  return s;
}

std::int64_t LoadState::int_total() const {
  return std::accumulate(ints_.begin(), ints_.end(), std::int64_t{0});
}

double LoadState::total() const {
  if (discrete_) return static_cast<double>(int_total());
  return std::accumulate(reals_.begin(), reals_.end(), 0.0);
}

double LoadState::mean() const { return total() / n_; }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t normalize_mean(LoadState& state) {
  if (!state.is_discrete()) throw std::invalid_argument("normalize_mean needs discrete loads");
  std::int64_t alpha = floor_div(state.int_total(), state.n());
  for (auto& x : state.mutable_ints()) x -= alpha;
  return alpha;
}

}  // namespace tokenbal
