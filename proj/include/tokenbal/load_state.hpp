#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tokenbal {

// Per-node load vector, either indivisible integer tokens or divisible reals.
// The load sum is conserved by every protocol round; integer mode keeps it
// exactly, continuous mode within 1e-9 * n (asserted by the run drivers).
class LoadState {
 public:
  static LoadState discrete(std::vector<std::int64_t> loads);
  static LoadState continuous(std::vector<double> loads);

  bool is_discrete() const { return discrete_; }
  int n() const { return n_; }

  std::span<const std::int64_t> ints() const { return ints_; }
  std::span<const double> reals() const { return reals_; }
  std::vector<std::int64_t>& mutable_ints() { return ints_; }
  std::vector<double>& mutable_reals() { return reals_; }

  std::int64_t round = 0;

  std::int64_t int_total() const;
  double total() const;
  double mean() const;

 private:
  bool discrete_ = true;
  int n_ = 0;
  std::vector<std::int64_t> ints_;
  std::vector<double> reals_;
};

// Subtracts alpha = floor(mean) from every entry so the new mean lies in
// [0, 1); returns alpha. Trajectories are equivariant under this shift.
std::int64_t normalize_mean(LoadState& state);

std::int64_t floor_div(std::int64_t a, std::int64_t b);

}  // namespace tokenbal
