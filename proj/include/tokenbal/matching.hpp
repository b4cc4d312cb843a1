#pragma once

#include <string>
#include <utility>
#include <vector>

namespace tokenbal {

// A set of disjoint node pairs, stored with u < v and sorted by (u, v).
class Matching {
 public:
  Matching() = default;
  explicit Matching(std::vector<std::pair<int, int>> pairs);

  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  // partner[u] = matched neighbor of u, or -1.
  std::vector<int> partner_map(int n) const;

  // "0-1 2-3"; "none" or "" parses to the empty matching.
  static Matching parse(const std::string& text);
  std::string to_string() const;

 private:
  std::vector<std::pair<int, int>> pairs_;
};

}  // namespace tokenbal
