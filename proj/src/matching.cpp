#include "tokenbal/matching.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace tokenbal {

Matching::Matching(std::vector<std::pair<int, int>> pairs) : pairs_(std::move(pairs)) {
  for (auto& [u, v] : pairs_) {
    if (u == v) throw std::invalid_argument("matching pair with equal endpoints");
    if (u > v) std::swap(u, v);
  }
  std::sort(pairs_.begin(), pairs_.end());
  std::unordered_set<int> seen;
  for (auto [u, v] : pairs_) {
    if (!seen.insert(u).second || !seen.insert(v).second)
      throw std::invalid_argument("matching pairs share a node");
  }
}

std::vector<int> Matching::partner_map(int n) const {
  std::vector<int> partner(n, -1);
  for (auto [u, v] : pairs_) {
    partner[u] = v;
    partner[v] = u;
  }
  return partner;
}

Matching Matching::parse(const std::string& text) {
  std::vector<std::pair<int, int>> pairs;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok == "none") continue;
    auto dash = tok.find('-');
    if (dash == std::string::npos) throw std::invalid_argument("bad matching token: " + tok);
    int u = std::stoi(tok.substr(0, dash));
    int v = std::stoi(tok.substr(dash + 1));
    pairs.emplace_back(u, v);
  }
  return Matching(std::move(pairs));
}

std::string Matching::to_string() const {
  if (pairs_.empty()) return "none";
  std::ostringstream out;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (i) out << ' ';
    out << pairs_[i].first << '-' << pairs_[i].second;
  }
  return out.str();
}

}  // namespace tokenbal
