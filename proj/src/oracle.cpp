#include "tokenbal/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "tokenbal/config.hpp"
#include "tokenbal/load_state.hpp"

namespace tokenbal::oracle {

namespace {

constexpr int kMaxNodes = 5;
constexpr int kMaxRounds = 4;
constexpr std::int64_t kMaxLoad = 6;

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

inline std::int64_t floor_half(std::int64_t s) { return floor_div(s, 2); }
inline int parity(std::int64_t s) { return static_cast<int>(((s % 2) + 2) % 2); }

}  // namespace

void check_guards(const Instance& inst, bool token_mode) {
  if (inst.n < 2 || inst.n > kMaxNodes)
    throw std::invalid_argument("oracle guard: need 2 <= n <= 5");
  if (static_cast<int>(inst.rounds.size()) > kMaxRounds)
    throw std::invalid_argument("oracle guard: need rounds <= 4");
  if (static_cast<int>(inst.x0.size()) != inst.n)
    throw std::invalid_argument("oracle: load vector size mismatch");
  std::int64_t total = 0;
  for (auto x : inst.x0) {
    total += std::abs(x);
    if (token_mode && x < 0)
      throw std::invalid_argument("oracle guard: token mode needs non-negative loads");
  }
  if (total > kMaxLoad) throw std::invalid_argument("oracle guard: need total |load| <= 6");
  for (const auto& m : inst.rounds)
    for (auto [u, v] : m.pairs())
      if (v >= inst.n) throw std::invalid_argument("oracle: matching endpoint out of range");
}

Rational OutcomeDistribution::total() const {
  Rational t = 0;
  for (const auto& [_, p] : mass) t += p;
  return t;
}

namespace {

// Expands the load distribution by one round of the orientation protocol.
// Only odd pair sums branch; even sums split deterministically.
std::map<LoadVec, Rational> round_expand_loads(const std::map<LoadVec, Rational>& dist,
                                               const Matching& m) {
  std::map<LoadVec, Rational> next;
  Rational half(1, 2);
  for (const auto& [loads, prob] : dist) {
    struct Frame {
      LoadVec loads;
      Rational prob;
    };
    std::vector<Frame> stack{{loads, prob}};
    for (auto [u, v] : m.pairs()) {
      std::vector<Frame> grown;
      for (auto& f : stack) {
        std::int64_t s = f.loads[u] + f.loads[v];
        if (parity(s) == 0) {
          Frame g = f;
          g.loads[u] = s / 2;
          g.loads[v] = s / 2;
          grown.push_back(std::move(g));
        } else {
          for (int phi : {+1, -1}) {
            Frame g = f;
            g.loads[u] = floor_half(s) + (phi > 0 ? 1 : 0);
            g.loads[v] = s - g.loads[u];
            g.prob *= half;
            grown.push_back(std::move(g));
          }
        }
      }
      stack = std::move(grown);
    }
    for (auto& f : stack) next[f.loads] += f.prob;
  }
  return next;
}

// Expands the placement distribution by one round of the urn protocol:
// every matched pair pools its tokens and hands a uniform without-replacement
// subset of the ceil/floor size to the lower endpoint.
std::map<std::vector<int>, Rational> round_expand_placements(
    const std::map<std::vector<int>, Rational>& dist, const Matching& m) {
  std::map<std::vector<int>, Rational> next;
  Rational half(1, 2);
  for (const auto& [placement, prob] : dist) {
    struct Frame {
      std::vector<int> w;
      Rational prob;
    };
    std::vector<Frame> stack{{placement, prob}};
    for (auto [u, v] : m.pairs()) {
      std::vector<Frame> grown;
      for (auto& f : stack) {
        std::vector<int> pool;
        for (std::size_t i = 0; i < f.w.size(); ++i)
          if (f.w[i] == u || f.w[i] == v) pool.push_back(static_cast<int>(i));
        const int s = static_cast<int>(pool.size());
        if (s == 0) {
          grown.push_back(std::move(f));
          continue;
        }
        auto expand_split = [&](int take, Rational branch_prob) {
          Rational per_subset = branch_prob / binomial(s, take);
          for (unsigned mask = 0; mask < (1u << s); ++mask) {
            if (__builtin_popcount(mask) != take) continue;
            Frame g{f.w, f.prob * per_subset};
            for (int i = 0; i < s; ++i) g.w[pool[i]] = (mask >> i) & 1u ? u : v;
            grown.push_back(std::move(g));
          }
        };
        if (s % 2 == 0) {
          expand_split(s / 2, 1);
        } else {
          expand_split((s + 1) / 2, half);  // excess to u
          expand_split(s / 2, half);        // excess to v
        }
      }
      stack = std::move(grown);
    }
    for (auto& f : stack) next[f.w] += f.prob;
  }
  return next;
}

}  // namespace

PlacementDistribution enumerate_token_placements(const Instance& inst) {
  check_guards(inst, true);
  PlacementDistribution out;
  for (int u = 0; u < inst.n; ++u)
    for (std::int64_t k = 0; k < inst.x0[u]; ++k) out.start.push_back(u);
  out.token_count = static_cast<int>(out.start.size());
  std::map<std::vector<int>, Rational> dist{{out.start, Rational(1)}};
  for (const auto& m : inst.rounds) dist = round_expand_placements(dist, m);
  out.mass = std::move(dist);
  return out;
}

OutcomeDistribution enumerate_protocol(const Instance& inst, EnumMode mode) {
  OutcomeDistribution out;
  if (mode == EnumMode::rounding_error) {
    check_guards(inst, false);
    std::map<LoadVec, Rational> dist{{inst.x0, Rational(1)}};
    for (const auto& m : inst.rounds) dist = round_expand_loads(dist, m);
    out.mass = std::move(dist);
  } else {
    PlacementDistribution placements = enumerate_token_placements(inst);
    for (const auto& [w, p] : placements.mass) {
      LoadVec loads(inst.n, 0);
      for (int node : w) ++loads[node];
      out.mass[loads] += p;
    }
  }
  return out;
}

Rational total_variation(const OutcomeDistribution& a, const OutcomeDistribution& b) {
  Rational acc = 0;
  for (const auto& [k, p] : a.mass) {
    auto it = b.mass.find(k);
    Rational q = (it == b.mass.end()) ? Rational(0) : it->second;
    acc += abs(p - q);
  }
  for (const auto& [k, q] : b.mass)
    if (!a.mass.count(k)) acc += q;
  return acc / 2;
}

std::vector<std::vector<Rational>> rational_interval_matrix(std::span<const Matching> matchings,
                                                            int n) {
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) a[i][i] = 1;
  Rational half(1, 2);
  for (const auto& m : matchings) {
    for (auto [u, v] : m.pairs()) {
      for (int r = 0; r < n; ++r) {
        Rational avg = (a[r][u] + a[r][v]) * half;
        a[r][u] = avg;
        a[r][v] = avg;
      }
    }
  }
  return a;
}

NegativeCorrelationResult check_negative_correlation(const PlacementDistribution& placements,
                                                     const Instance& inst,
                                                     const std::vector<int>& token_set,
                                                     const std::vector<int>& node_set) {
  std::vector<char> in_d(inst.n, 0);
  for (int v : node_set) in_d.at(v) = 1;

  NegativeCorrelationResult result;
  result.joint = 0;
  for (const auto& [w, p] : placements.mass) {
    bool all = true;
    for (int i : token_set)
      if (!in_d[w.at(i)]) {
        all = false;
        break;
      }
    if (all) result.joint += p;
  }

  auto matrix = rational_interval_matrix(inst.rounds, inst.n);
  result.product = 1;
  for (int i : token_set) {
    Rational row_mass = 0;
    int start = placements.start.at(i);
    for (int v : node_set) row_mass += matrix[start][v];
    result.product *= row_mass;
  }
  result.ok = result.joint <= result.product;
  return result;
}

NegativeCorrelationResult check_negative_correlation(const Instance& inst,
                                                     const std::vector<int>& token_set,
                                                     const std::vector<int>& node_set) {
  PlacementDistribution placements = enumerate_token_placements(inst);
  return check_negative_correlation(placements, inst, token_set, node_set);
}

MarginalLawResult check_marginal_law(const Instance& inst, int token, int node) {
  PlacementDistribution placements = enumerate_token_placements(inst);
  MarginalLawResult result;
  result.enumerated = 0;
  for (const auto& [w, p] : placements.mass)
    if (w.at(token) == node) result.enumerated += p;
  auto matrix = rational_interval_matrix(inst.rounds, inst.n);
  result.matrix_entry = matrix[placements.start.at(token)][node];
  result.equal = (result.enumerated == result.matrix_entry);
  return result;
}

bool check_mirror_coupling(const Instance& inst) {
  check_guards(inst, false);
  int total_pairs = 0;
  for (const auto& m : inst.rounds) total_pairs += static_cast<int>(m.size());
  if (total_pairs > 20) throw std::invalid_argument("oracle guard: too many orientation bits");

  std::int64_t sum = std::accumulate(inst.x0.begin(), inst.x0.end(), std::int64_t{0});
  std::int64_t alpha = floor_div(sum, inst.n);

  for (unsigned assignment = 0; assignment < (1u << total_pairs); ++assignment) {
    LoadVec x = inst.x0;
    LoadVec y(inst.n);
    for (int u = 0; u < inst.n; ++u) y[u] = 2 * alpha - x[u];
    int bit = 0;
    for (const auto& m : inst.rounds) {
      for (auto [u, v] : m.pairs()) {
        int phi = ((assignment >> bit) & 1u) ? +1 : -1;
        ++bit;
        std::int64_t sx = x[u] + x[v];
        x[u] = floor_half(sx) + (parity(sx) && phi > 0 ? 1 : 0);
        x[v] = sx - x[u];
        std::int64_t sy = y[u] + y[v];
        int mirrored_phi = -phi;
        y[u] = floor_half(sy) + (parity(sy) && mirrored_phi > 0 ? 1 : 0);
        y[v] = sy - y[u];
      }
      for (int u = 0; u < inst.n; ++u)
        if (y[u] != 2 * alpha - x[u]) return false;
    }
  }
  return true;
}

std::vector<Instance> load_manifest(const std::filesystem::path& path) {
  Config cfg = Config::parse_file(path);
  std::vector<Instance> out;
  for (const auto& section : cfg.sections()) {
    Instance inst;
    inst.name = section;
    inst.n = static_cast<int>(cfg.get_int(section + ".n"));
    std::istringstream loads(cfg.get_string(section + ".x0"));
    std::int64_t x;
    while (loads >> x) inst.x0.push_back(x);
    std::string rounds = cfg.get_string(section + ".rounds");
    std::size_t pos = 0;
    while (pos <= rounds.size()) {
      auto semi = rounds.find(';', pos);
      std::string part =
          rounds.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
      inst.rounds.push_back(Matching::parse(part));
      if (semi == std::string::npos) break;
      pos = semi + 1;
    }
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace tokenbal::oracle
