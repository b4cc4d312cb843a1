#include "tokenbal/edge_coloring.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace tokenbal {

namespace {

// Misra-Gries: colors 0..Delta, incidence table used[x][c] = neighbor of x
// across the c-colored edge, or -1.
class MisraGries {
 public:
  explicit MisraGries(const Graph& g)
      : g_(g), palette_(g.max_degree() + 1), used_(g.n(), std::vector<int>(palette_ + 1, -1)) {}

  EdgeColoring run() {
    for (auto [u, v] : g_.edge_list()) color_edge(u, v);
    std::vector<std::vector<std::pair<int, int>>> classes(palette_);
    for (auto [u, v] : g_.edge_list()) {
      int c = color_of(u, v);
      if (c < 0) throw std::logic_error("edge left uncolored");
      classes[c].emplace_back(u, v);
    }
    EdgeColoring out;
    for (auto& cls : classes)
      if (!cls.empty()) out.colors.emplace_back(std::move(cls));
    return out;
  }

 private:
  int color_of(int u, int v) const {
    for (int c = 0; c < palette_; ++c)
      if (used_[u][c] == v) return c;
    return -1;
  }

  bool is_free(int x, int c) const { return used_[x][c] == -1; }

  int first_free(int x) const {
    for (int c = 0; c < palette_; ++c)
      if (is_free(x, c)) return c;
    throw std::logic_error("no free color in palette");
  }

  void set_color(int u, int v, int c) {
    used_[u][c] = v;
    used_[v][c] = u;
  }

  void clear_color(int u, int v, int c) {
    used_[u][c] = -1;
    used_[v][c] = -1;
  }

  void invert_path(int u, int d, int c) {
    std::vector<std::tuple<int, int, int>> path;  // (x, y, old color)
    int x = u, col = d;
    while (used_[x][col] != -1) {
      int y = used_[x][col];
      path.emplace_back(x, y, col);
      x = y;
      col = (col == d) ? c : d;
    }
    for (auto [a, b, old] : path) clear_color(a, b, old);
    for (auto [a, b, old] : path) set_color(a, b, old == d ? c : d);
  }

  void color_edge(int u, int v) {
    // Maximal fan of u starting at v.
    std::vector<int> fan{v};
    std::vector<char> in_fan(g_.n(), 0);
    in_fan[v] = 1;
    bool grew = true;
    while (grew) {
      grew = false;
      for (int w : g_.neighbors(u)) {
        if (in_fan[w]) continue;
        int cw = color_of(u, w);
        if (cw >= 0 && is_free(fan.back(), cw)) {
          fan.push_back(w);
          in_fan[w] = 1;
          grew = true;
          break;
        }
      }
    }

    int c = first_free(u);
    int d = first_free(fan.back());
    if (c != d) invert_path(u, d, c);

    // First fan prefix whose tip has d free; prefix validity is rechecked
    // against the post-inversion colors.
    int chosen = -1;
    for (std::size_t j = 0; j < fan.size(); ++j) {
      if (j > 0) {
        int cj = color_of(u, fan[j]);
        if (cj < 0 || !is_free(fan[j - 1], cj)) break;
      }
      if (is_free(fan[j], d)) {
        chosen = static_cast<int>(j);
        break;
      }
    }
    if (chosen < 0 || !is_free(u, d)) throw std::logic_error("fan rotation failed");

    for (int i = 0; i < chosen; ++i) {
      int next_color = color_of(u, fan[i + 1]);
      clear_color(u, fan[i + 1], next_color);
      set_color(u, fan[i], next_color);
    }
    set_color(u, fan[chosen], d);
  }

  const Graph& g_;
  int palette_;
  std::vector<std::vector<int>> used_;
};

// Axis classes of a cyclic order 0..len-1: wrap-around cycles need parity
// classes (plus a third class for odd length); len == 2 is a single edge.
// emit(c) receives the low endpoint offset c of edge (c, c+1 mod len).
template <typename Emit>
void cycle_classes(int len, int base_class, Emit emit) {
  for (int c = 0; c < len; ++c) {
    int cls;
    if (len == 2) {
      if (c == 1) continue;  // both wraps are the same edge
      cls = base_class;
    } else if (c == len - 1) {
      cls = (len % 2 == 0) ? base_class + 1 : base_class + 2;
    } else {
      cls = base_class + (c % 2);
    }
    emit(c, cls);
  }
}

int cycle_class_count(int len) { return len == 2 ? 1 : (len % 2 == 0 ? 2 : 3); }

EdgeColoring color_cycle(const Graph& g) {
  int n = g.n();
  std::vector<std::vector<std::pair<int, int>>> classes(cycle_class_count(n));
  cycle_classes(n, 0, [&](int c, int cls) {
    classes[cls].emplace_back(c, (c + 1) % n);
  });
  EdgeColoring out;
  for (auto& cls : classes) out.colors.emplace_back(std::move(cls));
  return out;
}

EdgeColoring color_path(const Graph& g) {
  int n = g.n();
  std::vector<std::vector<std::pair<int, int>>> classes(n > 2 ? 2 : 1);
  for (int i = 0; i + 1 < n; ++i) classes[i % 2].emplace_back(i, i + 1);
  EdgeColoring out;
  for (auto& cls : classes) out.colors.emplace_back(std::move(cls));
  return out;
}

EdgeColoring color_hypercube(const Graph& g) {
  int dim = g.family_spec().dim;
  EdgeColoring out;
  for (int b = 0; b < dim; ++b) {
    std::vector<std::pair<int, int>> pairs;
    for (int u = 0; u < g.n(); ++u) {
      int v = u ^ (1 << b);
      if (u < v) pairs.emplace_back(u, v);
    }
    out.colors.emplace_back(std::move(pairs));
  }
  return out;
}

EdgeColoring color_torus(const Graph& g) {
  int r = g.family_spec().dim;
  int side = g.family_spec().side;
  std::vector<int> stride(r, 1);
  for (int k = 1; k < r; ++k) stride[k] = stride[k - 1] * side;
  std::vector<std::vector<std::pair<int, int>>> classes;
  for (int k = 0; k < r; ++k) {
    int base = static_cast<int>(classes.size());
    classes.resize(base + cycle_class_count(side));
    for (int u = 0; u < g.n(); ++u) {
      int c = (u / stride[k]) % side;
      cycle_classes(side, base, [&](int cc, int cls) {
        if (cc != c) return;
        int v = u + ((c + 1) % side - c) * stride[k];
        classes[cls].emplace_back(std::min(u, v), std::max(u, v));
      });
    }
  }
  EdgeColoring out;
  for (auto& cls : classes) out.colors.emplace_back(std::move(cls));
  return out;
}

// Round-robin one-factorization.
EdgeColoring color_complete(const Graph& g) {
  int n = g.n();
  EdgeColoring out;
  if (n % 2 == 0) {
    int m = n - 1;
    for (int r = 0; r < m; ++r) {
      std::vector<std::pair<int, int>> pairs{{std::min(n - 1, r), std::max(n - 1, r)}};
      for (int k = 1; k <= (m - 1) / 2; ++k)
        pairs.emplace_back((r + k) % m, (r - k + m) % m);
      out.colors.emplace_back(std::move(pairs));
    }
  } else {
    for (int r = 0; r < n; ++r) {
      std::vector<std::pair<int, int>> pairs;
      for (int k = 1; k <= (n - 1) / 2; ++k)
        pairs.emplace_back((r + k) % n, (r - k + n) % n);
      out.colors.emplace_back(std::move(pairs));
    }
  }
  return out;
}

void validate(const Graph& g, const EdgeColoring& coloring) {
  std::unordered_map<std::int64_t, int> seen;
  for (const auto& m : coloring.colors)
    for (auto [u, v] : m.pairs()) {
      if (!g.has_edge(u, v)) throw std::logic_error("colored a non-edge");
      ++seen[static_cast<std::int64_t>(u) * g.n() + v];
    }
  if (static_cast<int>(seen.size()) != g.m()) throw std::logic_error("coloring misses edges");
  for (auto [_, count] : seen)
    if (count != 1) throw std::logic_error("edge colored twice");
  if (coloring.color_count() > g.max_degree() + 1)
    throw std::logic_error("coloring exceeds Delta+1 classes");
}

}  // namespace

EdgeColoring edge_coloring_general(const Graph& g) {
  EdgeColoring out = MisraGries(g).run();
  validate(g, out);
  return out;
}

EdgeColoring edge_coloring(const Graph& g) {
  EdgeColoring out;
  switch (g.family()) {
    case GraphFamily::cycle: out = color_cycle(g); break;
    case GraphFamily::path: out = color_path(g); break;
    case GraphFamily::hypercube: out = color_hypercube(g); break;
    case GraphFamily::torus: out = color_torus(g); break;
    case GraphFamily::complete: out = color_complete(g); break;
    default: return edge_coloring_general(g);
  }
  validate(g, out);
  return out;
}

}  // namespace tokenbal
