#include "tokenbal/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "tokenbal/rng.hpp"

namespace tokenbal {

namespace {

std::vector<int> bfs_distances(const Graph& g, int source) {
  std::vector<int> dist(g.n(), -1);
  std::queue<int> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : g.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

bool connected(const Graph& g) {
  if (g.n() == 0) return false;
  auto dist = bfs_distances(g, 0);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

}  // namespace

std::string FamilySpec::to_string() const {
  std::ostringstream out;
  switch (family) {
    case GraphFamily::cycle: out << "cycle(" << n << ")"; break;
    case GraphFamily::torus: out << "torus(" << dim << "," << side << ")"; break;
    case GraphFamily::hypercube: out << "hypercube(" << dim << ")"; break;
    case GraphFamily::random_regular: out << "random_regular(" << n << "," << degree << ")"; break;
    case GraphFamily::complete: out << "complete(" << n << ")"; break;
    case GraphFamily::path: out << "path(" << n << ")"; break;
    case GraphFamily::general: out << "general(" << n << ")"; break;
  }
  return out.str();
}

FamilySpec FamilySpec::parse(const std::string& name, int n, int dim, int side, int degree) {
  FamilySpec spec;
  spec.n = n;
  spec.dim = dim;
  spec.side = side;
  spec.degree = degree;
  if (name == "cycle") spec.family = GraphFamily::cycle;
  else if (name == "torus") spec.family = GraphFamily::torus;
  else if (name == "hypercube") spec.family = GraphFamily::hypercube;
  else if (name == "random_regular") spec.family = GraphFamily::random_regular;
  else if (name == "complete") spec.family = GraphFamily::complete;
  else if (name == "path") spec.family = GraphFamily::path;
  else if (name == "general") spec.family = GraphFamily::general;
  else throw std::invalid_argument("unknown graph family: " + name);
  return spec;
}

Graph Graph::from_edges(int n, std::vector<std::pair<int, int>> edges, GraphFamily family) {
  if (n < 2) throw std::invalid_argument("graph needs at least 2 nodes");
  Graph g;
  g.n_ = n;
  g.family_ = family;
  g.adj_.assign(n, {});
  for (auto& [u, v] : edges) {
    if (u == v) throw std::invalid_argument("self-loop rejected");
    if (u < 0 || v < 0 || u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("parallel edge rejected");
  g.edges_ = std::move(edges);
  for (auto [u, v] : g.edges_) {
    g.adj_[u].push_back(v);
    g.adj_[v].push_back(u);
  }
  for (auto& nb : g.adj_) std::sort(nb.begin(), nb.end());
  g.max_degree_ = 0;
  for (int u = 0; u < n; ++u) g.max_degree_ = std::max(g.max_degree_, g.degree(u));
  g.is_regular_ = true;
  for (int u = 0; u < n; ++u)
    if (g.degree(u) != g.max_degree_) g.is_regular_ = false;
  if (!connected(g)) throw std::invalid_argument("graph must be connected");
  return g;
}

bool Graph::has_edge(int u, int v) const {
  const auto& nb = adj_[u];
  return std::binary_search(nb.begin(), nb.end(), v);
}

int Graph::diameter() const {
  if (!diameter_) {
    int diam = 0;
    for (int s = 0; s < n_; ++s) {
      auto dist = bfs_distances(*this, s);
      for (int d : dist) diam = std::max(diam, d);
    }
    diameter_ = diam;
  }
  return *diameter_;
}

namespace {

Graph build_cycle(int n) {
  if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, std::move(edges), GraphFamily::cycle);
}

Graph build_path(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph::from_edges(n, std::move(edges), GraphFamily::path);
}

Graph build_complete(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return Graph::from_edges(n, std::move(edges), GraphFamily::complete);
}

Graph build_hypercube(int dim) {
  if (dim < 1 || dim > 24) throw std::invalid_argument("hypercube dimension out of range");
  int n = 1 << dim;
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int b = 0; b < dim; ++b) {
      int v = u ^ (1 << b);
      if (u < v) edges.emplace_back(u, v);
    }
  return Graph::from_edges(n, std::move(edges), GraphFamily::hypercube);
}

Graph build_torus(int r, int side) {
  if (r < 1 || side < 2) throw std::invalid_argument("torus needs r >= 1 and side >= 2");
  std::int64_t n64 = 1;
  for (int i = 0; i < r; ++i) {
    n64 *= side;
    if (n64 > (1 << 22)) throw std::invalid_argument("torus too large");
  }
  int n = static_cast<int>(n64);
  // node = sum coord_k * side^k
  std::vector<std::pair<int, int>> edges;
  std::vector<int> stride(r, 1);
  for (int k = 1; k < r; ++k) stride[k] = stride[k - 1] * side;
  for (int u = 0; u < n; ++u) {
    for (int k = 0; k < r; ++k) {
      int c = (u / stride[k]) % side;
      int up = u + ((c + 1) % side - c) * stride[k];
      if (u != up) edges.emplace_back(std::min(u, up), std::max(u, up));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());  // side=2 wraps coincide
  return Graph::from_edges(n, std::move(edges), GraphFamily::torus);
}

Graph build_random_regular(int n, int d, std::uint64_t seed) {
  if (n < 2 || d < 1 || d >= n) throw std::invalid_argument("random_regular needs 1 <= d < n");
  if ((static_cast<std::int64_t>(n) * d) % 2 != 0)
    throw std::invalid_argument("random_regular needs n*d even");
  const int max_attempts = 1000;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    RngStream rng(seed, static_cast<std::uint64_t>(attempt), StreamPurpose::init);
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * d);
    for (int u = 0; u < n; ++u)
      for (int k = 0; k < d; ++k) stubs.push_back(u);
    for (std::size_t i = stubs.size(); i > 1; --i)
      std::swap(stubs[i - 1], stubs[rng.next_below(i)]);
    std::vector<std::pair<int, int>> edges;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      int u = stubs[i], v = stubs[i + 1];
      if (u == v) { ok = false; break; }
      edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    if (!ok) continue;
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) continue;
    try {
      return Graph::from_edges(n, std::move(edges), GraphFamily::random_regular);
    } catch (const std::invalid_argument&) {
      continue;  // disconnected pairing, retry
    }
  }
  throw std::runtime_error("random_regular: no connected simple pairing found");
}

}  // namespace

Graph build_family(const FamilySpec& spec, std::uint64_t seed) {
  Graph g;
  switch (spec.family) {
    case GraphFamily::cycle: g = build_cycle(spec.n); break;
    case GraphFamily::torus: g = build_torus(spec.dim, spec.side); break;
    case GraphFamily::hypercube: g = build_hypercube(spec.dim); break;
    case GraphFamily::random_regular: g = build_random_regular(spec.n, spec.degree, seed); break;
    case GraphFamily::complete: g = build_complete(spec.n); break;
    case GraphFamily::path: g = build_path(spec.n); break;
    case GraphFamily::general:
      throw std::invalid_argument("build_family: general graphs come from edge lists");
  }
  g.spec_ = spec;
  return g;
}

Graph read_edge_list(std::istream& in) {
  int n = 0, m = 0;
  if (!(in >> n >> m)) throw std::invalid_argument("edge list: missing header");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(m);
  for (int i = 0; i < m; ++i) {
    int u, v;
    if (!(in >> u >> v)) throw std::invalid_argument("edge list: truncated");
    edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, std::move(edges));
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << g.n() << ' ' << g.m() << '\n';
  for (auto [u, v] : g.edge_list()) out << u << ' ' << v << '\n';
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file: " + path);
  return read_edge_list(in);
}

}  // namespace tokenbal
