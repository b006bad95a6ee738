#include "syncgeom/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <string>

namespace syncgeom {

std::optional<int> WeightedGraph::find_edge(int u, int v) const {
  if (u < 0 || v < 0 || u >= n || v >= n) return std::nullopt;
  const auto& list = adj[static_cast<size_t>(u)];
  auto it = std::lower_bound(list.begin(), list.end(), v,
                             [](const AdjEntry& a, int b) { return a.to < b; });
  if (it == list.end() || it->to != v) return std::nullopt;
  return it->edge;
}

WeightedGraph build_graph(int n, const std::vector<EdgeSpec>& edge_list) {
  if (n < 0) raise(ErrorKind::Validation, "vertex count must be nonnegative");
  WeightedGraph g;
  g.n = n;
  g.edges.reserve(edge_list.size());

  std::set<std::pair<int, int>> seen;
  for (const EdgeSpec& e : edge_list) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      raise(ErrorKind::Validation, "vertex id out of range: (" + std::to_string(e.u) +
                                       "," + std::to_string(e.v) + ")");
    if (e.u == e.v)
      raise(ErrorKind::SelfLoop, "self-loop at vertex " + std::to_string(e.u));
    if (!(e.w > 0.0))
      raise(ErrorKind::NonpositiveWeight,
            "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") has weight " +
                std::to_string(e.w));
    const int u = std::min(e.u, e.v);
    const int v = std::max(e.u, e.v);
    if (!seen.insert({u, v}).second)
      raise(ErrorKind::DuplicateEdge,
            "duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    g.edges.push_back(Edge{u, v, e.w});
  }

  // Canonical edge order: sorted by (u, v). Keeps file round-trips and
  // downstream block layouts independent of input order.
  std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair{a.u, a.v} < std::pair{b.u, b.v};
  });

  g.adj.assign(static_cast<size_t>(n), {});
  g.degree.assign(static_cast<size_t>(n), 0.0);
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    g.adj[static_cast<size_t>(ed.u)].push_back(AdjEntry{ed.v, e, true});
    g.adj[static_cast<size_t>(ed.v)].push_back(AdjEntry{ed.u, e, false});
    g.degree[static_cast<size_t>(ed.u)] += ed.w;
    g.degree[static_cast<size_t>(ed.v)] += ed.w;
  }
  for (auto& list : g.adj)
    std::sort(list.begin(), list.end(),
              [](const AdjEntry& a, const AdjEntry& b) { return a.to < b.to; });
  return g;
}

WeightedGraph build_graph(const std::vector<EdgeSpec>& edge_list) {
  int n = 0;
  for (const EdgeSpec& e : edge_list) n = std::max({n, e.u + 1, e.v + 1});
  return build_graph(n, edge_list);
}

WeightedGraph with_weights(const WeightedGraph& g, const std::vector<double>& weights) {
  if (static_cast<int>(weights.size()) != g.m())
    raise(ErrorKind::DimensionMismatch, "weight vector length does not match edge count");
  std::vector<EdgeSpec> specs;
  specs.reserve(weights.size());
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    specs.push_back(EdgeSpec{ed.u, ed.v, weights[static_cast<size_t>(e)]});
  }
  return build_graph(g.n, specs);
}

SpanningTree spanning_tree(const WeightedGraph& g, int root) {
  if (root < 0 || root >= g.n) raise(ErrorKind::Validation, "root vertex out of range");
  SpanningTree t;
  t.root = root;
  t.parent.assign(static_cast<size_t>(g.n), -1);
  t.parent_edge.assign(static_cast<size_t>(g.n), -1);
  t.tree_edge.assign(static_cast<size_t>(g.m()), 0);

  std::vector<char> visited(static_cast<size_t>(g.n), 0);
  std::deque<int> queue;
  visited[static_cast<size_t>(root)] = 1;
  queue.push_back(root);
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    t.bfs_order.push_back(u);
    for (const AdjEntry& a : g.adj[static_cast<size_t>(u)]) {
      if (visited[static_cast<size_t>(a.to)]) continue;
      visited[static_cast<size_t>(a.to)] = 1;
      t.parent[static_cast<size_t>(a.to)] = u;
      t.parent_edge[static_cast<size_t>(a.to)] = a.edge;
      t.tree_edge[static_cast<size_t>(a.edge)] = 1;
      queue.push_back(a.to);
    }
  }
  return t;
}

namespace {

// Oriented tree path from vertex a to vertex b, both inside the tree's
// component.
std::vector<OrientedEdge> tree_path(const WeightedGraph& g, const SpanningTree& t, int a, int b) {
  auto depth = [&](int v) {
    int d = 0;
    while (t.parent[static_cast<size_t>(v)] >= 0) {
      v = t.parent[static_cast<size_t>(v)];
      ++d;
    }
    return d;
  };
  int da = depth(a), db = depth(b);
  std::vector<OrientedEdge> up;      // a climbing towards the common ancestor
  std::vector<OrientedEdge> down;    // b climbing, reversed at the end
  int x = a, y = b;
  auto step_up = [&](int& v) {
    const int e = t.parent_edge[static_cast<size_t>(v)];
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    const bool forward = (ed.u == v);  // traversal v -> parent(v)
    v = t.parent[static_cast<size_t>(v)];
    return OrientedEdge{e, forward};
  };
  while (da > db) { up.push_back(step_up(x)); --da; }
  while (db > da) { down.push_back(step_up(y)); --db; }
  while (x != y) {
    up.push_back(step_up(x));
    down.push_back(step_up(y));
  }
  // down currently runs b -> ancestor; reverse and flip orientations.
  for (auto it = down.rbegin(); it != down.rend(); ++it)
    up.push_back(OrientedEdge{it->edge, !it->forward});
  return up;
}

}  // namespace

CycleBasis cycle_basis(const WeightedGraph& g, const SpanningTree& t) {
  if (static_cast<int>(t.bfs_order.size()) != g.n)
    raise(ErrorKind::DisconnectedGraph, "cycle basis requires a connected graph");
  CycleBasis basis;
  for (int e = 0; e < g.m(); ++e) {
    if (t.tree_edge[static_cast<size_t>(e)]) continue;
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    std::vector<OrientedEdge> cycle;
    cycle.push_back(OrientedEdge{e, true});  // canonical direction u -> v
    auto back = tree_path(g, t, ed.v, ed.u);
    cycle.insert(cycle.end(), back.begin(), back.end());
    basis.non_tree_edges.push_back(e);
    basis.cycles.push_back(std::move(cycle));
  }
  return basis;
}

std::vector<int> connected_components(const WeightedGraph& g) {
  std::vector<int> label(static_cast<size_t>(g.n), -1);
  int next = 0;
  std::deque<int> queue;
  for (int s = 0; s < g.n; ++s) {
    if (label[static_cast<size_t>(s)] >= 0) continue;
    label[static_cast<size_t>(s)] = next;
    queue.push_back(s);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (const AdjEntry& a : g.adj[static_cast<size_t>(u)]) {
        if (label[static_cast<size_t>(a.to)] >= 0) continue;
        label[static_cast<size_t>(a.to)] = next;
        queue.push_back(a.to);
      }
    }
    ++next;
  }
  return label;
}

bool is_connected(const WeightedGraph& g) {
  if (g.n <= 1) return true;
  const auto labels = connected_components(g);
  return std::all_of(labels.begin(), labels.end(), [](int l) { return l == 0; });
}

double volume(const WeightedGraph& g, const std::vector<int>& subset) {
  double vol = 0.0;
  for (int v : subset) {
    if (v < 0 || v >= g.n) raise(ErrorKind::Validation, "subset vertex out of range");
    vol += g.degree[static_cast<size_t>(v)];
  }
  return vol;
}

InducedSubgraph induced_subgraph(const WeightedGraph& g, const std::vector<int>& vertices) {
  InducedSubgraph sub;
  sub.vertices = vertices;
  std::sort(sub.vertices.begin(), sub.vertices.end());
  std::vector<int> to_sub(static_cast<size_t>(g.n), -1);
  for (size_t i = 0; i < sub.vertices.size(); ++i) {
    const int v = sub.vertices[i];
    if (v < 0 || v >= g.n) raise(ErrorKind::Validation, "subset vertex out of range");
    if (to_sub[static_cast<size_t>(v)] >= 0)
      raise(ErrorKind::Validation, "duplicate vertex in subset");
    to_sub[static_cast<size_t>(v)] = static_cast<int>(i);
  }
  std::vector<EdgeSpec> specs;
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    const int su = to_sub[static_cast<size_t>(ed.u)];
    const int sv = to_sub[static_cast<size_t>(ed.v)];
    if (su < 0 || sv < 0) continue;
    specs.push_back(EdgeSpec{su, sv, ed.w});
    sub.edge_map.push_back(e);
  }
  sub.graph = build_graph(static_cast<int>(sub.vertices.size()), specs);
  return sub;
}

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::SelfLoop: return "self-loop";
    case ErrorKind::DuplicateEdge: return "duplicate-edge";
    case ErrorKind::NonpositiveWeight: return "nonpositive-weight";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::NoSuchEdge: return "no-such-edge";
    case ErrorKind::ZeroNorm: return "zero-norm";
    case ErrorKind::EmptySubset: return "empty-subset";
    case ErrorKind::DisconnectedGraph: return "disconnected-graph";
    case ErrorKind::BrokenPath: return "broken-path";
    case ErrorKind::RankDeficient: return "rank-deficient";
    case ErrorKind::RankDeficientBlock: return "rank-deficient-block";
    case ErrorKind::NotSynchronizable: return "not-synchronizable";
    case ErrorKind::ConvergenceFailure: return "convergence-failure";
    case ErrorKind::TooFewPoints: return "too-few-points";
    case ErrorKind::DegenerateWeights: return "degenerate-weights";
    case ErrorKind::ZeroVolumeClass: return "zero-volume-class";
    case ErrorKind::NotGraphical: return "not-graphical";
    case ErrorKind::RetriesExhausted: return "retries-exhausted";
    case ErrorKind::LengthMismatch: return "length-mismatch";
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
  }
  return "unknown";
}

bool error_kind_is_numerical(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConvergenceFailure:
    case ErrorKind::RankDeficient:
    case ErrorKind::RankDeficientBlock:
    case ErrorKind::NotSynchronizable:
    case ErrorKind::RetriesExhausted:
      return true;
    default:
      return false;
  }
}

}  // namespace syncgeom
