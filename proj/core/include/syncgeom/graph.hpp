#pragma once

#include <optional>
#include <vector>

#include "syncgeom/errors.hpp"

namespace syncgeom {

struct EdgeSpec {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

/// Canonical edge: endpoints stored with u < v, which fixes the orientation
/// u -> v. Directed quantities on the reverse orientation are derived, never
/// stored.
struct Edge {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

struct AdjEntry {
  int to = 0;      // neighbor vertex
  int edge = 0;    // canonical edge index
  bool tail = false;  // true when this vertex is u, i.e. the edge leaves it
};

/// Undirected weighted graph, immutable after construction. Adjacency lists
/// are sorted by neighbor id so traversals are deterministic.
struct WeightedGraph {
  int n = 0;
  std::vector<Edge> edges;
  std::vector<std::vector<AdjEntry>> adj;
  std::vector<double> degree;  // weighted degree d_i

  int m() const { return static_cast<int>(edges.size()); }

  std::optional<int> find_edge(int u, int v) const;

  /// Value of the canonical weight on edge e.
  double weight(int e) const { return edges[static_cast<size_t>(e)].w; }
};

WeightedGraph build_graph(int n, const std::vector<EdgeSpec>& edge_list);

/// Convenience overload: n inferred as max vertex id + 1.
WeightedGraph build_graph(const std::vector<EdgeSpec>& edge_list);

/// Same topology, new weights (one per canonical edge, all > 0).
WeightedGraph with_weights(const WeightedGraph& g, const std::vector<double>& weights);

/// Rooted BFS forest. parent_edge[v] is the canonical edge towards the parent
/// (-1 at the root and on vertices outside the root's component).
struct SpanningTree {
  int root = 0;
  std::vector<int> parent;       // parent vertex, -1 where absent
  std::vector<int> parent_edge;  // canonical edge to parent, -1 where absent
  std::vector<char> tree_edge;   // per canonical edge
  std::vector<int> bfs_order;    // vertices of the root's component, root first
};

SpanningTree spanning_tree(const WeightedGraph& g, int root);

struct OrientedEdge {
  int edge = 0;
  bool forward = true;  // true: traversed u -> v
};

/// Fundamental cycles, one per non-tree edge. Each cycle traverses its
/// non-tree edge in the canonical direction and closes through the tree,
/// returning to the non-tree edge's tail.
struct CycleBasis {
  std::vector<int> non_tree_edges;
  std::vector<std::vector<OrientedEdge>> cycles;
};

CycleBasis cycle_basis(const WeightedGraph& g, const SpanningTree& t);

/// Component labels, contiguous from 0 in order of first appearance by
/// vertex id.
std::vector<int> connected_components(const WeightedGraph& g);

bool is_connected(const WeightedGraph& g);

/// Sum of weighted degrees (taken in the full graph) over the subset.
double volume(const WeightedGraph& g, const std::vector<int>& subset);

/// Subgraph induced by a vertex subset, with vertex and edge maps back to the
/// parent graph.
struct InducedSubgraph {
  WeightedGraph graph;
  std::vector<int> vertices;  // sub id -> parent id
  std::vector<int> edge_map;  // sub edge -> parent edge
};

InducedSubgraph induced_subgraph(const WeightedGraph& g, const std::vector<int>& vertices);

/// Tail and head of an oriented edge traversal.
inline int oriented_tail(const WeightedGraph& g, OrientedEdge oe) {
  const Edge& e = g.edges[static_cast<size_t>(oe.edge)];
  return oe.forward ? e.u : e.v;
}
inline int oriented_head(const WeightedGraph& g, OrientedEdge oe) {
  const Edge& e = g.edges[static_cast<size_t>(oe.edge)];
  return oe.forward ? e.v : e.u;
}

}  // namespace syncgeom
