#include "syncgeom/holonomy.hpp"

#include <algorithm>
#include <string>

namespace syncgeom {

Matrix hol_path(const WeightedGraph& g, const EdgePotential& rho,
                const std::vector<OrientedEdge>& path) {
  Matrix h = Matrix::Identity(rho.d, rho.d);
  int at = -1;
  for (const OrientedEdge& oe : path) {
    if (oe.edge < 0 || oe.edge >= g.m())
      raise(ErrorKind::NoSuchEdge, "edge index " + std::to_string(oe.edge) + " out of range");
    const int tail = oriented_tail(g, oe);
    if (at >= 0 && tail != at)
      raise(ErrorKind::BrokenPath, "consecutive edges do not share endpoints");
    h = h * rho.value(oe.edge, oe.forward);
    at = oriented_head(g, oe);
  }
  return h;
}

Matrix hol_path_vertices(const WeightedGraph& g, const EdgePotential& rho,
                         const std::vector<int>& vertices) {
  std::vector<OrientedEdge> path;
  for (size_t i = 0; i + 1 < vertices.size(); ++i) {
    const int a = vertices[i], b = vertices[i + 1];
    const auto e = g.find_edge(a, b);
    if (!e)
      raise(ErrorKind::NoSuchEdge,
            "no edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
    path.push_back(OrientedEdge{*e, g.edges[static_cast<size_t>(*e)].u == a});
  }
  return hol_path(g, rho, path);
}

VertexPotential tree_gauge(const WeightedGraph& g, const EdgePotential& rho,
                           const SpanningTree& tree) {
  if (static_cast<int>(tree.bfs_order.size()) != g.n)
    raise(ErrorKind::DisconnectedGraph, "tree gauge requires a connected graph");
  VertexPotential f;
  f.d = rho.d;
  f.g.assign(static_cast<size_t>(g.n), Matrix());
  f.g[static_cast<size_t>(tree.root)] = Matrix::Identity(rho.d, rho.d);
  // BFS order guarantees the parent value exists when a child is visited.
  for (int v : tree.bfs_order) {
    if (v == tree.root) continue;
    const int p = tree.parent[static_cast<size_t>(v)];
    const int e = tree.parent_edge[static_cast<size_t>(v)];
    const bool v_is_tail = g.edges[static_cast<size_t>(e)].u == v;
    // f_v = rho_vp f_p
    f.g[static_cast<size_t>(v)] = rho.value(e, v_is_tail) * f.g[static_cast<size_t>(p)];
  }
  return f;
}

HolonomyReport holonomy_generators(const WeightedGraph& g, const EdgePotential& rho,
                                   int base, double sync_tol) {
  if (static_cast<int>(validate_edge_potential(g, rho, 1e-6).size()) > 0)
    raise(ErrorKind::Validation, "edge potential is not orthogonal");
  HolonomyReport rep;
  rep.base = base;
  rep.tree = spanning_tree(g, base);
  if (static_cast<int>(rep.tree.bfs_order.size()) != g.n)
    raise(ErrorKind::DisconnectedGraph, "holonomy requires a connected graph");
  rep.gauge = tree_gauge(g, rho, rep.tree);

  const Matrix eye = Matrix::Identity(rho.d, rho.d);
  rep.max_deviation = 0.0;
  for (int e = 0; e < g.m(); ++e) {
    if (rep.tree.tree_edge[static_cast<size_t>(e)]) continue;
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    // Gauge-fixed value on the non-tree edge; equals the holonomy of the
    // fundamental cycle conjugated to the base vertex.
    Matrix h = rep.gauge.g[static_cast<size_t>(ed.u)].transpose() * rho.forward(e) *
               rep.gauge.g[static_cast<size_t>(ed.v)];
    rep.max_deviation = std::max(rep.max_deviation, (h - eye).norm());
    rep.non_tree_edges.push_back(e);
    rep.generators.push_back(std::move(h));
  }
  rep.synchronizable = rep.max_deviation <= sync_tol;
  return rep;
}

SyncDecision is_synchronizable(const WeightedGraph& g, const EdgePotential& rho,
                               double sync_tol) {
  const HolonomyReport rep = holonomy_generators(g, rho, 0, sync_tol);
  return SyncDecision{rep.synchronizable, rep.max_deviation};
}

EdgePotential potential_from_generators(const WeightedGraph& g, const SpanningTree& tree,
                                        const std::vector<Matrix>& generators, int d) {
  if (static_cast<int>(tree.bfs_order.size()) != g.n)
    raise(ErrorKind::DisconnectedGraph, "generator assignment requires a connected graph");
  size_t idx = 0;
  for (const Matrix& h : generators) {
    if (h.rows() != h.cols() || h.rows() == 0)
      raise(ErrorKind::DimensionMismatch, "generator is not square");
    if (d == 0) d = static_cast<int>(h.rows());
    if (static_cast<int>(h.rows()) != d)
      raise(ErrorKind::DimensionMismatch, "generators have mixed dimensions");
    if ((h.transpose() * h - Matrix::Identity(d, d)).norm() > 1e-6)
      raise(ErrorKind::Validation, "generator is not orthogonal");
  }
  const int n_non_tree = g.m() - (g.n - 1);
  if (static_cast<int>(generators.size()) != n_non_tree)
    raise(ErrorKind::DimensionMismatch, "expected " + std::to_string(n_non_tree) +
                                            " generators, got " +
                                            std::to_string(generators.size()));
  if (d == 0)
    raise(ErrorKind::DimensionMismatch, "fibre dimension required when no generators are given");

  EdgePotential rho;
  rho.d = d;
  rho.rho.resize(static_cast<size_t>(g.m()));
  for (int e = 0; e < g.m(); ++e) {
    if (tree.tree_edge[static_cast<size_t>(e)])
      rho.rho[static_cast<size_t>(e)] = Matrix::Identity(d, d);
    else
      rho.rho[static_cast<size_t>(e)] = generators[idx++];
  }
  return rho;
}

}  // namespace syncgeom
