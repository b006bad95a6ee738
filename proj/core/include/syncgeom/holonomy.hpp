#pragma once

#include "syncgeom/potentials.hpp"

namespace syncgeom {

/// Default Frobenius threshold on ||H - I|| under which a holonomy generator
/// counts as trivial. Exposed because noisy potentials are the common case.
inline constexpr double kSyncTol = 1e-8;

/// Holonomy of an edge potential in the spanning-tree gauge: one generator
/// per non-tree edge, reported as the gauge-fixed value of rho there.
struct HolonomyReport {
  int base = 0;
  SpanningTree tree;
  std::vector<int> non_tree_edges;
  std::vector<Matrix> generators;
  double max_deviation = 0.0;
  bool synchronizable = false;
  VertexPotential gauge;  // gauge_act(gauge, rho) is identity on tree edges
};

/// Ordered product of rho along an oriented edge sequence. Empty path gives
/// the identity.
Matrix hol_path(const WeightedGraph& g, const EdgePotential& rho,
                const std::vector<OrientedEdge>& path);

/// Same, with the path given as a vertex sequence v0, v1, ..., vN.
Matrix hol_path_vertices(const WeightedGraph& g, const EdgePotential& rho,
                         const std::vector<int>& vertices);

/// Vertex potential with f_root = I and f_j = rho_ji f_i along tree edges
/// (parent(j) = i), so the gauge action kills rho on the whole tree.
VertexPotential tree_gauge(const WeightedGraph& g, const EdgePotential& rho,
                           const SpanningTree& tree);

HolonomyReport holonomy_generators(const WeightedGraph& g, const EdgePotential& rho,
                                   int base = 0, double sync_tol = kSyncTol);

struct SyncDecision {
  bool synchronizable = false;
  double max_deviation = 0.0;
};

/// Synchronizable iff every cycle-basis holonomy is within sync_tol of I.
SyncDecision is_synchronizable(const WeightedGraph& g, const EdgePotential& rho,
                               double sync_tol = kSyncTol);

/// Edge potential with identity on tree edges and the given generators on
/// non-tree edges (generators listed in ascending non-tree edge order).
/// holonomy_generators recovers the assignment exactly under the same tree.
/// d is inferred from the generators when 0; it must be given for tree graphs.
EdgePotential potential_from_generators(const WeightedGraph& g, const SpanningTree& tree,
                                        const std::vector<Matrix>& generators, int d = 0);

}  // namespace syncgeom
