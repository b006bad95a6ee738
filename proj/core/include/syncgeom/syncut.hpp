#pragma once

#include "syncgeom/solver.hpp"

namespace syncgeom {

struct SynCutConfig {
  int k = 2;
  int max_iters = 10;
  double xi_tol = 1e-8;
  std::uint64_t seed = 0;
  int kmeans_restarts = 10;
};

struct SynCutResult {
  Partition partition;       // second-pass clustering of the final iteration
  VertexPotential f_star;    // most recent collage
  std::vector<double> xi_trace;
  int iterations = 0;
  std::vector<double> final_edge_frustrations;  // per canonical edge, at f_star
};

/// Frustration-driven reweighting: eps_ij = w_ij exp(-fr_ij / sigma) with
/// sigma the mean of the nonzero edge frustrations (zero meaning below 1e-14
/// relative to the largest). When every frustration is zero the weights pass
/// through unchanged.
std::vector<double> reweight(const WeightedGraph& g, const VertexPotential& f,
                             const EdgePotential& rho);

/// Align per-class local solutions by one right factor per class, minimizing
/// the total cross-partition frustration. locals holds g^(l)_u at each vertex
/// u of class l. K=2 reduces to a single polar alignment; K>2 synchronizes
/// the reduced complete graph on the classes. A rank-deficient aggregate
/// falls back to the identity factor and sets *rank_deficient.
VertexPotential collage(const WeightedGraph& g, const EdgePotential& rho,
                        const Partition& partition, const VertexPotential& locals,
                        bool* rank_deficient = nullptr);

/// xi = (sum_l nu(S_l)) * (sum_k 1 / vol(S_k)), with nu evaluated at the
/// supplied potentials over intra-class edges and volumes taken in the
/// original weights.
double objective_xi(const WeightedGraph& g, const EdgePotential& rho,
                    const Partition& partition, const VertexPotential& locals);

/// Iterative reweighting / clustering / local synchronization / collage loop.
/// Stops when |xi_t - xi_{t-1}| < xi_tol or after max_iters iterations.
SynCutResult syncut(const WeightedGraph& g, const EdgePotential& rho,
                    const SynCutConfig& config);

}  // namespace syncgeom
