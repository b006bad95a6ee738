#pragma once

#include <cstdint>

#include "syncgeom/hodge.hpp"

namespace syncgeom {

struct EigenPairs {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns
};

struct EigsOptions {
  int dense_threshold = 2000;  // dense solve at or below this dimension
  double tol = 1e-10;          // relative residual for the iterative path
  int max_iters = 5000;        // matvec budget for the iterative path
  bool force_iterative = false;
};

/// k smallest eigenpairs of a symmetric matrix. Dense Eigen solve up to
/// dense_threshold, Lanczos with full reorthogonalization and locking of
/// converged pairs above it.
EigenPairs smallest_eigenpairs(const SpMat& m, int k, const EigsOptions& opts = {});

/// Spectral-relaxation synchronization output.
struct SyncResult {
  VertexPotential f;
  double eta = 0.0;  // frustration of the raw eigenvector cochain
  double nu = 0.0;   // frustration of the projected potential
  Vector eigenvalues;  // smallest d+1 of D1^{-1} L1
  std::vector<int> degenerate_blocks;  // blocks that fell back to identity
};

/// Relaxation on the normalized connection Laplacian: take the d lowest
/// eigenvectors, map back by D1^{-1/2}, and round each vertex block to the
/// nearest orthogonal matrix. weights_override, when given, replaces the
/// graph weights in the operator assembly.
SyncResult spectral_sync(const WeightedGraph& g, const EdgePotential& rho,
                         const std::vector<double>* weights_override = nullptr);

/// Fast path for certified-synchronizable potentials: one Gram-Schmidt pass
/// over the nd x d eigenvector matrix with columns scaled to norm sqrt(n),
/// then a per-block read-off. Signals NotSynchronizable when the kernel
/// dimension test fails.
SyncResult gram_schmidt_sync(const WeightedGraph& g, const EdgePotential& rho);

/// Lloyd iteration with k-means++ seeding, best of `restarts` runs,
/// deterministic under the seed. Points are rows. Empty clusters are reseeded
/// at the point farthest from its assigned centroid.
std::vector<int> kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = 10);

struct Partition {
  int k = 0;
  std::vector<int> labels;
  std::vector<char> connected_flags;  // per class: induced subgraph connected?
};

/// Normalized-cut clustering: embed by the k lowest eigenvectors of the
/// random-walk Laplacian of (g, weights), row-normalize, k-means.
/// Edges with nonpositive weight are dropped from the operator.
Partition spectral_clustering(const WeightedGraph& g, const std::vector<double>& weights,
                              int k, std::uint64_t seed, int kmeans_restarts = 10);

}  // namespace syncgeom
