#include "syncgeom/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "syncgeom/rng.hpp"

namespace syncgeom {

namespace {

EigenPairs dense_smallest(const SpMat& m, int k) {
  const Matrix dense_m(m);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(dense_m);
  if (eig.info() != Eigen::Success)
    raise(ErrorKind::ConvergenceFailure, "dense eigensolver failed");
  EigenPairs out;
  out.values = eig.eigenvalues().head(k);
  out.vectors = eig.eigenvectors().leftCols(k);
  return out;
}

// Lanczos with full reorthogonalization. Converged Ritz pairs are locked and
// deflated; the basis restarts from the current best Ritz vector when it hits
// the cap, so memory stays bounded.
EigenPairs lanczos_smallest(const SpMat& m, int k, double tol, int max_iters) {
  const Eigen::Index n = m.rows();
  const int basis_cap = static_cast<int>(std::min<Eigen::Index>(n, std::max(4 * k + 40, 80)));

  Matrix locked_vecs(n, 0);
  std::vector<double> locked_vals;
  int matvecs = 0;
  double norm_est = 1.0;

  auto deflate = [&](Vector& v) {
    if (locked_vecs.cols() > 0) v -= locked_vecs * (locked_vecs.transpose() * v);
  };

  while (static_cast<int>(locked_vals.size()) < k) {
    Rng rng(0x5eedull + static_cast<std::uint64_t>(locked_vals.size()));
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
    deflate(v);
    if (v.norm() < 1e-12) raise(ErrorKind::ConvergenceFailure, "start vector deflated to zero");
    v /= v.norm();

    Matrix basis(n, basis_cap);
    std::vector<double> alpha, beta;
    basis.col(0) = v;
    int j = 0;
    bool locked_this_round = false;

    while (!locked_this_round) {
      if (matvecs >= max_iters)
        raise(ErrorKind::ConvergenceFailure,
              "Lanczos exceeded " + std::to_string(max_iters) + " iterations");
      Vector w = m * basis.col(j);
      ++matvecs;
      const double a = basis.col(j).dot(w);
      alpha.push_back(a);
      w -= a * basis.col(j);
      if (j > 0) w -= beta[static_cast<size_t>(j - 1)] * basis.col(j - 1);
      // Full reorthogonalization, twice, against locked and active vectors.
      for (int pass = 0; pass < 2; ++pass) {
        deflate(w);
        w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
      }
      const double b = w.norm();

      // Ritz extraction from the tridiagonal section.
      Matrix t = Matrix::Zero(j + 1, j + 1);
      for (int i = 0; i <= j; ++i) t(i, i) = alpha[static_cast<size_t>(i)];
      for (int i = 0; i < j; ++i) {
        t(i, i + 1) = beta[static_cast<size_t>(i)];
        t(i + 1, i) = beta[static_cast<size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Matrix> teig(t);
      const double theta = teig.eigenvalues()(0);
      norm_est = std::max({norm_est, std::abs(teig.eigenvalues()(j)), std::abs(theta)});
      const double resid = std::abs(b * teig.eigenvectors()(j, 0));

      if (resid <= tol * norm_est || b <= 1e-14 * norm_est) {
        Vector y = basis.leftCols(j + 1) * teig.eigenvectors().col(0);
        deflate(y);
        const double ny = y.norm();
        if (ny < 1e-12) raise(ErrorKind::ConvergenceFailure, "Ritz vector deflated to zero");
        y /= ny;
        locked_vecs.conservativeResize(n, locked_vecs.cols() + 1);
        locked_vecs.col(locked_vecs.cols() - 1) = y;
        locked_vals.push_back(theta);
        locked_this_round = true;
      } else if (j + 1 >= basis_cap) {
        // Restart from the best Ritz vector.
        Vector y = basis.leftCols(j + 1) * teig.eigenvectors().col(0);
        deflate(y);
        y /= y.norm();
        basis.col(0) = y;
        alpha.clear();
        beta.clear();
        j = 0;
      } else {
        beta.push_back(b);
        basis.col(j + 1) = w / b;
        ++j;
      }
    }
  }

  // Sequential locking converges eigenvalues from below; sort defensively.
  std::vector<int> order(locked_vals.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return locked_vals[static_cast<size_t>(a)] < locked_vals[static_cast<size_t>(b)]; });
  EigenPairs out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  for (int i = 0; i < k; ++i) {
    out.values(i) = locked_vals[static_cast<size_t>(order[static_cast<size_t>(i)])];
    out.vectors.col(i) = locked_vecs.col(order[static_cast<size_t>(i)]);
  }
  return out;
}

}  // namespace

EigenPairs smallest_eigenpairs(const SpMat& m, int k, const EigsOptions& opts) {
  if (m.rows() != m.cols()) raise(ErrorKind::DimensionMismatch, "matrix is not square");
  if (k <= 0 || k > m.rows())
    raise(ErrorKind::Validation, "requested eigenpair count out of range");
  if (!opts.force_iterative && m.rows() <= opts.dense_threshold) return dense_smallest(m, k);
  return lanczos_smallest(m, k, opts.tol, opts.max_iters);
}

namespace {

struct SyncBasis {
  Matrix x;           // nd x d back-mapped eigenvectors
  Vector eigenvalues; // smallest min(d+1, nd)
};

SyncBasis sync_basis(const WeightedGraph& g, const EdgePotential& rho) {
  const TwistedOperators ops = build_operators(g, rho);
  const Eigen::Index nd = ops.D1_diag.size();
  const int d = rho.d;
  if (nd < d) raise(ErrorKind::DimensionMismatch, "graph too small for fibre dimension");
  const int k = static_cast<int>(std::min<Eigen::Index>(d + 1, nd));
  EigenPairs eigs = smallest_eigenpairs(normalized_laplacian(ops), k);
  SyncBasis out;
  out.eigenvalues = eigs.values;
  out.x = ops.D1_diag.cwiseSqrt().cwiseInverse().asDiagonal() * eigs.vectors.leftCols(d);
  return out;
}

}  // namespace

SyncResult spectral_sync(const WeightedGraph& g, const EdgePotential& rho,
                         const std::vector<double>* weights_override) {
  const WeightedGraph active = weights_override ? with_weights(g, *weights_override) : g;
  if (!is_connected(active))
    raise(ErrorKind::DisconnectedGraph, "spectral synchronization requires a connected graph");
  const int d = rho.d;
  SyncBasis basis = sync_basis(active, rho);

  Cochain0 raw;
  raw.d = d;
  raw.values = basis.x;

  SyncResult res;
  res.eigenvalues = basis.eigenvalues;
  res.eta = eta_frustration(raw, rho, active);
  res.f.d = d;
  res.f.g.resize(static_cast<size_t>(g.n));
  for (int i = 0; i < g.n; ++i) {
    const Matrix block = basis.x.middleRows(static_cast<Eigen::Index>(i) * d, d);
    try {
      res.f.g[static_cast<size_t>(i)] = project_to_orthogonal(block);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::RankDeficient) throw;
      res.f.g[static_cast<size_t>(i)] = Matrix::Identity(d, d);
      res.degenerate_blocks.push_back(i);
    }
  }
  res.nu = nu_graph(res.f, rho, active);
  return res;
}

SyncResult gram_schmidt_sync(const WeightedGraph& g, const EdgePotential& rho) {
  if (!is_connected(g))
    raise(ErrorKind::DisconnectedGraph, "synchronization requires a connected graph");
  const int d = rho.d;
  const KernelReport kernel = kernel_dim(g, rho);
  if (kernel.dim != d)
    raise(ErrorKind::NotSynchronizable,
          "kernel dimension " + std::to_string(kernel.dim) + " != fibre dimension " +
              std::to_string(d));

  SyncBasis basis = sync_basis(g, rho);
  Cochain0 raw;
  raw.d = d;
  raw.values = basis.x;

  // One Gram-Schmidt pass over the nd x d kernel basis; columns are scaled to
  // norm sqrt(n) so the vertex blocks read off as orthogonal matrices.
  Matrix q = basis.x;
  const double target = std::sqrt(static_cast<double>(g.n));
  for (int j = 0; j < d; ++j) {
    for (int l = 0; l < j; ++l)
      q.col(j) -= (q.col(l).dot(q.col(j)) / q.col(l).squaredNorm()) * q.col(l);
    const double nj = q.col(j).norm();
    if (nj < 1e-12)
      raise(ErrorKind::NotSynchronizable, "kernel basis is numerically degenerate");
    q.col(j) *= target / nj;
  }

  SyncResult res;
  res.eigenvalues = basis.eigenvalues;
  res.eta = eta_frustration(raw, rho, g);
  res.f.d = d;
  res.f.g.resize(static_cast<size_t>(g.n));
  for (int i = 0; i < g.n; ++i)
    res.f.g[static_cast<size_t>(i)] = q.middleRows(static_cast<Eigen::Index>(i) * d, d);
  res.nu = nu_graph(res.f, rho, g);
  return res;
}

namespace {

Matrix kmeanspp_seed(const Matrix& points, int k, Rng& rng) {
  const Eigen::Index npts = points.rows();
  Matrix centroids(k, points.cols());
  std::vector<char> chosen(static_cast<size_t>(npts), 0);
  Eigen::Index first = rng.uniform_int(0, npts - 1);
  centroids.row(0) = points.row(first);
  chosen[static_cast<size_t>(first)] = 1;

  Vector d2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < npts; ++i) {
        acc += d2(i);
        if (acc >= r) { pick = i; break; }
      }
      if (pick < 0) pick = npts - 1;
    } else {
      // All remaining points coincide with chosen centroids; take the lowest
      // unchosen index.
      for (Eigen::Index i = 0; i < npts; ++i)
        if (!chosen[static_cast<size_t>(i)]) { pick = i; break; }
      if (pick < 0) pick = 0;
    }
    centroids.row(c) = points.row(pick);
    chosen[static_cast<size_t>(pick)] = 1;
    d2 = d2.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

}  // namespace

std::vector<int> kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts) {
  const Eigen::Index npts = points.rows();
  if (k <= 0) raise(ErrorKind::Validation, "cluster count must be positive");
  if (npts < k) raise(ErrorKind::TooFewPoints, "fewer points than clusters");
  if (restarts < 1) restarts = 1;

  std::vector<int> best_labels;
  double best_obj = std::numeric_limits<double>::infinity();

  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Matrix centroids = kmeanspp_seed(points, k, rng);
    std::vector<int> labels(static_cast<size_t>(npts), 0);

    for (int iter = 0; iter < 100; ++iter) {
      bool changed = false;
      std::vector<int> counts(static_cast<size_t>(k), 0);
      for (Eigen::Index i = 0; i < npts; ++i) {
        int arg = 0;
        double bd = (points.row(i) - centroids.row(0)).squaredNorm();
        for (int c = 1; c < k; ++c) {
          const double dd = (points.row(i) - centroids.row(c)).squaredNorm();
          if (dd < bd) { bd = dd; arg = c; }  // ties keep the lower index
        }
        if (labels[static_cast<size_t>(i)] != arg) changed = true;
        labels[static_cast<size_t>(i)] = arg;
        ++counts[static_cast<size_t>(arg)];
      }

      // Reseed each empty cluster at the point farthest from its assigned
      // centroid (ties resolve to the lowest point index).
      for (int c = 0; c < k; ++c) {
        if (counts[static_cast<size_t>(c)] > 0) continue;
        Eigen::Index far = -1;
        double fd = -1.0;
        for (Eigen::Index i = 0; i < npts; ++i) {
          const int li = labels[static_cast<size_t>(i)];
          if (counts[static_cast<size_t>(li)] <= 1) continue;
          const double dd = (points.row(i) - centroids.row(li)).squaredNorm();
          if (dd > fd) { fd = dd; far = i; }
        }
        if (far < 0) continue;
        --counts[static_cast<size_t>(labels[static_cast<size_t>(far)])];
        labels[static_cast<size_t>(far)] = c;
        counts[static_cast<size_t>(c)] = 1;
        centroids.row(c) = points.row(far);
        changed = true;
      }

      centroids.setZero();
      for (Eigen::Index i = 0; i < npts; ++i)
        centroids.row(labels[static_cast<size_t>(i)]) += points.row(i);
      for (int c = 0; c < k; ++c)
        if (counts[static_cast<size_t>(c)] > 0) centroids.row(c) /= counts[static_cast<size_t>(c)];

      if (!changed) break;
    }

    double obj = 0.0;
    for (Eigen::Index i = 0; i < npts; ++i)
      obj += (points.row(i) - centroids.row(labels[static_cast<size_t>(i)])).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      best_labels = labels;
    }
  }
  return best_labels;
}

namespace {

std::vector<char> class_connected_flags(const WeightedGraph& g,
                                        const std::vector<double>& weights,
                                        const std::vector<int>& labels, int k) {
  std::vector<char> flags(static_cast<size_t>(k), 1);
  for (int c = 0; c < k; ++c) {
    std::vector<int> members;
    for (int v = 0; v < g.n; ++v)
      if (labels[static_cast<size_t>(v)] == c) members.push_back(v);
    if (members.size() <= 1) continue;
    // BFS within the class over positive-weight edges.
    std::vector<char> seen(static_cast<size_t>(g.n), 0);
    std::vector<int> stack{members[0]};
    seen[static_cast<size_t>(members[0])] = 1;
    size_t reached = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const AdjEntry& a : g.adj[static_cast<size_t>(u)]) {
        if (weights[static_cast<size_t>(a.edge)] <= 0.0) continue;
        if (labels[static_cast<size_t>(a.to)] != c || seen[static_cast<size_t>(a.to)]) continue;
        seen[static_cast<size_t>(a.to)] = 1;
        ++reached;
        stack.push_back(a.to);
      }
    }
    flags[static_cast<size_t>(c)] = reached == members.size() ? 1 : 0;
  }
  return flags;
}

}  // namespace

Partition spectral_clustering(const WeightedGraph& g, const std::vector<double>& weights,
                              int k, std::uint64_t seed, int kmeans_restarts) {
  if (static_cast<int>(weights.size()) != g.m())
    raise(ErrorKind::DimensionMismatch, "weight vector length does not match edge count");
  if (k <= 0) raise(ErrorKind::Validation, "cluster count must be positive");
  if (k > g.n) raise(ErrorKind::TooFewPoints, "more clusters than vertices");

  double wmax = 0.0;
  for (double w : weights) wmax = std::max(wmax, w);
  if (!(wmax >= 1e-300)) raise(ErrorKind::DegenerateWeights, "all weights vanish");

  // Random-walk Laplacian of (g, weights) through its symmetric similarity.
  Vector deg = Vector::Zero(g.n);
  for (int e = 0; e < g.m(); ++e) {
    const double w = weights[static_cast<size_t>(e)];
    if (w <= 0.0) continue;
    deg(g.edges[static_cast<size_t>(e)].u) += w;
    deg(g.edges[static_cast<size_t>(e)].v) += w;
  }
  Vector inv_sqrt(g.n);
  for (int i = 0; i < g.n; ++i) inv_sqrt(i) = deg(i) > 0.0 ? 1.0 / std::sqrt(deg(i)) : 0.0;

  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < g.n; ++i) trip.emplace_back(i, i, 1.0);
  for (int e = 0; e < g.m(); ++e) {
    const double w = weights[static_cast<size_t>(e)];
    if (w <= 0.0) continue;
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    const double s = -w * inv_sqrt(ed.u) * inv_sqrt(ed.v);
    trip.emplace_back(ed.u, ed.v, s);
    trip.emplace_back(ed.v, ed.u, s);
  }
  SpMat sym(g.n, g.n);
  sym.setFromTriplets(trip.begin(), trip.end());

  EigenPairs eigs = smallest_eigenpairs(sym, k);
  Matrix embed = inv_sqrt.asDiagonal() * eigs.vectors;
  for (Eigen::Index i = 0; i < embed.rows(); ++i) {
    const double norm = embed.row(i).norm();
    if (norm > 0.0) embed.row(i) /= norm;
  }

  Partition part;
  part.k = k;
  part.labels = kmeans(embed, k, seed, kmeans_restarts);
  part.connected_flags = class_connected_flags(g, weights, part.labels, k);
  return part;
}

}  // namespace syncgeom
