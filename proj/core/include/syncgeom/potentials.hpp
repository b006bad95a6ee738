#pragma once

#include <Eigen/Dense>
#include <vector>

#include "syncgeom/graph.hpp"

namespace syncgeom {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default Frobenius tolerance for "this block is orthogonal".
inline constexpr double kOrthTol = 1e-9;

/// Blocks loaded from files are re-projected to the orthogonal group when
/// within this distance, rejected beyond it.
inline constexpr double kReprojectTol = 1e-6;

/// O(d)-valued edge potential. One d x d block per canonical edge (u -> v);
/// the reverse value is the transpose by the storage convention, so the
/// involution law cannot be violated.
struct EdgePotential {
  int d = 0;
  std::vector<Matrix> rho;  // rho[e] on canonical edge e

  const Matrix& forward(int e) const { return rho[static_cast<size_t>(e)]; }
  Matrix reverse(int e) const { return rho[static_cast<size_t>(e)].transpose(); }
  Matrix value(int e, bool fwd) const { return fwd ? forward(e) : reverse(e); }
};

/// O(d)-valued vertex potential.
struct VertexPotential {
  int d = 0;
  std::vector<Matrix> g;

  int n() const { return static_cast<int>(g.size()); }
};

/// Vector-valued vertex assignment: one vector in R^d per vertex, optionally
/// k stacked columns. Stored as the (n*d) x k representative matrix.
struct Cochain0 {
  int d = 0;
  Matrix values;

  int n() const { return d == 0 ? 0 : static_cast<int>(values.rows()) / d; }
  int cols() const { return static_cast<int>(values.cols()); }

  auto block(int i) { return values.middleRows(static_cast<Eigen::Index>(i) * d, d); }
  auto block(int i) const { return values.middleRows(static_cast<Eigen::Index>(i) * d, d); }

  static Cochain0 zero(int n, int d, int k = 1) {
    Cochain0 c;
    c.d = d;
    c.values = Matrix::Zero(static_cast<Eigen::Index>(n) * d, k);
    return c;
  }
};

EdgePotential identity_edge_potential(const WeightedGraph& g, int d);
VertexPotential identity_vertex_potential(int n, int d);

/// Edges whose block fails ||rho^T rho - I||_F <= orth_tol.
std::vector<int> validate_edge_potential(const WeightedGraph& g, const EdgePotential& rho,
                                         double orth_tol = kOrthTol);

/// Right action of vertex potentials on edge potentials:
/// result_uv = f_u^T rho_uv f_v.
EdgePotential gauge_act(const VertexPotential& f, const EdgePotential& rho,
                        const WeightedGraph& g);

/// rho_uv = g_u g_v^T; synchronizable by construction.
EdgePotential potential_from_vertex(const VertexPotential& gv, const WeightedGraph& g);

/// ||f_u - rho_uv f_v||_F^2 on one edge; symmetric in orientation.
double edge_frustration(const VertexPotential& f, const EdgePotential& rho,
                        const WeightedGraph& g, int u, int v);
double edge_frustration(const Cochain0& f, const EdgePotential& rho,
                        const WeightedGraph& g, int u, int v);

/// Frustration of every canonical edge at the supplied potential.
std::vector<double> edge_frustrations(const VertexPotential& f, const EdgePotential& rho,
                                      const WeightedGraph& g);

/// Normalized frustration of a vector-valued cochain:
///   (1/2) sum_{ordered ij} w_ij ||f_i - rho_ij f_j||^2 / sum_i d_i ||f_i||^2.
double eta_frustration(const Cochain0& f, const EdgePotential& rho, const WeightedGraph& g);

/// Frustration of a group-valued potential over the whole graph:
///   (1/2d) (1/vol) sum_{ordered ij} w_ij ||g_i - rho_ij g_j||_F^2.
double nu_graph(const VertexPotential& f, const EdgePotential& rho, const WeightedGraph& g);

/// Unnormalized frustration over ordered intra-subset pairs:
///   sum_{j,k in S, (j,k) adjacent} w_jk ||f_j - rho_jk f_k||_F^2,
/// i.e. twice the sum over unordered intra-S edges.
double nu_subgraph(const std::vector<int>& subset, const VertexPotential& f,
                   const EdgePotential& rho, const WeightedGraph& g);

/// Nearest orthogonal matrix U V^T from the SVD M = U S V^T. Signals
/// RankDeficient when the smallest singular value drops below 1e-12 times the
/// largest; the caller decides the fallback.
Matrix project_to_orthogonal(const Matrix& m);

/// Kahan-compensated accumulator for frustration sums.
class CompensatedSum {
public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace syncgeom
