#include "syncgeom/potentials.hpp"

#include <Eigen/SVD>
#include <string>

namespace syncgeom {

namespace {

void check_edge_dims(const WeightedGraph& g, const EdgePotential& rho) {
  if (rho.d <= 0) raise(ErrorKind::DimensionMismatch, "edge potential has no fibre dimension");
  if (static_cast<int>(rho.rho.size()) != g.m())
    raise(ErrorKind::DimensionMismatch, "edge potential block count does not match edge count");
}

void check_vertex_dims(const WeightedGraph& g, const VertexPotential& f, int d) {
  if (f.d != d) raise(ErrorKind::DimensionMismatch, "fibre dimensions differ");
  if (f.n() != g.n)
    raise(ErrorKind::DimensionMismatch, "vertex potential block count does not match vertex count");
}

void check_cochain_dims(const WeightedGraph& g, const Cochain0& f, int d) {
  if (f.d != d) raise(ErrorKind::DimensionMismatch, "fibre dimensions differ");
  if (f.n() != g.n)
    raise(ErrorKind::DimensionMismatch, "cochain length does not match vertex count");
}

}  // namespace

EdgePotential identity_edge_potential(const WeightedGraph& g, int d) {
  EdgePotential rho;
  rho.d = d;
  rho.rho.assign(static_cast<size_t>(g.m()), Matrix::Identity(d, d));
  return rho;
}

VertexPotential identity_vertex_potential(int n, int d) {
  VertexPotential f;
  f.d = d;
  f.g.assign(static_cast<size_t>(n), Matrix::Identity(d, d));
  return f;
}

std::vector<int> validate_edge_potential(const WeightedGraph& g, const EdgePotential& rho,
                                         double orth_tol) {
  check_edge_dims(g, rho);
  std::vector<int> violations;
  const Matrix eye = Matrix::Identity(rho.d, rho.d);
  for (int e = 0; e < g.m(); ++e) {
    const Matrix& r = rho.forward(e);
    if (r.rows() != rho.d || r.cols() != rho.d)
      raise(ErrorKind::DimensionMismatch, "block on edge " + std::to_string(e) + " is not d x d");
    if ((r.transpose() * r - eye).norm() > orth_tol) violations.push_back(e);
  }
  return violations;
}

EdgePotential gauge_act(const VertexPotential& f, const EdgePotential& rho,
                        const WeightedGraph& g) {
  check_edge_dims(g, rho);
  check_vertex_dims(g, f, rho.d);
  EdgePotential out;
  out.d = rho.d;
  out.rho.resize(static_cast<size_t>(g.m()));
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    out.rho[static_cast<size_t>(e)] = f.g[static_cast<size_t>(ed.u)].transpose() *
                                      rho.forward(e) * f.g[static_cast<size_t>(ed.v)];
  }
  return out;
}

EdgePotential potential_from_vertex(const VertexPotential& gv, const WeightedGraph& g) {
  if (gv.n() != g.n)
    raise(ErrorKind::DimensionMismatch, "vertex potential block count does not match vertex count");
  EdgePotential rho;
  rho.d = gv.d;
  rho.rho.resize(static_cast<size_t>(g.m()));
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    rho.rho[static_cast<size_t>(e)] =
        gv.g[static_cast<size_t>(ed.u)] * gv.g[static_cast<size_t>(ed.v)].transpose();
  }
  return rho;
}

namespace {

double canonical_edge_frustration(const VertexPotential& f, const EdgePotential& rho,
                                  const WeightedGraph& g, int e) {
  const Edge& ed = g.edges[static_cast<size_t>(e)];
  return (f.g[static_cast<size_t>(ed.u)] - rho.forward(e) * f.g[static_cast<size_t>(ed.v)])
      .squaredNorm();
}

}  // namespace

double edge_frustration(const VertexPotential& f, const EdgePotential& rho,
                        const WeightedGraph& g, int u, int v) {
  check_edge_dims(g, rho);
  check_vertex_dims(g, f, rho.d);
  const auto e = g.find_edge(u, v);
  if (!e)
    raise(ErrorKind::NoSuchEdge,
          "no edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
  return canonical_edge_frustration(f, rho, g, *e);
}

double edge_frustration(const Cochain0& f, const EdgePotential& rho, const WeightedGraph& g,
                        int u, int v) {
  check_edge_dims(g, rho);
  check_cochain_dims(g, f, rho.d);
  const auto e = g.find_edge(u, v);
  if (!e)
    raise(ErrorKind::NoSuchEdge,
          "no edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
  const Edge& ed = g.edges[static_cast<size_t>(*e)];
  return (f.block(ed.u) - rho.forward(*e) * f.block(ed.v)).squaredNorm();
}

std::vector<double> edge_frustrations(const VertexPotential& f, const EdgePotential& rho,
                                      const WeightedGraph& g) {
  check_edge_dims(g, rho);
  check_vertex_dims(g, f, rho.d);
  std::vector<double> out(static_cast<size_t>(g.m()));
  for (int e = 0; e < g.m(); ++e) out[static_cast<size_t>(e)] = canonical_edge_frustration(f, rho, g, e);
  return out;
}

double eta_frustration(const Cochain0& f, const EdgePotential& rho, const WeightedGraph& g) {
  check_edge_dims(g, rho);
  check_cochain_dims(g, f, rho.d);
  CompensatedSum num;
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    num.add(ed.w * (f.block(ed.u) - rho.forward(e) * f.block(ed.v)).squaredNorm());
  }
  CompensatedSum den;
  for (int i = 0; i < g.n; ++i)
    den.add(g.degree[static_cast<size_t>(i)] * f.block(i).squaredNorm());
  if (!(den.value() > 0.0)) raise(ErrorKind::ZeroNorm, "cochain has zero norm");
  // Numerator halves the ordered-pair sum, i.e. equals the sum over canonical
  // edges computed above.
  return num.value() / den.value();
}

double nu_graph(const VertexPotential& f, const EdgePotential& rho, const WeightedGraph& g) {
  check_edge_dims(g, rho);
  check_vertex_dims(g, f, rho.d);
  CompensatedSum sum;
  for (int e = 0; e < g.m(); ++e)
    sum.add(g.weight(e) * canonical_edge_frustration(f, rho, g, e));
  double vol = 0.0;
  for (double di : g.degree) vol += di;
  if (!(vol > 0.0)) raise(ErrorKind::ZeroNorm, "graph has zero volume");
  // Ordered-pair sum = 2x the canonical-edge sum; the 1/2 prefactor cancels it.
  return sum.value() / (rho.d * vol);
}

double nu_subgraph(const std::vector<int>& subset, const VertexPotential& f,
                   const EdgePotential& rho, const WeightedGraph& g) {
  check_edge_dims(g, rho);
  check_vertex_dims(g, f, rho.d);
  if (subset.empty()) raise(ErrorKind::EmptySubset, "subset is empty");
  std::vector<char> in_s(static_cast<size_t>(g.n), 0);
  for (int v : subset) {
    if (v < 0 || v >= g.n) raise(ErrorKind::Validation, "subset vertex out of range");
    in_s[static_cast<size_t>(v)] = 1;
  }
  CompensatedSum sum;
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    if (!in_s[static_cast<size_t>(ed.u)] || !in_s[static_cast<size_t>(ed.v)]) continue;
    // Each intra edge enters once per ordered pair (j,k) and (k,j).
    sum.add(2.0 * ed.w * canonical_edge_frustration(f, rho, g, e));
  }
  return sum.value();
}

Matrix project_to_orthogonal(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    raise(ErrorKind::DimensionMismatch, "polar projection requires a square matrix");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-12 * sv(0)) || sv(0) == 0.0)
    raise(ErrorKind::RankDeficient, "matrix is numerically rank-deficient");
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace syncgeom
