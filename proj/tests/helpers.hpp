#pragma once

#include <vector>

#include "syncgeom/hodge.hpp"
#include "syncgeom/netgen.hpp"
#include "syncgeom/rng.hpp"

namespace syncgeom::test {

/// Random connected graph: a random recursive tree plus extra distinct edges,
/// weights uniform in [0.5, 2.0].
inline WeightedGraph random_connected_graph(int n, int extra_edges, Rng& rng) {
  std::vector<EdgeSpec> specs;
  for (int v = 1; v < n; ++v) {
    const int p = static_cast<int>(rng.uniform_int(0, v - 1));
    specs.push_back(EdgeSpec{p, v, 0.5 + 1.5 * rng.uniform()});
  }
  auto exists = [&](int a, int b) {
    for (const EdgeSpec& e : specs)
      if ((e.u == a && e.v == b) || (e.u == b && e.v == a)) return true;
    return false;
  };
  int added = 0, guard = 0;
  const long long max_extra = static_cast<long long>(n) * (n - 1) / 2 - (n - 1);
  extra_edges = static_cast<int>(std::min<long long>(extra_edges, max_extra));
  while (added < extra_edges && guard < 100000) {
    ++guard;
    const int a = static_cast<int>(rng.uniform_int(0, n - 1));
    const int b = static_cast<int>(rng.uniform_int(0, n - 1));
    if (a == b || exists(a, b)) continue;
    specs.push_back(EdgeSpec{a, b, 0.5 + 1.5 * rng.uniform()});
    ++added;
  }
  return build_graph(n, specs);
}

inline VertexPotential haar_vertex_potential(int n, int d, Rng& rng) {
  VertexPotential f;
  f.d = d;
  f.g.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) f.g.push_back(random_orthogonal(d, rng));
  return f;
}

inline EdgePotential haar_edge_potential(const WeightedGraph& g, int d, Rng& rng) {
  EdgePotential rho;
  rho.d = d;
  rho.rho.reserve(static_cast<size_t>(g.m()));
  for (int e = 0; e < g.m(); ++e) rho.rho.push_back(random_orthogonal(d, rng));
  return rho;
}

inline Cochain0 gaussian_cochain(int n, int d, int k, Rng& rng) {
  Cochain0 f = Cochain0::zero(n, d, k);
  for (Eigen::Index i = 0; i < f.values.rows(); ++i)
    for (Eigen::Index j = 0; j < f.values.cols(); ++j) f.values(i, j) = rng.normal();
  return f;
}

inline TwistedOneForm gaussian_one_form(int m, int d, int k, Rng& rng) {
  TwistedOneForm w = TwistedOneForm::zero(m, d, k);
  for (Eigen::Index i = 0; i < w.coeffs.rows(); ++i)
    for (Eigen::Index j = 0; j < w.coeffs.cols(); ++j) w.coeffs(i, j) = rng.normal();
  return w;
}

inline double max_block_diff(const VertexPotential& a, const VertexPotential& b) {
  double out = 0.0;
  for (size_t i = 0; i < a.g.size(); ++i)
    out = std::max(out, (a.g[i] - b.g[i]).norm());
  return out;
}

}  // namespace syncgeom::test
