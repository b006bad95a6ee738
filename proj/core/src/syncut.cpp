#include "syncgeom/syncut.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "syncgeom/rng.hpp"

namespace syncgeom {

namespace {

constexpr double kFrustrationZeroRel = 1e-14;
constexpr double kFrustrationZeroAbs = 1e-14;

// Underflow guard: keeps eps_ij > 0 whenever w_ij > 0 even when one edge
// carries nearly all of the frustration.
constexpr double kMinReweightFactor = 1e-290;

}  // namespace

std::vector<double> reweight(const WeightedGraph& g, const VertexPotential& f,
                             const EdgePotential& rho) {
  const std::vector<double> fr = edge_frustrations(f, rho, g);
  double fr_max = 0.0;
  for (double x : fr) fr_max = std::max(fr_max, x);

  std::vector<double> eps(static_cast<size_t>(g.m()));
  // Frustrations count as zero below 1e-14 of the largest one; an exactly
  // synchronizing potential (everything at rounding level) skips reweighting.
  const double zero_cut = kFrustrationZeroRel * fr_max;
  CompensatedSum sum;
  int nonzero = 0;
  if (fr_max > kFrustrationZeroAbs)
    for (double x : fr)
      if (x > zero_cut) {
        sum.add(x);
        ++nonzero;
      }
  if (nonzero == 0) {
    for (int e = 0; e < g.m(); ++e) eps[static_cast<size_t>(e)] = g.weight(e);
    return eps;
  }
  const double sigma = sum.value() / nonzero;
  for (int e = 0; e < g.m(); ++e) {
    const double factor = std::max(std::exp(-fr[static_cast<size_t>(e)] / sigma),
                                   kMinReweightFactor);
    eps[static_cast<size_t>(e)] = g.weight(e) * factor;
  }
  return eps;
}

namespace {

void check_partition(const WeightedGraph& g, const Partition& p) {
  if (static_cast<int>(p.labels.size()) != g.n)
    raise(ErrorKind::DimensionMismatch, "partition label count does not match vertex count");
  std::vector<int> sizes(static_cast<size_t>(p.k), 0);
  for (int l : p.labels) {
    if (l < 0 || l >= p.k) raise(ErrorKind::Validation, "partition label out of range");
    ++sizes[static_cast<size_t>(l)];
  }
  for (int c = 0; c < p.k; ++c)
    if (sizes[static_cast<size_t>(c)] == 0)
      raise(ErrorKind::Validation, "partition class " + std::to_string(c) + " is empty");
}

}  // namespace

VertexPotential collage(const WeightedGraph& g, const EdgePotential& rho,
                        const Partition& partition, const VertexPotential& locals,
                        bool* rank_deficient) {
  check_partition(g, partition);
  if (locals.n() != g.n || locals.d != rho.d)
    raise(ErrorKind::DimensionMismatch, "local potential does not match graph and fibre");
  if (rank_deficient) *rank_deficient = false;
  const int d = rho.d;
  const int k = partition.k;

  // Aggregate each unordered class pair: M_pq = sum over cross edges of
  // w_uv g_u^T rho_uv g_v with u in p, v in q.
  std::vector<Matrix> aggregate(static_cast<size_t>(k) * k);
  std::vector<double> cross_weight(static_cast<size_t>(k) * k, 0.0);
  auto at = [k](int p, int q) { return static_cast<size_t>(p) * k + q; };
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    int p = partition.labels[static_cast<size_t>(ed.u)];
    int q = partition.labels[static_cast<size_t>(ed.v)];
    if (p == q) continue;
    Matrix term = locals.g[static_cast<size_t>(ed.u)].transpose() * rho.forward(e) *
                  locals.g[static_cast<size_t>(ed.v)];
    if (p > q) {
      std::swap(p, q);
      term = term.transpose().eval();
    }
    auto& m = aggregate[at(p, q)];
    if (m.size() == 0) m = Matrix::Zero(d, d);
    m += ed.w * term;
    cross_weight[at(p, q)] += ed.w;
  }

  std::vector<Matrix> h(static_cast<size_t>(k), Matrix::Identity(d, d));
  if (k == 2) {
    // Single polar alignment: h_0 = U V^T from the cross aggregate, h_1 = I.
    const Matrix& m = aggregate[at(0, 1)];
    if (m.size() != 0) {
      try {
        h[0] = project_to_orthogonal(m);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::RankDeficient) throw;
        if (rank_deficient) *rank_deficient = true;
      }
    }
  } else if (k > 2) {
    // Synchronize the reduced graph on the classes. Reduced edge values are
    // the polar projections of the aggregates; absent or rank-deficient
    // aggregates leave the classes uncoupled.
    std::vector<EdgeSpec> specs;
    std::vector<Matrix> blocks;
    for (int p = 0; p < k; ++p)
      for (int q = p + 1; q < k; ++q) {
        const Matrix& m = aggregate[at(p, q)];
        if (m.size() == 0) continue;
        Matrix value;
        try {
          value = project_to_orthogonal(m);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::RankDeficient) throw;
          if (rank_deficient) *rank_deficient = true;
          continue;
        }
        specs.push_back(EdgeSpec{p, q, cross_weight[at(p, q)]});
        blocks.push_back(std::move(value));
      }
    if (!specs.empty()) {
      const WeightedGraph reduced = build_graph(k, specs);
      EdgePotential reduced_rho;
      reduced_rho.d = d;
      reduced_rho.rho.resize(static_cast<size_t>(reduced.m()));
      for (int e = 0; e < reduced.m(); ++e) {
        // build_graph re-sorts edges; match blocks by endpoints.
        const Edge& ed = reduced.edges[static_cast<size_t>(e)];
        for (size_t s = 0; s < specs.size(); ++s)
          if (specs[s].u == ed.u && specs[s].v == ed.v) {
            reduced_rho.rho[static_cast<size_t>(e)] = blocks[s];
            break;
          }
      }
      // Classes in separate reduced components synchronize independently.
      const auto comp = connected_components(reduced);
      const int n_comp = 1 + *std::max_element(comp.begin(), comp.end());
      for (int c = 0; c < n_comp; ++c) {
        std::vector<int> members;
        for (int p = 0; p < k; ++p)
          if (comp[static_cast<size_t>(p)] == c) members.push_back(p);
        if (members.size() <= 1) continue;
        const InducedSubgraph sub = induced_subgraph(reduced, members);
        EdgePotential sub_rho;
        sub_rho.d = d;
        for (int se = 0; se < sub.graph.m(); ++se)
          sub_rho.rho.push_back(reduced_rho.forward(sub.edge_map[static_cast<size_t>(se)]));
        const SyncResult sync = spectral_sync(sub.graph, sub_rho);
        for (size_t i = 0; i < sub.vertices.size(); ++i)
          h[static_cast<size_t>(sub.vertices[i])] = sync.f.g[i];
      }
    }
  }

  VertexPotential out;
  out.d = d;
  out.g.resize(static_cast<size_t>(g.n));
  for (int v = 0; v < g.n; ++v)
    out.g[static_cast<size_t>(v)] =
        locals.g[static_cast<size_t>(v)] * h[static_cast<size_t>(partition.labels[static_cast<size_t>(v)])];
  return out;
}

double objective_xi(const WeightedGraph& g, const EdgePotential& rho,
                    const Partition& partition, const VertexPotential& locals) {
  check_partition(g, partition);
  std::vector<std::vector<int>> classes(static_cast<size_t>(partition.k));
  for (int v = 0; v < g.n; ++v)
    classes[static_cast<size_t>(partition.labels[static_cast<size_t>(v)])].push_back(v);

  CompensatedSum frustration;
  double inv_vol = 0.0;
  for (const auto& members : classes) {
    const double vol = volume(g, members);
    if (!(vol > 0.0))
      raise(ErrorKind::ZeroVolumeClass, "partition class has zero volume");
    inv_vol += 1.0 / vol;
    frustration.add(nu_subgraph(members, locals, rho, g));
  }
  return frustration.value() * inv_vol;
}

namespace {

// Step-4 local synchronization: each class is synchronized on its induced
// subgraph under the dynamic weights, one connected piece at a time.
// Pieces are components of the induced subgraph, so no intra-class cross
// edges exist and the intra-class collage factors are identity; singleton
// pieces get the identity block.
VertexPotential local_synchronize(const WeightedGraph& g, const EdgePotential& rho,
                                  const std::vector<double>& eps, const Partition& partition) {
  VertexPotential locals;
  locals.d = rho.d;
  locals.g.assign(static_cast<size_t>(g.n), Matrix::Identity(rho.d, rho.d));

  for (int c = 0; c < partition.k; ++c) {
    std::vector<int> members;
    for (int v = 0; v < g.n; ++v)
      if (partition.labels[static_cast<size_t>(v)] == c) members.push_back(v);
    const InducedSubgraph sub = induced_subgraph(g, members);
    const auto comp = connected_components(sub.graph);
    const int n_comp = sub.graph.n == 0 ? 0 : 1 + *std::max_element(comp.begin(), comp.end());
    for (int piece = 0; piece < n_comp; ++piece) {
      std::vector<int> piece_vertices;
      for (int v = 0; v < sub.graph.n; ++v)
        if (comp[static_cast<size_t>(v)] == piece) piece_vertices.push_back(v);
      if (piece_vertices.size() <= 1) continue;  // identity block stays
      const InducedSubgraph piece_sub = induced_subgraph(sub.graph, piece_vertices);
      EdgePotential piece_rho;
      piece_rho.d = rho.d;
      std::vector<double> piece_eps;
      for (int se = 0; se < piece_sub.graph.m(); ++se) {
        const int parent_edge = sub.edge_map[static_cast<size_t>(
            piece_sub.edge_map[static_cast<size_t>(se)])];
        piece_rho.rho.push_back(rho.forward(parent_edge));
        piece_eps.push_back(eps[static_cast<size_t>(parent_edge)]);
      }
      const SyncResult sync = spectral_sync(piece_sub.graph, piece_rho, &piece_eps);
      for (size_t i = 0; i < piece_sub.vertices.size(); ++i) {
        const int parent_vertex =
            sub.vertices[static_cast<size_t>(piece_sub.vertices[i])];
        locals.g[static_cast<size_t>(parent_vertex)] = sync.f.g[i];
      }
    }
  }
  return locals;
}

}  // namespace

SynCutResult syncut(const WeightedGraph& g, const EdgePotential& rho,
                    const SynCutConfig& config) {
  if (config.k < 2) raise(ErrorKind::Validation, "syncut needs at least two classes");
  if (config.k > g.n) raise(ErrorKind::TooFewPoints, "more classes than vertices");
  if (config.max_iters < 1) raise(ErrorKind::Validation, "max_iters must be at least 1");
  if (!is_connected(g)) raise(ErrorKind::DisconnectedGraph, "syncut requires a connected graph");

  SynCutResult result;
  std::vector<double> eps(static_cast<size_t>(g.m()));
  for (int e = 0; e < g.m(); ++e) eps[static_cast<size_t>(e)] = g.weight(e);

  double xi_prev = 0.0;
  for (int t = 0; t < config.max_iters; ++t) {
    const SyncResult global = spectral_sync(g, rho, &eps);
    eps = reweight(g, global.f, rho);
    const Partition first_pass =
        spectral_clustering(g, eps, config.k, derive_seed(config.seed, 2 * static_cast<std::uint64_t>(t)),
                            config.kmeans_restarts);

    const VertexPotential locals = local_synchronize(g, rho, eps, first_pass);
    const VertexPotential f_star = collage(g, rho, first_pass, locals);

    eps = reweight(g, f_star, rho);
    const Partition second_pass = spectral_clustering(
        g, eps, config.k, derive_seed(config.seed, 2 * static_cast<std::uint64_t>(t) + 1),
        config.kmeans_restarts);

    const double xi = objective_xi(g, rho, second_pass, f_star);
    result.xi_trace.push_back(xi);
    result.partition = second_pass;
    result.f_star = f_star;

    if (t > 0 && std::abs(xi - xi_prev) < config.xi_tol) break;
    xi_prev = xi;
  }
  result.iterations = static_cast<int>(result.xi_trace.size());
  result.final_edge_frustrations = edge_frustrations(result.f_star, rho, g);
  return result;
}

}  // namespace syncgeom
