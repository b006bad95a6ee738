#include "syncgeom/netgen.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

namespace syncgeom {

bool degree_sequence_graphical(const std::vector<int>& degrees) {
  const int n = static_cast<int>(degrees.size());
  long long sum = 0;
  for (int d : degrees) {
    if (d < 0 || d >= n) return false;
    sum += d;
  }
  if (sum % 2 != 0) return false;
  std::vector<int> s = degrees;
  std::sort(s.begin(), s.end(), std::greater<int>());
  std::vector<long long> prefix(static_cast<size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) prefix[static_cast<size_t>(i) + 1] = prefix[static_cast<size_t>(i)] + s[static_cast<size_t>(i)];
  for (int k = 1; k <= n; ++k) {
    long long rhs = static_cast<long long>(k) * (k - 1);
    for (int i = k; i < n; ++i) rhs += std::min(s[static_cast<size_t>(i)], k);
    if (prefix[static_cast<size_t>(k)] > rhs) return false;
  }
  return true;
}

namespace {

// One sequential-sampling pass: exhaust the minimum-degree vertex's stubs,
// connecting only to candidates that keep the residual sequence graphical.
// Returns false when the pass gets stuck (caller retries).
bool sample_realization(const std::vector<int>& degrees, Rng& rng,
                        std::vector<EdgeSpec>& out) {
  const int n = static_cast<int>(degrees.size());
  std::vector<int> residual = degrees;
  std::set<std::pair<int, int>> used;
  out.clear();

  auto remaining = [&] {
    return std::accumulate(residual.begin(), residual.end(), 0);
  };

  while (remaining() > 0) {
    int i = -1;
    for (int v = 0; v < n; ++v)
      if (residual[static_cast<size_t>(v)] > 0 &&
          (i < 0 || residual[static_cast<size_t>(v)] < residual[static_cast<size_t>(i)]))
        i = v;
    while (residual[static_cast<size_t>(i)] > 0) {
      std::vector<int> candidates;
      std::vector<double> weights;
      for (int j = 0; j < n; ++j) {
        if (j == i || residual[static_cast<size_t>(j)] == 0) continue;
        const auto key = std::minmax(i, j);
        if (used.count({key.first, key.second})) continue;
        --residual[static_cast<size_t>(i)];
        --residual[static_cast<size_t>(j)];
        const bool ok = degree_sequence_graphical(residual);
        ++residual[static_cast<size_t>(i)];
        ++residual[static_cast<size_t>(j)];
        if (!ok) continue;
        candidates.push_back(j);
        weights.push_back(static_cast<double>(residual[static_cast<size_t>(j)]));
      }
      if (candidates.empty()) return false;
      const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
      const double r = rng.uniform() * total;
      double acc = 0.0;
      int pick = candidates.back();
      for (size_t c = 0; c < candidates.size(); ++c) {
        acc += weights[c];
        if (acc >= r) {
          pick = candidates[c];
          break;
        }
      }
      const auto key = std::minmax(i, pick);
      used.insert({key.first, key.second});
      out.push_back(EdgeSpec{key.first, key.second, 1.0});
      --residual[static_cast<size_t>(i)];
      --residual[static_cast<size_t>(pick)];
    }
  }
  return true;
}

}  // namespace

WeightedGraph random_connected_degree_graph(const std::vector<int>& degrees, Rng& rng) {
  if (!degree_sequence_graphical(degrees))
    raise(ErrorKind::NotGraphical, "degree sequence is not graphical");
  const int n = static_cast<int>(degrees.size());
  std::vector<EdgeSpec> edges;
  for (int attempt = 0; attempt < 100; ++attempt) {
    if (!sample_realization(degrees, rng, edges)) continue;
    WeightedGraph g = build_graph(n, edges);
    if (is_connected(g)) return g;
  }
  raise(ErrorKind::RetriesExhausted, "no connected realization in 100 attempts");
}

Matrix random_orthogonal(int d, Rng& rng) {
  if (d < 1) raise(ErrorKind::Validation, "dimension must be at least 1");
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fold the R diagonal signs into Q; makes the draw Haar rather than
  // QR-convention biased.
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

namespace {

double normalized_laplacian_gap(const WeightedGraph& g) {
  Vector inv_sqrt(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double di = g.degree[static_cast<size_t>(i)];
    inv_sqrt(i) = di > 0.0 ? 1.0 / std::sqrt(di) : 0.0;
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < g.n; ++i) trip.emplace_back(i, i, 1.0);
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    const double s = -ed.w * inv_sqrt(ed.u) * inv_sqrt(ed.v);
    trip.emplace_back(ed.u, ed.v, s);
    trip.emplace_back(ed.v, ed.u, s);
  }
  SpMat sym(g.n, g.n);
  sym.setFromTriplets(trip.begin(), trip.end());
  const Vector vals = smallest_eigenpairs(sym, std::min(2, g.n)).values;
  return vals.size() > 1 ? vals(1) : 0.0;
}

std::vector<int> draw_graphical_sequence(int n, int lo, int hi, Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<int> deg(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      deg[static_cast<size_t>(i)] = static_cast<int>(rng.uniform_int(lo, hi));
    if (degree_sequence_graphical(deg)) return deg;
  }
  raise(ErrorKind::NotGraphical, "no graphical degree sequence in 100 draws");
}

}  // namespace

SimInstance simulate_network(const SimConfig& config, std::uint64_t seed) {
  const int n_comp = config.n_per_component;
  if (n_comp < 2) raise(ErrorKind::Validation, "components need at least two vertices");
  if (config.d < 1) raise(ErrorKind::Validation, "fibre dimension must be at least 1");
  if (config.degree_min < 1 || config.degree_min > config.degree_max ||
      config.degree_max >= n_comp)
    raise(ErrorKind::Validation, "degree bounds must satisfy 1 <= min <= max < n_per_component");
  if (config.inter_links_min < 1 || config.inter_links_min > config.inter_links_max)
    raise(ErrorKind::Validation, "inter-link bounds must satisfy 1 <= min <= max");
  const long long cross_pairs = static_cast<long long>(n_comp) * n_comp;
  if (config.inter_links_max > cross_pairs)
    raise(ErrorKind::Validation, "inter-link maximum exceeds available cross pairs");

  Rng rng(seed);
  SimInstance inst;

  std::vector<EdgeSpec> edges;
  for (int comp = 0; comp < 2; ++comp) {
    const auto deg = draw_graphical_sequence(n_comp, config.degree_min, config.degree_max, rng);
    const WeightedGraph part = random_connected_degree_graph(deg, rng);
    const int offset = comp * n_comp;
    for (const Edge& e : part.edges)
      edges.push_back(EdgeSpec{e.u + offset, e.v + offset, 1.0});
  }

  inst.n_inter_links =
      static_cast<int>(rng.uniform_int(config.inter_links_min, config.inter_links_max));
  std::set<std::pair<int, int>> links;
  while (static_cast<int>(links.size()) < inst.n_inter_links) {
    const int u = static_cast<int>(rng.uniform_int(0, n_comp - 1));
    const int v = n_comp + static_cast<int>(rng.uniform_int(0, n_comp - 1));
    links.insert({u, v});
  }
  for (const auto& [u, v] : links) edges.push_back(EdgeSpec{u, v, 1.0});

  inst.graph = build_graph(2 * n_comp, edges);
  inst.planted_labels.assign(static_cast<size_t>(2 * n_comp), 0);
  for (int v = n_comp; v < 2 * n_comp; ++v) inst.planted_labels[static_cast<size_t>(v)] = 1;

  inst.planted_g.d = config.d;
  inst.planted_g.g.resize(static_cast<size_t>(2 * n_comp));
  for (int v = 0; v < 2 * n_comp; ++v)
    inst.planted_g.g[static_cast<size_t>(v)] = random_orthogonal(config.d, rng);

  inst.rho.d = config.d;
  inst.rho.rho.resize(static_cast<size_t>(inst.graph.m()));
  for (int e = 0; e < inst.graph.m(); ++e) {
    const Edge& ed = inst.graph.edges[static_cast<size_t>(e)];
    const bool intra = inst.planted_labels[static_cast<size_t>(ed.u)] ==
                       inst.planted_labels[static_cast<size_t>(ed.v)];
    inst.rho.rho[static_cast<size_t>(e)] =
        intra ? Matrix(inst.planted_g.g[static_cast<size_t>(ed.u)] *
                       inst.planted_g.g[static_cast<size_t>(ed.v)].transpose())
              : random_orthogonal(config.d, rng);
  }

  inst.spectral_gap = normalized_laplacian_gap(inst.graph);
  return inst;
}

namespace {

// Max-weight assignment on a k x k score matrix (Hungarian, O(k^3)).
long long best_assignment(const std::vector<std::vector<long long>>& score, int k) {
  const long long inf = std::numeric_limits<long long>::max() / 4;
  // Minimize negated scores with the standard potentials formulation.
  std::vector<long long> u(static_cast<size_t>(k) + 1), v(static_cast<size_t>(k) + 1);
  std::vector<int> p(static_cast<size_t>(k) + 1), way(static_cast<size_t>(k) + 1);
  for (int i = 1; i <= k; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<long long> minv(static_cast<size_t>(k) + 1, inf);
    std::vector<char> used(static_cast<size_t>(k) + 1, 0);
    do {
      used[static_cast<size_t>(j0)] = 1;
      const int i0 = p[static_cast<size_t>(j0)];
      long long delta = inf;
      int j1 = -1;
      for (int j = 1; j <= k; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const long long cur = -score[static_cast<size_t>(i0 - 1)][static_cast<size_t>(j - 1)] -
                              u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  long long total = 0;
  for (int j = 1; j <= k; ++j)
    if (p[static_cast<size_t>(j)] != 0)
      total += score[static_cast<size_t>(p[static_cast<size_t>(j)] - 1)][static_cast<size_t>(j - 1)];
  return total;
}

}  // namespace

double error_ratio(const std::vector<int>& predicted, const std::vector<int>& truth, int k) {
  if (predicted.size() != truth.size())
    raise(ErrorKind::LengthMismatch, "label vectors differ in length");
  if (predicted.empty()) raise(ErrorKind::LengthMismatch, "label vectors are empty");
  if (k < 1) raise(ErrorKind::Validation, "label count must be positive");
  const size_t n = predicted.size();
  std::vector<std::vector<long long>> confusion(static_cast<size_t>(k),
                                                std::vector<long long>(static_cast<size_t>(k), 0));
  for (size_t i = 0; i < n; ++i) {
    const int p = predicted[i], t = truth[i];
    if (p < 0 || p >= k || t < 0 || t >= k)
      raise(ErrorKind::Validation, "label out of range");
    ++confusion[static_cast<size_t>(p)][static_cast<size_t>(t)];
  }

  long long best = 0;
  if (k <= 6) {
    std::vector<int> perm(static_cast<size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      long long matched = 0;
      for (int p = 0; p < k; ++p)
        matched += confusion[static_cast<size_t>(p)][static_cast<size_t>(perm[static_cast<size_t>(p)])];
      best = std::max(best, matched);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    best = best_assignment(confusion, k);
  }
  return 1.0 - static_cast<double>(best) / static_cast<double>(n);
}

std::vector<BenchRow> run_benchmark(const SimConfig& config, int n_trials,
                                    std::uint64_t master_seed, int jobs) {
  if (n_trials < 1) raise(ErrorKind::Validation, "need at least one trial");
  jobs = std::max(1, jobs);

  std::vector<BenchRow> rows(static_cast<size_t>(n_trials));
  auto run_trial = [&](int t) {
    BenchRow row;
    row.trial = t;
    row.seed = derive_seed(master_seed, static_cast<std::uint64_t>(t));
    try {
      const SimInstance inst = simulate_network(config, row.seed);
      row.gap = inst.spectral_gap;

      SynCutConfig sc;
      sc.k = 2;
      sc.seed = derive_seed(row.seed, 1);
      const SynCutResult cut = syncut(inst.graph, inst.rho, sc);
      row.syncut_err = error_ratio(cut.partition.labels, inst.planted_labels, 2);
      row.iters = cut.iterations;

      std::vector<double> w(static_cast<size_t>(inst.graph.m()));
      for (int e = 0; e < inst.graph.m(); ++e) w[static_cast<size_t>(e)] = inst.graph.weight(e);
      const Partition ncut =
          spectral_clustering(inst.graph, w, 2, derive_seed(row.seed, 2));
      row.ncut_err = error_ratio(ncut.labels, inst.planted_labels, 2);
    } catch (const Error& e) {
      row.error = std::string(e.kind_name()) + ": " + e.what();
      row.gap = row.syncut_err = row.ncut_err = std::nan("");
      row.iters = -1;
    }
    rows[static_cast<size_t>(t)] = std::move(row);
  };

  if (jobs == 1) {
    for (int t = 0; t < n_trials; ++t) run_trial(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int n_threads = std::min(jobs, n_trials);
    pool.reserve(static_cast<size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w)
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < n_trials; t = next.fetch_add(1)) run_trial(t);
      });
    for (auto& th : pool) th.join();
  }
  return rows;
}

}  // namespace syncgeom
