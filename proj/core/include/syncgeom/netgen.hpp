#pragma once

#include <string>

#include "syncgeom/rng.hpp"
#include "syncgeom/syncut.hpp"

namespace syncgeom {

struct SimConfig {
  int n_per_component = 100;
  int d = 5;
  int degree_min = 4;
  int degree_max = 8;
  int inter_links_min = 100;
  int inter_links_max = 250;
  std::uint64_t seed = 0;
};

/// Planted two-component instance: each component connected and exactly
/// synchronizable under the planted potential; inter-component blocks drawn
/// Haar at random. Unit edge weights throughout.
struct SimInstance {
  WeightedGraph graph;
  EdgePotential rho;
  VertexPotential planted_g;
  std::vector<int> planted_labels;  // 0 for the first component, 1 for the second
  int n_inter_links = 0;
  double spectral_gap = 0.0;  // lambda_2 of the normalized graph Laplacian
};

/// Simple connected graph realizing the degree sequence, via sequential
/// stub sampling. Realization retries (fresh random draws) run until the
/// result is connected, up to 100 attempts.
WeightedGraph random_connected_degree_graph(const std::vector<int>& degrees, Rng& rng);

/// Erdos-Gallai graphicality test.
bool degree_sequence_graphical(const std::vector<int>& degrees);

/// Haar-distributed d x d orthogonal matrix: QR of a standard Gaussian matrix
/// with the R diagonal signs folded into Q.
Matrix random_orthogonal(int d, Rng& rng);

SimInstance simulate_network(const SimConfig& config, std::uint64_t seed);

/// Misclassified-vertex fraction minimized over permutations of the K
/// predicted labels. Exhaustive for K <= 6, assignment matching above.
double error_ratio(const std::vector<int>& predicted, const std::vector<int>& truth, int k);

struct BenchRow {
  int trial = 0;
  std::uint64_t seed = 0;
  double gap = 0.0;
  double syncut_err = 0.0;
  double ncut_err = 0.0;
  int iters = 0;
  std::string error;  // empty on success
};

/// Seeded SynCut-vs-NCut comparison. Per-trial seeds derive from the master
/// seed, so any row can be reproduced on its own. jobs > 1 runs trials in
/// parallel; rows come back in trial order either way. Per-trial failures are
/// recorded in the row, never thrown.
std::vector<BenchRow> run_benchmark(const SimConfig& config, int n_trials,
                                    std::uint64_t master_seed, int jobs = 1);

}  // namespace syncgeom
