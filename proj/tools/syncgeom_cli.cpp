#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "syncgeom/holonomy.hpp"
#include "syncgeom/io.hpp"
#include "syncgeom/netgen.hpp"
#include "syncgeom/syncut.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace syncgeom;

namespace {

int thread_cap() {
  const char* env = std::getenv("SYNC_GEOM_THREADS");
  if (!env) return 0;  // no cap
  const int v = std::atoi(env);
  return v > 0 ? v : 1;
}

json manifest_json(const std::string& subcommand, const json& config,
                   const std::vector<std::pair<std::string, std::string>>& inputs,
                   std::uint64_t seed) {
  json m;
  m["subcommand"] = subcommand;
  m["config"] = config;
  json in = json::object();
  for (const auto& [label, path] : inputs)
    in[label] = json{{"path", path}, {"digest", file_digest(path)}};
  m["inputs"] = in;
  m["seed"] = seed;
  m["version"] = kToolVersion;
  return m;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

SimConfig parse_sim_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    raise(ErrorKind::Parse, path + ": " + e.what());
  }
  SimConfig c;
  try {
    c.n_per_component = j.at("n_per_component").get<int>();
    c.d = j.at("d").get<int>();
    c.degree_min = j.at("degree_min").get<int>();
    c.degree_max = j.at("degree_max").get<int>();
    c.inter_links_min = j.at("inter_links_min").get<int>();
    c.inter_links_max = j.at("inter_links_max").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    raise(ErrorKind::Parse, path + ": " + e.what());
  }
  return c;
}

json sim_config_json(const SimConfig& c) {
  return json{{"n_per_component", c.n_per_component},
              {"d", c.d},
              {"degree_min", c.degree_min},
              {"degree_max", c.degree_max},
              {"inter_links_min", c.inter_links_min},
              {"inter_links_max", c.inter_links_max},
              {"seed", c.seed}};
}

struct SyncArgs {
  std::string graph, potential, out;
  double tol = kSyncTol;
};

int run_sync(const SyncArgs& a) {
  const WeightedGraph g = load_graph(a.graph);
  const EdgePotential rho = load_edge_potential(a.potential, g);
  const SyncResult res = spectral_sync(g, rho);
  const SyncDecision dec = is_synchronizable(g, rho, a.tol);

  json out;
  out["eta"] = res.eta;
  out["nu"] = res.nu;
  json eigs = json::array();
  for (Eigen::Index i = 0; i < res.eigenvalues.size(); ++i) eigs.push_back(res.eigenvalues(i));
  out["eigenvalues"] = eigs;
  out["synchronizable"] = dec.synchronizable;
  out["max_deviation"] = dec.max_deviation;
  out["tol"] = a.tol;
  out["degenerate_blocks"] = res.degenerate_blocks;
  out["vertex_potential"] = format_vertex_potential(res.f);
  emit(out.dump(2) + "\n", a.out);
  return 0;
}

struct HolonomyArgs {
  std::string graph, potential, out;
  int base = 0;
  double sync_tol = kSyncTol;
};

int run_holonomy(const HolonomyArgs& a) {
  const WeightedGraph g = load_graph(a.graph);
  const EdgePotential rho = load_edge_potential(a.potential, g);
  const HolonomyReport rep = holonomy_generators(g, rho, a.base, a.sync_tol);

  json out;
  out["base"] = rep.base;
  out["n_generators"] = rep.generators.size();
  out["max_deviation"] = rep.max_deviation;
  out["synchronizable"] = rep.synchronizable;
  json gens = json::array();
  for (size_t i = 0; i < rep.generators.size(); ++i) {
    const Edge& ed = g.edges[static_cast<size_t>(rep.non_tree_edges[i])];
    gens.push_back(json{{"edge", json::array({ed.u, ed.v})},
                        {"matrix", matrix_json(rep.generators[i])}});
  }
  out["generators"] = gens;
  emit(out.dump(2) + "\n", a.out);
  return 0;
}

struct SpectrumArgs {
  std::string graph, potential, out, export_dir;
  int k = 0;  // 0: default d+1
};

int run_spectrum(const SpectrumArgs& a) {
  const WeightedGraph g = load_graph(a.graph);
  const EdgePotential rho = load_edge_potential(a.potential, g);
  const TwistedOperators ops = build_operators(g, rho);
  const int nd = static_cast<int>(ops.D1_diag.size());
  const int k = a.k > 0 ? std::min(a.k, nd) : std::min(rho.d + 1, nd);
  const Vector vals = smallest_eigenpairs(normalized_laplacian(ops), k).values;

  std::string csv = "index,eigenvalue\n";
  for (int i = 0; i < k; ++i)
    csv += std::to_string(i) + "," + format_double(vals(i)) + "\n";
  emit(csv, a.out);

  if (!a.export_dir.empty()) {
    fs::create_directories(a.export_dir);
    const fs::path dir(a.export_dir);
    save_sparse_coord(ops.L1, (dir / "L1.txt").string());
    SpMat d1(ops.D1_diag.size(), ops.D1_diag.size());
    for (Eigen::Index i = 0; i < ops.D1_diag.size(); ++i) d1.insert(i, i) = ops.D1_diag(i);
    save_sparse_coord(d1, (dir / "D1.txt").string());
    save_sparse_coord(ops.d_rho, (dir / "d_rho.txt").string());
    save_sparse_coord(ops.delta_rho, (dir / "delta_rho.txt").string());
  }
  return 0;
}

struct SynCutArgs {
  std::string graph, potential, out;
  int k = 2;
  int max_iters = 10;
  double xi_tol = 1e-8;
  std::uint64_t seed = 0;
};

int run_syncut(const SynCutArgs& a) {
  const WeightedGraph g = load_graph(a.graph);
  const EdgePotential rho = load_edge_potential(a.potential, g);
  SynCutConfig config;
  config.k = a.k;
  config.max_iters = a.max_iters;
  config.xi_tol = a.xi_tol;
  config.seed = a.seed;
  const SynCutResult res = syncut(g, rho, config);

  fs::create_directories(a.out);
  const fs::path dir(a.out);

  std::vector<std::vector<std::string>> part_rows;
  for (int v = 0; v < g.n; ++v)
    part_rows.push_back({std::to_string(v),
                         std::to_string(res.partition.labels[static_cast<size_t>(v)])});
  save_csv((dir / "partition.csv").string(), "vertex,label", part_rows);

  save_vertex_potential(res.f_star, (dir / "fstar.pot").string());

  std::vector<std::vector<std::string>> xi_rows;
  for (size_t i = 0; i < res.xi_trace.size(); ++i)
    xi_rows.push_back({std::to_string(i), format_double(res.xi_trace[i])});
  save_csv((dir / "xi_trace.csv").string(), "iter,xi", xi_rows);

  std::vector<std::vector<std::string>> fr_rows;
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    fr_rows.push_back({std::to_string(ed.u), std::to_string(ed.v),
                       format_double(res.final_edge_frustrations[static_cast<size_t>(e)])});
  }
  save_csv((dir / "edge_frustration.csv").string(), "u,v,frustration", fr_rows);

  const json config_json{{"k", a.k},
                         {"max_iters", a.max_iters},
                         {"xi_tol", a.xi_tol},
                         {"seed", a.seed}};
  write_text_file((dir / "manifest.json").string(),
                  manifest_json("syncut", config_json,
                                {{"graph", a.graph}, {"potential", a.potential}}, a.seed)
                          .dump(2) +
                      "\n");
  return 0;
}

struct SimulateArgs {
  std::string config, out;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

int run_simulate(const SimulateArgs& a) {
  SimConfig config = parse_sim_config(a.config);
  const std::uint64_t seed = a.seed_given ? a.seed : config.seed;
  const SimInstance inst = simulate_network(config, seed);

  fs::create_directories(a.out);
  const fs::path dir(a.out);
  save_graph(inst.graph, (dir / "graph.tsv").string());
  save_edge_potential(inst.rho, inst.graph, (dir / "potential.pot").string());
  save_vertex_potential(inst.planted_g, (dir / "planted_g.pot").string());

  std::vector<std::vector<std::string>> label_rows;
  for (int v = 0; v < inst.graph.n; ++v)
    label_rows.push_back({std::to_string(v),
                          std::to_string(inst.planted_labels[static_cast<size_t>(v)])});
  save_csv((dir / "labels.csv").string(), "vertex,label", label_rows);

  json info;
  info["n"] = inst.graph.n;
  info["m"] = inst.graph.m();
  info["d"] = inst.rho.d;
  info["n_inter_links"] = inst.n_inter_links;
  info["spectral_gap"] = inst.spectral_gap;
  info["seed"] = seed;
  write_text_file((dir / "instance.json").string(), info.dump(2) + "\n");

  write_text_file((dir / "manifest.json").string(),
                  manifest_json("simulate", sim_config_json(config), {{"config", a.config}}, seed)
                          .dump(2) +
                      "\n");
  return 0;
}

struct BenchArgs {
  std::string config, out;
  int trials = 1;
  std::uint64_t seed = 0;
  int jobs = 1;
};

int run_bench(const BenchArgs& a) {
  const SimConfig config = parse_sim_config(a.config);
  int jobs = a.jobs;
  if (const int cap = thread_cap(); cap > 0) jobs = std::min(jobs, cap);
  const auto rows = run_benchmark(config, a.trials, a.seed, jobs);

  std::vector<std::vector<std::string>> csv_rows;
  for (const BenchRow& r : rows) {
    if (!r.error.empty())
      std::cerr << "warning: trial " << r.trial << " failed: " << r.error << "\n";
    csv_rows.push_back({std::to_string(r.trial), std::to_string(r.seed), format_double(r.gap),
                        format_double(r.syncut_err), format_double(r.ncut_err),
                        std::to_string(r.iters)});
  }
  save_csv(a.out, "trial,seed,gap,syncut_err,ncut_err,iters", csv_rows);

  fs::path manifest_path(a.out);
  manifest_path.replace_extension(".manifest.json");
  json config_json = sim_config_json(config);
  config_json["trials"] = a.trials;
  config_json["jobs"] = jobs;
  write_text_file(manifest_path.string(),
                  manifest_json("bench", config_json, {{"config", a.config}}, a.seed).dump(2) +
                      "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const int cap = thread_cap(); cap > 0) Eigen::setNbThreads(cap);

  CLI::App app{"synchronization problems over orthogonal groups on weighted graphs"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  SyncArgs sync_args;
  auto* sync_cmd = app.add_subcommand("sync", "spectral-relaxation synchronization");
  sync_cmd->add_option("--graph", sync_args.graph, "graph file (u<TAB>v<TAB>w)")->required();
  sync_cmd->add_option("--potential", sync_args.potential, "edge potential file")->required();
  sync_cmd->add_option("--tol", sync_args.tol, "synchronizability tolerance");
  sync_cmd->add_option("--out", sync_args.out, "result JSON path (default stdout)");

  HolonomyArgs hol_args;
  auto* hol_cmd = app.add_subcommand("holonomy", "holonomy generators and synchronizability");
  hol_cmd->add_option("--graph", hol_args.graph, "graph file")->required();
  hol_cmd->add_option("--potential", hol_args.potential, "edge potential file")->required();
  hol_cmd->add_option("--base", hol_args.base, "base vertex for the spanning tree");
  hol_cmd->add_option("--sync-tol", hol_args.sync_tol, "generator deviation tolerance");
  hol_cmd->add_option("--out", hol_args.out, "report JSON path (default stdout)");

  SpectrumArgs spec_args;
  auto* spec_cmd = app.add_subcommand("spectrum", "smallest eigenvalues of the connection Laplacian");
  spec_cmd->add_option("--graph", spec_args.graph, "graph file")->required();
  spec_cmd->add_option("--potential", spec_args.potential, "edge potential file")->required();
  spec_cmd->add_option("--k", spec_args.k, "eigenvalue count (default d+1)");
  spec_cmd->add_option("--out", spec_args.out, "CSV path (default stdout)");
  spec_cmd->add_option("--export-operators", spec_args.export_dir,
                       "directory for coordinate-format operator dumps");

  SynCutArgs syncut_args;
  auto* syncut_cmd = app.add_subcommand("syncut", "partition by synchronizability");
  syncut_cmd->add_option("--graph", syncut_args.graph, "graph file")->required();
  syncut_cmd->add_option("--potential", syncut_args.potential, "edge potential file")->required();
  syncut_cmd->add_option("--k", syncut_args.k, "partition count")->required();
  syncut_cmd->add_option("--max-iters", syncut_args.max_iters, "iteration cap");
  syncut_cmd->add_option("--xi-tol", syncut_args.xi_tol, "objective convergence tolerance");
  syncut_cmd->add_option("--seed", syncut_args.seed, "random seed");
  syncut_cmd->add_option("--out", syncut_args.out, "output directory")->required();

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "draw a random synchronization network");
  sim_cmd->add_option("--config", sim_args.config, "simulation config JSON")->required();
  auto* seed_opt = sim_cmd->add_option("--seed", sim_args.seed, "random seed (overrides config)");
  sim_cmd->add_option("--out", sim_args.out, "output directory")->required();

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "SynCut vs NCut benchmark");
  bench_cmd->add_option("--config", bench_args.config, "simulation config JSON")->required();
  bench_cmd->add_option("--trials", bench_args.trials, "trial count")->required();
  bench_cmd->add_option("--seed", bench_args.seed, "master seed");
  bench_cmd->add_option("--out", bench_args.out, "results CSV path")->required();
  bench_cmd->add_option("--jobs", bench_args.jobs, "parallel trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sync_cmd) return run_sync(sync_args);
    if (*hol_cmd) return run_holonomy(hol_args);
    if (*spec_cmd) return run_spectrum(spec_args);
    if (*syncut_cmd) return run_syncut(syncut_args);
    if (*sim_cmd) {
      sim_args.seed_given = seed_opt->count() > 0;
      return run_simulate(sim_args);
    }
    if (*bench_cmd) return run_bench(bench_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind_name() << ": " << e.what() << "\n";
    return e.is_numerical() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
