#pragma once

#include <string>
#include <vector>

#include "syncgeom/potentials.hpp"
#include "syncgeom/hodge.hpp"

namespace syncgeom {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest exact decimal form of a double ("%.17g"); parses back bit-exact.
std::string format_double(double x);

/// Graph file: one edge per line, `u<TAB>v<TAB>w`, 0-based ids, '#' comments
/// and blank lines ignored. Vertex count is max id + 1.
WeightedGraph load_graph(const std::string& path);
void save_graph(const WeightedGraph& g, const std::string& path);

/// Edge potential file: header `#d=<d>`, then one canonical edge per line,
/// `u<TAB>v<TAB>m11 m12 ... mdd` row-major. Blocks beyond orth_tol but within
/// the re-projection tolerance are snapped back to the orthogonal group;
/// anything farther is rejected.
EdgePotential load_edge_potential(const std::string& path, const WeightedGraph& g);
void save_edge_potential(const EdgePotential& rho, const WeightedGraph& g,
                         const std::string& path);

/// Vertex potential file: header `#d=<d>`, lines `i<TAB>m11 ... mdd`.
VertexPotential load_vertex_potential(const std::string& path);
void save_vertex_potential(const VertexPotential& f, const std::string& path);
std::string format_vertex_potential(const VertexPotential& f);

/// CSV with a fixed header; numeric cells use format_double.
void save_csv(const std::string& path, const std::string& header,
              const std::vector<std::vector<std::string>>& rows);

/// Sparse matrix as coordinate text: `#shape rows cols` header then
/// `row col value` lines in column-major order.
void save_sparse_coord(const SpMat& m, const std::string& path);

/// FNV-1a 64-bit content hash, hex-encoded. Stable across runs and platforms.
std::string file_digest(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace syncgeom
