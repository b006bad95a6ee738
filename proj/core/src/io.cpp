#include "syncgeom/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

namespace syncgeom {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::Io, "cannot write " + path);
  out << content;
  if (!out) raise(ErrorKind::Io, "write failed for " + path);
}

namespace {

struct Line {
  int number = 0;
  std::string text;
};

std::vector<Line> content_lines(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<Line> lines;
  int number = 0;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    if (line[start] == '#') {
      lines.push_back(Line{number, line});  // keep directives like #d=
      continue;
    }
    lines.push_back(Line{number, line});
  }
  return lines;
}

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
  raise(ErrorKind::Parse, path + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& tok, const std::string& path, int line) {
  try {
    size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) parse_fail(path, line, "bad number '" + tok + "'");
    return v;
  } catch (const std::exception&) {
    parse_fail(path, line, "bad number '" + tok + "'");
  }
}

long parse_int(const std::string& tok, const std::string& path, int line) {
  try {
    size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) parse_fail(path, line, "bad integer '" + tok + "'");
    return v;
  } catch (const std::exception&) {
    parse_fail(path, line, "bad integer '" + tok + "'");
  }
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

WeightedGraph load_graph(const std::string& path) {
  std::vector<EdgeSpec> edges;
  for (const Line& l : content_lines(path)) {
    if (l.text[l.text.find_first_not_of(" \t")] == '#') continue;
    const auto toks = split_ws(l.text);
    if (toks.size() != 3) parse_fail(path, l.number, "expected 'u v w'");
    EdgeSpec e;
    e.u = static_cast<int>(parse_int(toks[0], path, l.number));
    e.v = static_cast<int>(parse_int(toks[1], path, l.number));
    e.w = parse_double(toks[2], path, l.number);
    if (e.u < 0 || e.v < 0) parse_fail(path, l.number, "negative vertex id");
    edges.push_back(e);
  }
  return build_graph(edges);
}

void save_graph(const WeightedGraph& g, const std::string& path) {
  std::ostringstream ss;
  for (const Edge& e : g.edges)
    ss << e.u << '\t' << e.v << '\t' << format_double(e.w) << '\n';
  write_text_file(path, ss.str());
}

namespace {

int parse_dim_header(const std::vector<Line>& lines, const std::string& path) {
  for (const Line& l : lines) {
    const size_t start = l.text.find_first_not_of(" \t");
    if (l.text[start] != '#') continue;
    const std::string body = l.text.substr(start + 1);
    if (body.rfind("d=", 0) == 0)
      return static_cast<int>(parse_int(body.substr(2), path, l.number));
  }
  raise(ErrorKind::Parse, path + ": missing '#d=<d>' header");
}

Matrix parse_block(const std::vector<std::string>& toks, size_t offset, int d,
                   const std::string& path, int line) {
  if (toks.size() != offset + static_cast<size_t>(d) * d)
    parse_fail(path, line,
               "expected " + std::to_string(d * d) + " matrix entries, got " +
                   std::to_string(toks.size() - offset));
  Matrix m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      m(r, c) = parse_double(toks[offset + static_cast<size_t>(r) * d + c], path, line);
  return m;
}

// Accept orthogonal blocks as stored; snap near-orthogonal ones back to the
// group; reject the rest. Keeping exact blocks untouched is what makes
// save/load round trips bit-exact.
Matrix admit_block(Matrix m, const std::string& path, int line) {
  const int d = static_cast<int>(m.rows());
  const double dev = (m.transpose() * m - Matrix::Identity(d, d)).norm();
  if (dev <= kOrthTol) return m;
  if (dev <= kReprojectTol) return project_to_orthogonal(m);
  raise(ErrorKind::Validation, path + ":" + std::to_string(line) + ": block is " +
                                   format_double(dev) + " from orthogonal (limit " +
                                   format_double(kReprojectTol) + ")");
}

}  // namespace

EdgePotential load_edge_potential(const std::string& path, const WeightedGraph& g) {
  const auto lines = content_lines(path);
  const int d = parse_dim_header(lines, path);
  if (d < 1) raise(ErrorKind::Parse, path + ": fibre dimension must be positive");

  EdgePotential rho;
  rho.d = d;
  rho.rho.assign(static_cast<size_t>(g.m()), Matrix());
  std::vector<char> seen(static_cast<size_t>(g.m()), 0);
  for (const Line& l : lines) {
    if (l.text[l.text.find_first_not_of(" \t")] == '#') continue;
    const auto toks = split_ws(l.text);
    if (toks.size() < 2) parse_fail(path, l.number, "expected 'u v m11 ... mdd'");
    const int u = static_cast<int>(parse_int(toks[0], path, l.number));
    const int v = static_cast<int>(parse_int(toks[1], path, l.number));
    const auto e = g.find_edge(u, v);
    if (!e)
      parse_fail(path, l.number,
                 "edge (" + std::to_string(u) + "," + std::to_string(v) + ") not in graph");
    if (seen[static_cast<size_t>(*e)]) parse_fail(path, l.number, "duplicate edge line");
    seen[static_cast<size_t>(*e)] = 1;
    Matrix m = parse_block(toks, 2, d, path, l.number);
    // Lines may give the block in either orientation; store the canonical one.
    if (u > v) m = m.transpose().eval();
    rho.rho[static_cast<size_t>(*e)] = admit_block(std::move(m), path, l.number);
  }
  for (int e = 0; e < g.m(); ++e)
    if (!seen[static_cast<size_t>(e)])
      raise(ErrorKind::Parse, path + ": no block for edge (" +
                                  std::to_string(g.edges[static_cast<size_t>(e)].u) + "," +
                                  std::to_string(g.edges[static_cast<size_t>(e)].v) + ")");
  return rho;
}

void save_edge_potential(const EdgePotential& rho, const WeightedGraph& g,
                         const std::string& path) {
  if (static_cast<int>(rho.rho.size()) != g.m())
    raise(ErrorKind::DimensionMismatch, "edge potential block count does not match edge count");
  std::ostringstream ss;
  ss << "#d=" << rho.d << '\n';
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    ss << ed.u << '\t' << ed.v;
    const Matrix& m = rho.forward(e);
    for (int r = 0; r < rho.d; ++r)
      for (int c = 0; c < rho.d; ++c) ss << (r == 0 && c == 0 ? '\t' : ' ') << format_double(m(r, c));
    ss << '\n';
  }
  write_text_file(path, ss.str());
}

std::string format_vertex_potential(const VertexPotential& f) {
  std::ostringstream ss;
  ss << "#d=" << f.d << '\n';
  for (int i = 0; i < f.n(); ++i) {
    ss << i;
    const Matrix& m = f.g[static_cast<size_t>(i)];
    for (int r = 0; r < f.d; ++r)
      for (int c = 0; c < f.d; ++c) ss << (r == 0 && c == 0 ? '\t' : ' ') << format_double(m(r, c));
    ss << '\n';
  }
  return ss.str();
}

void save_vertex_potential(const VertexPotential& f, const std::string& path) {
  write_text_file(path, format_vertex_potential(f));
}

VertexPotential load_vertex_potential(const std::string& path) {
  const auto lines = content_lines(path);
  const int d = parse_dim_header(lines, path);
  if (d < 1) raise(ErrorKind::Parse, path + ": fibre dimension must be positive");
  std::vector<std::pair<int, Matrix>> entries;
  int max_vertex = -1;
  for (const Line& l : lines) {
    if (l.text[l.text.find_first_not_of(" \t")] == '#') continue;
    const auto toks = split_ws(l.text);
    if (toks.size() < 1) parse_fail(path, l.number, "expected 'i m11 ... mdd'");
    const int i = static_cast<int>(parse_int(toks[0], path, l.number));
    if (i < 0) parse_fail(path, l.number, "negative vertex id");
    Matrix m = parse_block(toks, 1, d, path, l.number);
    entries.emplace_back(i, admit_block(std::move(m), path, l.number));
    max_vertex = std::max(max_vertex, i);
  }
  VertexPotential f;
  f.d = d;
  f.g.assign(static_cast<size_t>(max_vertex) + 1, Matrix());
  for (auto& [i, m] : entries) {
    if (f.g[static_cast<size_t>(i)].size() != 0)
      raise(ErrorKind::Parse, path + ": duplicate vertex " + std::to_string(i));
    f.g[static_cast<size_t>(i)] = std::move(m);
  }
  for (int i = 0; i <= max_vertex; ++i)
    if (f.g[static_cast<size_t>(i)].size() == 0)
      raise(ErrorKind::Parse, path + ": no block for vertex " + std::to_string(i));
  return f;
}

void save_csv(const std::string& path, const std::string& header,
              const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream ss;
  ss << header << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) ss << (i ? "," : "") << row[i];
    ss << '\n';
  }
  write_text_file(path, ss.str());
}

void save_sparse_coord(const SpMat& m, const std::string& path) {
  std::ostringstream ss;
  ss << "#shape " << m.rows() << ' ' << m.cols() << '\n';
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      ss << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
  write_text_file(path, ss.str());
}

std::string file_digest(const std::string& path) {
  const std::string data = read_text_file(path);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace syncgeom
