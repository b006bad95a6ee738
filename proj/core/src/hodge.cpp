#include "syncgeom/hodge.hpp"

#include <Eigen/Dense>
#include <Eigen/QR>
#include <algorithm>
#include <vector>

#include "syncgeom/solver.hpp"

namespace syncgeom {

namespace {

void check_dims(const WeightedGraph& g, const EdgePotential& rho) {
  if (rho.d <= 0) raise(ErrorKind::DimensionMismatch, "edge potential has no fibre dimension");
  if (static_cast<int>(rho.rho.size()) != g.m())
    raise(ErrorKind::DimensionMismatch, "edge potential block count does not match edge count");
}

void check_cochain(const WeightedGraph& g, const Cochain0& f, int d) {
  if (f.d != d) raise(ErrorKind::DimensionMismatch, "fibre dimensions differ");
  if (f.n() != g.n)
    raise(ErrorKind::DimensionMismatch, "cochain length does not match vertex count");
}

void check_one_form(const WeightedGraph& g, const TwistedOneForm& w, int d) {
  if (w.d != d) raise(ErrorKind::DimensionMismatch, "fibre dimensions differ");
  if (w.m() != g.m())
    raise(ErrorKind::DimensionMismatch, "one-form length does not match edge count");
}

void require_connected(const WeightedGraph& g) {
  if (!is_connected(g)) raise(ErrorKind::DisconnectedGraph, "operation requires a connected graph");
}

}  // namespace

TwistedOperators build_operators(const WeightedGraph& g, const EdgePotential& rho) {
  check_dims(g, rho);
  require_connected(g);
  for (double di : g.degree)
    if (!(di > 0.0))
      raise(ErrorKind::Validation, "operator assembly needs positive weighted degrees");
  const int d = rho.d;
  const Eigen::Index nd = static_cast<Eigen::Index>(g.n) * d;
  const Eigen::Index md = static_cast<Eigen::Index>(g.m()) * d;

  TwistedOperators ops;
  ops.d = d;
  ops.D1_diag.resize(nd);
  for (int i = 0; i < g.n; ++i)
    ops.D1_diag.segment(static_cast<Eigen::Index>(i) * d, d)
        .setConstant(g.degree[static_cast<size_t>(i)]);

  std::vector<Eigen::Triplet<double>> l1t, dt, deltat;
  l1t.reserve(static_cast<size_t>(nd) + 2 * static_cast<size_t>(md) * d);
  dt.reserve(2 * static_cast<size_t>(md) * d);
  deltat.reserve(2 * static_cast<size_t>(md) * d);

  for (Eigen::Index r = 0; r < nd; ++r) l1t.emplace_back(r, r, ops.D1_diag(r));

  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    const Matrix& r = rho.forward(e);
    const Eigen::Index bu = static_cast<Eigen::Index>(ed.u) * d;
    const Eigen::Index bv = static_cast<Eigen::Index>(ed.v) * d;
    const Eigen::Index be = static_cast<Eigen::Index>(e) * d;
    const double inv_du = 1.0 / g.degree[static_cast<size_t>(ed.u)];
    const double inv_dv = 1.0 / g.degree[static_cast<size_t>(ed.v)];
    for (int a = 0; a < d; ++a) {
      // d_rho: +I at the tail block, -rho_uv at the head block.
      dt.emplace_back(be + a, bu + a, 1.0);
      // delta_rho: (w/d_u) I at the tail, -(w/d_v) rho_vu at the head.
      deltat.emplace_back(bu + a, be + a, ed.w * inv_du);
      for (int b = 0; b < d; ++b) {
        l1t.emplace_back(bu + a, bv + b, -ed.w * r(a, b));
        l1t.emplace_back(bv + b, bu + a, -ed.w * r(a, b));
        dt.emplace_back(be + a, bv + b, -r(a, b));
        deltat.emplace_back(bv + b, be + a, -ed.w * inv_dv * r(a, b));
      }
    }
  }

  ops.L1.resize(nd, nd);
  ops.L1.setFromTriplets(l1t.begin(), l1t.end());
  ops.d_rho.resize(md, nd);
  ops.d_rho.setFromTriplets(dt.begin(), dt.end());
  ops.delta_rho.resize(nd, md);
  ops.delta_rho.setFromTriplets(deltat.begin(), deltat.end());
  return ops;
}

SpMat normalized_laplacian(const TwistedOperators& ops) {
  const Vector inv_sqrt = ops.D1_diag.cwiseSqrt().cwiseInverse();
  SpMat s = ops.L1;
  for (int k = 0; k < s.outerSize(); ++k)
    for (SpMat::InnerIterator it(s, k); it; ++it)
      it.valueRef() *= inv_sqrt(it.row()) * inv_sqrt(it.col());
  return s;
}

TwistedOneForm apply_d(const Cochain0& f, const EdgePotential& rho, const WeightedGraph& g) {
  check_dims(g, rho);
  check_cochain(g, f, rho.d);
  TwistedOneForm w = TwistedOneForm::zero(g.m(), rho.d, f.cols());
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    w.block(e) = f.block(ed.u) - rho.forward(e) * f.block(ed.v);
  }
  return w;
}

Cochain0 apply_delta(const TwistedOneForm& w, const EdgePotential& rho, const WeightedGraph& g) {
  check_dims(g, rho);
  check_one_form(g, w, rho.d);
  Cochain0 out = Cochain0::zero(g.n, rho.d, w.cols());
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    // Tail sees the stored coefficient; the head sees -rho_vu * stored once
    // skew-symmetry and compatibility are applied.
    out.block(ed.u) += ed.w * w.block(e);
    out.block(ed.v) -= ed.w * (rho.forward(e).transpose() * w.block(e));
  }
  for (int i = 0; i < g.n; ++i) {
    const double di = g.degree[static_cast<size_t>(i)];
    if (di > 0.0) out.block(i) /= di;
  }
  return out;
}

double inner0(const Cochain0& f, const Cochain0& h, const WeightedGraph& g) {
  if (f.d != h.d || f.n() != h.n() || f.cols() != h.cols())
    raise(ErrorKind::DimensionMismatch, "cochain shapes differ");
  check_cochain(g, f, f.d);
  CompensatedSum sum;
  for (int i = 0; i < g.n; ++i)
    sum.add(g.degree[static_cast<size_t>(i)] * f.block(i).cwiseProduct(h.block(i)).sum());
  return sum.value();
}

OneFormInner inner1_forms(const TwistedOneForm& w, const TwistedOneForm& h,
                          const WeightedGraph& g, const EdgePotential& rho) {
  check_dims(g, rho);
  check_one_form(g, w, rho.d);
  check_one_form(g, h, rho.d);
  if (w.cols() != h.cols()) raise(ErrorKind::DimensionMismatch, "one-form column counts differ");

  CompensatedSum single, both;
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    const double tail_term = w.block(e).cwiseProduct(h.block(e)).sum();
    single.add(ed.w * tail_term);
    // Head-frame coefficients: -rho_vu applied to the stored vectors. The
    // sign cancels in the product; orthogonality makes the term equal the
    // tail one up to rounding, which is exactly what the equivalence test
    // measures.
    const Matrix wu = rho.forward(e).transpose() * w.block(e);
    const Matrix hu = rho.forward(e).transpose() * h.block(e);
    both.add(0.5 * ed.w * (tail_term + wu.cwiseProduct(hu).sum()));
  }
  return OneFormInner{single.value(), both.value()};
}

double inner1(const TwistedOneForm& w, const TwistedOneForm& h, const WeightedGraph& g,
              const EdgePotential& rho) {
  return inner1_forms(w, h, g, rho).single_orientation;
}

Cochain0 laplacian0(const Cochain0& f, const EdgePotential& rho, const WeightedGraph& g) {
  return apply_delta(apply_d(f, rho, g), rho, g);
}

TwistedOneForm laplacian1(const TwistedOneForm& w, const EdgePotential& rho,
                          const WeightedGraph& g) {
  return apply_d(apply_delta(w, rho, g), rho, g);
}

KernelReport kernel_dim(const WeightedGraph& g, const EdgePotential& rho, double rel_tol) {
  check_dims(g, rho);
  require_connected(g);
  const TwistedOperators ops = build_operators(g, rho);
  const int d = rho.d;
  const Eigen::Index nd = static_cast<Eigen::Index>(g.n) * d;

  // Scale d_rho to sqrt(w_e) rows and D^{-1/2} columns so its singular values
  // are the square roots of the eigenvalues of D1^{-1} L1. The QR rank cut at
  // sqrt(rel_tol) then matches the eigenvalue cut at rel_tol.
  Matrix a = Matrix(ops.d_rho);
  for (int e = 0; e < g.m(); ++e)
    a.middleRows(static_cast<Eigen::Index>(e) * d, d) *= std::sqrt(g.weight(e));
  const Vector inv_sqrt = ops.D1_diag.cwiseSqrt().cwiseInverse();
  a *= inv_sqrt.asDiagonal();

  Eigen::ColPivHouseholderQR<Matrix> qr;
  qr.setThreshold(std::sqrt(rel_tol));
  qr.compute(a);
  const int rank = static_cast<int>(qr.rank());

  KernelReport rep;
  rep.dim = static_cast<int>(nd) - rank;
  rep.eigenvalues = smallest_eigenpairs(normalized_laplacian(ops),
                                        std::min<int>(d + 1, static_cast<int>(nd)))
                        .values;
  return rep;
}

HodgeParts hodge_decompose(const Cochain0& f, const EdgePotential& rho, const WeightedGraph& g,
                           double rel_tol) {
  check_dims(g, rho);
  check_cochain(g, f, rho.d);
  require_connected(g);
  const TwistedOperators ops = build_operators(g, rho);
  const SpMat s = normalized_laplacian(ops);

  // Full spectrum of the symmetric normalization; back-mapped eigenvectors
  // x_k = D^{-1/2} y_k are inner0-orthonormal.
  const Matrix dense_s(s);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(dense_s);
  if (eig.info() != Eigen::Success)
    raise(ErrorKind::ConvergenceFailure, "dense eigensolver failed");
  const Vector& vals = eig.eigenvalues();
  const double lambda_max = std::max(vals(vals.size() - 1), 0.0);
  const double cut = rel_tol * std::max(lambda_max, 1e-300);

  const Vector inv_sqrt = ops.D1_diag.cwiseSqrt().cwiseInverse();

  HodgeParts parts;
  parts.harmonic = Cochain0::zero(g.n, rho.d, f.cols());
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    if (vals(k) >= cut) break;  // ascending order
    const Vector x = inv_sqrt.cwiseProduct(eig.eigenvectors().col(k));
    // inner0(x, column) = x^T D1 column, one coefficient per column of f
    const Eigen::RowVectorXd coef = ops.D1_diag.cwiseProduct(x).transpose() * f.values;
    parts.harmonic.values += x * coef;
  }
  parts.coexact = f;
  parts.coexact.values -= parts.harmonic.values;
  return parts;
}

double cheeger_lower_bound(const EdgePotential& rho, const WeightedGraph& g) {
  check_dims(g, rho);
  require_connected(g);
  const TwistedOperators ops = build_operators(g, rho);
  const Eigen::Index nd = ops.D1_diag.size();
  const int k = std::min<int>(rho.d, static_cast<int>(nd));
  const Vector vals = smallest_eigenpairs(normalized_laplacian(ops), k).values;
  return vals.head(k).sum() / rho.d;
}

}  // namespace syncgeom
