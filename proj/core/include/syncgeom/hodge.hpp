#pragma once

#include <Eigen/Sparse>

#include "syncgeom/potentials.hpp"

namespace syncgeom {

using SpMat = Eigen::SparseMatrix<double>;

/// Relative threshold (times the largest eigenvalue) under which an
/// eigenvalue counts as zero.
inline constexpr double kZeroEigRelTol = 1e-8;

/// Twisted 1-form stored on canonical edges only: the coefficient on edge
/// e = (i -> j) is the tail-frame vector p_i(w_ij^(i)). The reverse and
/// head-frame values are derived:
///   w_ji^(i) = -w_ij^(i)            (skew-symmetry)
///   w_ij^(j) =  rho_ji w_ij^(i)     (compatibility across the edge)
/// so both laws hold by construction.
struct TwistedOneForm {
  int d = 0;
  Matrix coeffs;  // (m*d) x k

  int m() const { return d == 0 ? 0 : static_cast<int>(coeffs.rows()) / d; }
  int cols() const { return static_cast<int>(coeffs.cols()); }

  auto block(int e) { return coeffs.middleRows(static_cast<Eigen::Index>(e) * d, d); }
  auto block(int e) const { return coeffs.middleRows(static_cast<Eigen::Index>(e) * d, d); }

  static TwistedOneForm zero(int m, int d, int k = 1) {
    TwistedOneForm w;
    w.d = d;
    w.coeffs = Matrix::Zero(static_cast<Eigen::Index>(m) * d, k);
    return w;
  }
};

/// Assembled matrices of the twisted complex.
///   L1        = D1 - W1, the graph connection Laplacian (nd x nd, symmetric)
///   D1_diag   = diagonal of D1 (d_i on vertex i's block)
///   d_rho     = differential in stored coordinates (md x nd):
///               row block of edge (i -> j) has +I at i and -rho_ij at j
///   delta_rho = codifferential (nd x md): column block of edge (i -> j) has
///               (w/d_i) I at i and -(w/d_j) rho_ji at j
/// With these conventions delta_rho * d_rho = D1^{-1} L1 and
/// L1 = d_rho^T diag(w_e I) d_rho.
struct TwistedOperators {
  int d = 0;
  Vector D1_diag;
  SpMat L1;
  SpMat d_rho;
  SpMat delta_rho;
};

TwistedOperators build_operators(const WeightedGraph& g, const EdgePotential& rho);

/// (d_rho f) on edge (i -> j), tail frame: f_i - rho_ij f_j.
TwistedOneForm apply_d(const Cochain0& f, const EdgePotential& rho, const WeightedGraph& g);

/// (delta_rho w)_i = (1/d_i) sum_j w_ij p_i(w_ij^(i)); coefficients of edges
/// stored with i as head are brought into the i frame via the two laws.
Cochain0 apply_delta(const TwistedOneForm& w, const EdgePotential& rho, const WeightedGraph& g);

/// Degree-weighted inner product sum_i d_i <f_i, g_i>.
double inner0(const Cochain0& f, const Cochain0& h, const WeightedGraph& g);

struct OneFormInner {
  double single_orientation = 0.0;       // sum over canonical edges
  double both_orientations_halved = 0.0; // half-sum over both orientations
};

/// Both algebraic forms of the 1-form inner product; they agree for
/// orthogonal potentials. inner1 returns the single-orientation value.
OneFormInner inner1_forms(const TwistedOneForm& w, const TwistedOneForm& h,
                          const WeightedGraph& g, const EdgePotential& rho);
double inner1(const TwistedOneForm& w, const TwistedOneForm& h, const WeightedGraph& g,
              const EdgePotential& rho);

/// Twisted Hodge Laplacians as operator compositions.
Cochain0 laplacian0(const Cochain0& f, const EdgePotential& rho, const WeightedGraph& g);
TwistedOneForm laplacian1(const TwistedOneForm& w, const EdgePotential& rho,
                          const WeightedGraph& g);

struct KernelReport {
  int dim = 0;          // numerical dimension of ker d_rho
  Vector eigenvalues;   // smallest d+1 eigenvalues of D1^{-1} L1
};

/// Rank-revealing kernel dimension of the twisted differential. rel_tol is
/// the zero-eigenvalue threshold relative to the largest eigenvalue; the QR
/// rank cut uses its square root since singular values are eigenvalue roots.
/// Synchronizable iff dim == d.
KernelReport kernel_dim(const WeightedGraph& g, const EdgePotential& rho,
                        double rel_tol = kZeroEigRelTol);

struct HodgeParts {
  Cochain0 harmonic;
  Cochain0 coexact;
};

/// Spectral projection of f onto the near-kernel of the degree-0 Laplacian
/// (eigenvalues below rel_tol times the largest), orthogonal with respect to
/// inner0; coexact = f - harmonic.
HodgeParts hodge_decompose(const Cochain0& f, const EdgePotential& rho, const WeightedGraph& g,
                           double rel_tol = kZeroEigRelTol);

/// (1/d) sum of the d smallest eigenvalues of D1^{-1} L1, computed from the
/// symmetric normalization D1^{-1/2} L1 D1^{-1/2} (same spectrum).
double cheeger_lower_bound(const EdgePotential& rho, const WeightedGraph& g);

/// D1^{-1/2} L1 D1^{-1/2}, the symmetric normalization used by every
/// eigensolve in this module.
SpMat normalized_laplacian(const TwistedOperators& ops);

}  // namespace syncgeom
