#include <doctest.h>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "syncgeom/holonomy.hpp"
#include "syncgeom/solver.hpp"

using namespace syncgeom;
using namespace syncgeom::test;

namespace {

WeightedGraph k3() {
  return build_graph({{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
}

Cochain0 planted_cochain(const VertexPotential& gv, int col = 0) {
  Cochain0 f = Cochain0::zero(gv.n(), gv.d, 1);
  for (int i = 0; i < gv.n(); ++i) f.block(i) = gv.g[static_cast<size_t>(i)].col(col);
  return f;
}

struct Instance {
  WeightedGraph g;
  EdgePotential rho;
};

Instance random_instance(Rng& rng, bool planted) {
  const int n = 5 + static_cast<int>(rng.uniform_int(0, 15));
  const int d = 1 + static_cast<int>(rng.uniform_int(0, 3));
  Instance inst{test::random_connected_graph(n, 2 + static_cast<int>(rng.uniform_int(0, 6)), rng), {}};
  inst.rho = planted ? potential_from_vertex(haar_vertex_potential(n, d, rng), inst.g)
                     : haar_edge_potential(inst.g, d, rng);
  return inst;
}

}  // namespace

TEST_CASE("build_operators: trivial potential reduces to the classical Laplacian") {
  const WeightedGraph g = k3();
  const TwistedOperators ops = build_operators(g, identity_edge_potential(g, 1));
  Matrix expected(3, 3);
  expected << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  CHECK((Matrix(ops.L1) - expected).norm() < 1e-15);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix(ops.L1));
  CHECK(eig.eigenvalues()(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eig.eigenvalues()(1) == doctest::Approx(3.0));
  CHECK(eig.eigenvalues()(2) == doctest::Approx(3.0));

  // Random-walk normalization: delta_rho * d_rho.
  const Matrix rw = Matrix(ops.delta_rho) * Matrix(ops.d_rho);
  Matrix rw_expected = expected / 2.0;
  CHECK((rw - rw_expected).norm() < 1e-14);
}

TEST_CASE("build_operators: L1 annihilates synchronization solutions") {
  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniform_int(0, 2));
    const WeightedGraph g = test::random_connected_graph(8, 6, rng);
    const VertexPotential gv = haar_vertex_potential(g.n, d, rng);
    const TwistedOperators ops = build_operators(g, potential_from_vertex(gv, g));
    const Cochain0 f = planted_cochain(gv);
    CHECK((ops.L1 * f.values).norm() < 1e-10);
  }
}

TEST_CASE("build_operators: matrix consistency identities") {
  Rng rng(43);
  for (int trial = 0; trial < 8; ++trial) {
    const Instance inst = random_instance(rng, trial % 2 == 0);
    const TwistedOperators ops = build_operators(inst.g, inst.rho);

    // L1 is exactly symmetric.
    CHECK((Matrix(ops.L1) - Matrix(ops.L1).transpose()).cwiseAbs().maxCoeff() < 1e-14);

    // delta_rho * d_rho = D1^{-1} L1 entrywise.
    const Matrix lhs = Matrix(ops.delta_rho) * Matrix(ops.d_rho);
    const Matrix rhs = ops.D1_diag.cwiseInverse().asDiagonal() * Matrix(ops.L1);
    const double scale = 1.0 + rhs.cwiseAbs().maxCoeff();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * scale);

    // L1 = d_rho^T diag(w_e I) d_rho.
    Vector we(ops.d_rho.rows());
    for (int e = 0; e < inst.g.m(); ++e)
      we.segment(static_cast<Eigen::Index>(e) * inst.rho.d, inst.rho.d)
          .setConstant(inst.g.weight(e));
    const Matrix glue = Matrix(ops.d_rho).transpose() * we.asDiagonal() * Matrix(ops.d_rho);
    CHECK((glue - Matrix(ops.L1)).cwiseAbs().maxCoeff() < 1e-12 * scale);
  }
}

TEST_CASE("apply_d: solutions vanish; classical difference; constant input") {
  Rng rng(45);
  const WeightedGraph g = k3();

  const VertexPotential gv = haar_vertex_potential(3, 3, rng);
  const EdgePotential sync_rho = potential_from_vertex(gv, g);
  CHECK(apply_d(planted_cochain(gv), sync_rho, g).coeffs.norm() < 1e-14);

  Cochain0 f = gaussian_cochain(3, 1, 1, rng);
  const TwistedOneForm w = apply_d(f, identity_edge_potential(g, 1), g);
  for (int e = 0; e < g.m(); ++e) {
    const Edge& ed = g.edges[static_cast<size_t>(e)];
    CHECK(w.coeffs(e, 0) ==
          doctest::Approx(f.values(ed.u, 0) - f.values(ed.v, 0)).epsilon(1e-14));
  }

  // Constant cochain with one twisted edge: only that edge carries a value.
  const WeightedGraph path = build_graph({{0, 1, 1.0}, {1, 2, 1.0}});
  EdgePotential rho = identity_edge_potential(path, 2);
  Rng rng2(46);
  rho.rho[0] = random_orthogonal(2, rng2);
  Cochain0 c = Cochain0::zero(3, 2, 1);
  c.values.setOnes();
  const TwistedOneForm dw = apply_d(c, rho, path);
  CHECK(dw.block(0).norm() > 1e-3);  // generic rotation moves the constant
  CHECK(dw.block(1).norm() < 1e-15);
}

TEST_CASE("apply_delta: zero form, classical divergence") {
  Rng rng(47);
  const WeightedGraph g = test::random_connected_graph(7, 5, rng);
  const EdgePotential rho = haar_edge_potential(g, 2, rng);
  CHECK(apply_delta(TwistedOneForm::zero(g.m(), 2, 1), rho, g).values.norm() == 0.0);

  // d=1, trivial potential: (delta w)_i = (1/d_i) sum_j w_ij w_ij^(i).
  const EdgePotential triv = identity_edge_potential(g, 1);
  const TwistedOneForm w = gaussian_one_form(g.m(), 1, 1, rng);
  const Cochain0 div = apply_delta(w, triv, g);
  for (int i = 0; i < g.n; ++i) {
    double expected = 0.0;
    for (const AdjEntry& a : g.adj[static_cast<size_t>(i)])
      expected += g.weight(a.edge) * (a.tail ? w.coeffs(a.edge, 0) : -w.coeffs(a.edge, 0));
    expected /= g.degree[static_cast<size_t>(i)];
    CHECK(div.values(i, 0) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("inner0: point masses, orthogonal supports, bilinearity") {
  Rng rng(49);
  const WeightedGraph g = test::random_connected_graph(6, 4, rng);
  Cochain0 e1 = Cochain0::zero(g.n, 2, 1);
  e1.values(2 * 2, 0) = 1.0;  // vertex 2, first coordinate
  CHECK(inner0(e1, e1, g) == doctest::Approx(g.degree[2]));

  Cochain0 e2 = Cochain0::zero(g.n, 2, 1);
  e2.values(3 * 2 + 1, 0) = 1.0;
  CHECK(inner0(e1, e2, g) == 0.0);

  const Cochain0 a = gaussian_cochain(g.n, 2, 1, rng);
  const Cochain0 b = gaussian_cochain(g.n, 2, 1, rng);
  Cochain0 ab = a;
  ab.values = 2.0 * a.values + 3.0 * b.values;
  const Cochain0 c = gaussian_cochain(g.n, 2, 1, rng);
  CHECK(inner0(ab, c, g) ==
        doctest::Approx(2.0 * inner0(a, c, g) + 3.0 * inner0(b, c, g)).epsilon(1e-12));
  CHECK(inner0(a, b, g) == doctest::Approx(inner0(b, a, g)));
}

TEST_CASE("inner1: single-edge mass, equivalence of both forms, classical limit") {
  Rng rng(51);
  const WeightedGraph g = test::random_connected_graph(6, 5, rng);
  const EdgePotential rho = haar_edge_potential(g, 3, rng);

  TwistedOneForm unit = TwistedOneForm::zero(g.m(), 3, 1);
  unit.coeffs(0, 0) = 1.0;  // canonical edge 0, first fibre coordinate
  CHECK(inner1(unit, unit, g, rho) == doctest::Approx(g.weight(0)));

  for (int trial = 0; trial < 10; ++trial) {
    const TwistedOneForm w = gaussian_one_form(g.m(), 3, 1, rng);
    const TwistedOneForm h = gaussian_one_form(g.m(), 3, 1, rng);
    const OneFormInner pair = inner1_forms(w, h, g, rho);
    CHECK(pair.single_orientation ==
          doctest::Approx(pair.both_orientations_halved).epsilon(1e-12));
  }

  // Trivial potential: reduces to sum_E w_ij <w_ij, h_ij>.
  const EdgePotential triv = identity_edge_potential(g, 1);
  const TwistedOneForm w = gaussian_one_form(g.m(), 1, 1, rng);
  double classical = 0.0;
  for (int e = 0; e < g.m(); ++e) classical += g.weight(e) * w.coeffs(e, 0) * w.coeffs(e, 0);
  CHECK(inner1(w, w, g, triv) == doctest::Approx(classical).epsilon(1e-12));
}

TEST_CASE("laplacian0: kernel on solutions; frozen K3 value; random-walk match") {
  Rng rng(53);
  const WeightedGraph g = k3();
  const VertexPotential gv = haar_vertex_potential(3, 2, rng);
  const EdgePotential sync_rho = potential_from_vertex(gv, g);
  CHECK(laplacian0(planted_cochain(gv), sync_rho, g).values.norm() < 1e-14);

  const EdgePotential triv = identity_edge_potential(g, 1);
  Cochain0 f = Cochain0::zero(3, 1, 1);
  f.values(0, 0) = 1.0;
  const Cochain0 lf = laplacian0(f, triv, g);
  CHECK(lf.values(0, 0) == doctest::Approx(1.0));
  CHECK(lf.values(1, 0) == doctest::Approx(-0.5));
  CHECK(lf.values(2, 0) == doctest::Approx(-0.5));

  // Componentwise composition equals D1^{-1} L1 as a matrix.
  const Instance inst = random_instance(rng, false);
  const TwistedOperators ops = build_operators(inst.g, inst.rho);
  const Cochain0 rf = gaussian_cochain(inst.g.n, inst.rho.d, 1, rng);
  const Vector direct = ops.D1_diag.cwiseInverse().asDiagonal() * (ops.L1 * rf.values.col(0));
  CHECK((laplacian0(rf, inst.rho, inst.g).values.col(0) - direct).norm() < 1e-12);
}

TEST_CASE("laplacian1: kernel of delta is the kernel of the degree-1 Laplacian") {
  Rng rng(55);
  const Instance inst = random_instance(rng, false);
  const TwistedOperators ops = build_operators(inst.g, inst.rho);
  // Build an element of ker delta by projecting a random form onto the
  // orthogonal complement of the row space of delta (Euclidean complement of
  // range(delta^T) matches ker(delta)).
  const Matrix delta = Matrix(ops.delta_rho);
  const TwistedOneForm w = gaussian_one_form(inst.g.m(), inst.rho.d, 1, rng);
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(delta);
  const Vector fitted = cod.solve(delta * w.coeffs.col(0));
  TwistedOneForm kernel_part = w;
  kernel_part.coeffs.col(0) = w.coeffs.col(0) - fitted;
  REQUIRE((delta * kernel_part.coeffs.col(0)).norm() < 1e-8);
  CHECK(laplacian1(kernel_part, inst.rho, inst.g).coeffs.norm() < 1e-8);
}

TEST_CASE("adjointness of d and delta on random instances") {
  Rng rng(57);
  for (int trial = 0; trial < 25; ++trial) {
    const Instance inst = random_instance(rng, trial % 2 == 0);
    const Cochain0 f = gaussian_cochain(inst.g.n, inst.rho.d, 1, rng);
    const TwistedOneForm w = gaussian_one_form(inst.g.m(), inst.rho.d, 1, rng);
    const double lhs = inner1(apply_d(f, inst.rho, inst.g), w, inst.g, inst.rho);
    const double rhs = inner0(f, apply_delta(w, inst.rho, inst.g), inst.g);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs) + std::abs(rhs)));
  }
}

TEST_CASE("quadratic form identity") {
  Rng rng(59);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = random_instance(rng, false);
    const Cochain0 f = gaussian_cochain(inst.g.n, inst.rho.d, 1, rng);
    const double lhs = inner0(f, laplacian0(f, inst.rho, inst.g), inst.g);
    CompensatedSum rhs;
    for (int e = 0; e < inst.g.m(); ++e) {
      const Edge& ed = inst.g.edges[static_cast<size_t>(e)];
      rhs.add(ed.w * (f.block(ed.u) - inst.rho.forward(e) * f.block(ed.v)).squaredNorm());
    }
    CHECK(lhs == doctest::Approx(rhs.value()).epsilon(1e-10));
  }
}

TEST_CASE("kernel_dim: planted d, flipped square 0, noisy 0") {
  Rng rng(61);
  const WeightedGraph g = test::random_connected_graph(9, 6, rng);
  const int d = 3;
  const EdgePotential planted = potential_from_vertex(haar_vertex_potential(g.n, d, rng), g);
  CHECK(kernel_dim(g, planted).dim == d);

  const WeightedGraph sq = build_graph({{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {0, 3, 1.0}});
  EdgePotential flip = identity_edge_potential(sq, 1);
  flip.rho[static_cast<size_t>(*sq.find_edge(0, 3))](0, 0) = -1.0;
  const KernelReport flip_rep = kernel_dim(sq, flip);
  CHECK(flip_rep.dim == 0);
  // Spectrum of the flipped 4-cycle random-walk Laplacian: 1 - cos((2k+1)pi/4).
  CHECK(flip_rep.eigenvalues(0) == doctest::Approx(1.0 - std::sqrt(0.5)).epsilon(1e-10));

  const EdgePotential noisy = haar_edge_potential(g, d, rng);
  CHECK(kernel_dim(g, noisy).dim == 0);
}

TEST_CASE("kernel_dim: agrees with the eigenvalue count and stays below d") {
  Rng rng(63);
  for (int trial = 0; trial < 15; ++trial) {
    const Instance inst = random_instance(rng, trial % 2 == 0);
    const KernelReport rep = kernel_dim(inst.g, inst.rho);
    CHECK(rep.dim <= inst.rho.d);

    const TwistedOperators ops = build_operators(inst.g, inst.rho);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix(normalized_laplacian(ops)));
    const double cut = kZeroEigRelTol * eig.eigenvalues()(eig.eigenvalues().size() - 1);
    int count = 0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
      if (eig.eigenvalues()(i) < cut) ++count;
    CHECK(rep.dim == count);
  }
}

TEST_CASE("spectrum gauge invariance of L1") {
  Rng rng(65);
  for (int trial = 0; trial < 6; ++trial) {
    const Instance inst = random_instance(rng, false);
    const VertexPotential h = haar_vertex_potential(inst.g.n, inst.rho.d, rng);
    const TwistedOperators ops = build_operators(inst.g, inst.rho);
    const TwistedOperators acted = build_operators(inst.g, gauge_act(h, inst.rho, inst.g));
    Eigen::SelfAdjointEigenSolver<Matrix> e1(Matrix(ops.L1));
    Eigen::SelfAdjointEigenSolver<Matrix> e2(Matrix(acted.L1));
    CHECK((e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("hodge_decompose: reconstruction, orthogonality, Poisson oracle") {
  Rng rng(67);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = random_instance(rng, trial % 2 == 0);
    const Cochain0 f = gaussian_cochain(inst.g.n, inst.rho.d, 1, rng);
    const HodgeParts parts = hodge_decompose(f, inst.rho, inst.g);

    // The coexact part is f - harmonic by definition, bit for bit.
    CHECK((parts.coexact.values - (f.values - parts.harmonic.values)).norm() == 0.0);
    CHECK((parts.harmonic.values + parts.coexact.values - f.values).cwiseAbs().maxCoeff() <=
          1e-12 * (1.0 + f.values.cwiseAbs().maxCoeff()));

    const double f2 = inner0(f, f, inst.g);
    CHECK(std::abs(inner0(parts.harmonic, parts.coexact, inst.g)) <= 1e-8 * f2);

    // Harmonic part is killed by d (within the spectral cut).
    const double res = apply_d(parts.harmonic, inst.rho, inst.g).coeffs.norm();
    CHECK(res <= 1e-4 * (1.0 + parts.harmonic.values.norm()));

    // Poisson verification: solve laplacian1(theta) = d f by least squares;
    // delta theta then realizes the coexact part.
    const TwistedOperators ops = build_operators(inst.g, inst.rho);
    const Matrix lap1 = Matrix(ops.d_rho) * Matrix(ops.delta_rho);
    const Vector rhs = ops.d_rho * f.values.col(0);
    const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(lap1);
    const Vector theta = cod.solve(rhs);
    CHECK((lap1 * theta - rhs).norm() <= 1e-8);
    const Vector coexact_via_delta = ops.delta_rho * theta;
    CHECK((coexact_via_delta - parts.coexact.values.col(0)).norm() <=
          1e-6 * (1.0 + parts.coexact.values.norm()));
  }
}

TEST_CASE("hodge_decompose: harmonic inputs and trivial kernels") {
  Rng rng(69);
  const WeightedGraph g = test::random_connected_graph(8, 6, rng);
  const VertexPotential gv = haar_vertex_potential(g.n, 3, rng);
  const EdgePotential sync_rho = potential_from_vertex(gv, g);
  const Cochain0 sol = planted_cochain(gv);
  const HodgeParts hp = hodge_decompose(sol, sync_rho, g);
  CHECK(hp.coexact.values.norm() < 1e-8 * sol.values.norm());

  const EdgePotential noisy = haar_edge_potential(g, 3, rng);
  const Cochain0 f = gaussian_cochain(g.n, 3, 1, rng);
  const HodgeParts hn = hodge_decompose(f, noisy, g);
  CHECK(hn.harmonic.values.norm() < 1e-8 * f.values.norm());
}

TEST_CASE("cheeger_lower_bound: zero for synchronizable, bounds candidates") {
  Rng rng(71);
  const WeightedGraph g = test::random_connected_graph(9, 6, rng);
  const VertexPotential gv = haar_vertex_potential(g.n, 2, rng);
  CHECK(cheeger_lower_bound(potential_from_vertex(gv, g), g) < 1e-10);
  CHECK(cheeger_lower_bound(identity_edge_potential(g, 1), g) < 1e-10);

  for (int trial = 0; trial < 8; ++trial) {
    const Instance inst = random_instance(rng, false);
    const double bound = cheeger_lower_bound(inst.rho, inst.g);
    for (int c = 0; c < 5; ++c) {
      const VertexPotential cand = haar_vertex_potential(inst.g.n, inst.rho.d, rng);
      CHECK(nu_graph(cand, inst.rho, inst.g) >= bound - 1e-8);
    }
  }
}
