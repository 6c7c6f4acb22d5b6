#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include "genent/constructions.hpp"
#include "helpers.hpp"

using namespace genent;
using namespace genent::test;

namespace {

EBBasis computational_basis_2() {
  EBBasis basis;
  basis.index_dim = 2;
  Vec e0 = Vec::Zero(2), e1 = Vec::Zero(2);
  e0(0) = 1;
  e1(1) = 1;
  basis.a_vectors = {e0, e1};
  return basis;
}

/// Applies the recorded cascade steps (I x op on C1) in order.
Mat replay_cascade(const StateMatrix& rho, const ProjectionCascade& cascade) {
  int na = rho.structure().dims[0], nc = rho.structure().dims[1];
  Mat m = rho.matrix();
  for (const auto& step : cascade.steps) {
    Mat full = Mat::Zero(na * step.c1_operator.rows(), na * nc);
    for (int a = 0; a < na; ++a)
      full.block(a * step.c1_operator.rows(), a * nc, step.c1_operator.rows(), nc) =
          step.c1_operator;
    m = (full * m * full.adjoint()).eval();
    nc = static_cast<int>(step.c1_operator.rows());
  }
  return m;
}

}  // namespace

TEST_CASE("membership on span{|00>,|11>} and MC states") {
  EBBasis basis = computational_basis_2();
  StateMatrix bell = bell_state();
  CoefficientMatrix c = verify_eb_membership(relabel(bell, {"A", "C1"}), basis);
  CHECK(c.c.rows() == 2);
  Mat rec = c.reconstruct();
  CHECK((rec - bell.matrix()).norm() < 1e-10);

  Mat cm(3, 3);
  cm << 0.5, 0.2, 0.1, 0.2, 0.3, 0.05, 0.1, 0.05, 0.2;
  StateMatrix mc = mc_state(cm, {"A", "C1"});
  CHECK_NOTHROW(verify_eb_membership(mc, mc_basis(3)));
}

TEST_CASE("membership rejection reports the injected component norm") {
  EBBasis basis = computational_basis_2();
  double eps = 1e-3;
  Vec v = Vec::Zero(4);
  v(0) = 1.0;  // |00> in the span
  v(1) = eps;  // epsilon |01> outside it
  StateMatrix rho(HilbertStructure({2, 2}, {"A", "C1"}), v * v.adjoint());
  try {
    verify_eb_membership(rho, basis, 1e-8);
    FAIL("membership should have been rejected");
  } catch (const Error& e) {
    CHECK(e.kind() == Error::Kind::Membership);
    CHECK(std::string(e.what()).find("residual") != std::string::npos);
  }
}

TEST_CASE("wootters_zero_row rotates a row onto its first column") {
  EBBasis basis = computational_basis_2();
  CoefficientMatrix c;
  c.basis = basis;
  c.c1_dim = 2;

  c.c = Mat::Zero(2, 3);
  c.c(0, 0) = 1.0;  // row already (1, 0, 0)
  c.c(1, 1) = 0.5;
  CoefficientMatrix r = wootters_zero_row(c, 0);
  CHECK(std::abs(std::abs(r.c(0, 0)) - 1.0) < 1e-12);
  CHECK(r.c.row(0).tail(2).norm() < 1e-12);

  c.c = Mat::Zero(2, 2);
  c.c(0, 0) = c.c(0, 1) = 1.0 / std::sqrt(2.0);
  c.c(1, 0) = 0.3;
  Mat before = c.reconstruct();
  r = wootters_zero_row(c, 0);
  CHECK(std::abs(r.c(0, 1)) < 1e-12);
  CHECK(std::abs(std::abs(r.c(0, 0)) - 1.0) < 1e-12);
  CHECK((r.reconstruct() - before).norm() < 1e-12);

  std::mt19937_64 rng(41);
  EBBasis b3 = random_eb_basis(rng, 2, 3);
  CoefficientMatrix c3{random_complex_matrix(rng, 3, 3), b3, 3};
  Mat before3 = c3.reconstruct();
  CoefficientMatrix r3 = wootters_zero_row(c3, 1);
  CHECK(r3.c.row(1).tail(2).norm() < 1e-11);
  CHECK((r3.reconstruct() - before3).norm() < 1e-10);

  CoefficientMatrix zero{Mat::Zero(2, 2), basis, 2};
  CHECK_THROWS_AS(wootters_zero_row(zero, 0), Error);
}

TEST_CASE("cascade on an already-rank-2 entangled state is a terminal projection") {
  EBBasis basis = computational_basis_2();
  StateMatrix bell = relabel(bell_state(), {"A", "C1"});
  ProjectionCascade cascade = projection_cascade(bell, basis);
  CHECK(cascade.final_rank <= 2);
  CHECK(cascade.surviving_indices == std::vector<int>{0, 1});
  CHECK((cascade.final_state.matrix() - bell.matrix()).norm() < 1e-10);
}

TEST_CASE("designed two-vector state projects onto its two live indices") {
  // |psi> = |0,1> + |1,2>, |phi> = |0,1> - |1,2> inside an n=3 basis
  EBBasis basis;
  basis.index_dim = 3;
  Vec a0 = Vec::Zero(2), a1 = Vec::Zero(2), a2 = Vec::Zero(2);
  a0(0) = 1;
  a1(0) = 1;
  a2(1) = 1;
  basis.a_vectors = {a0, a1, a2};
  Vec psi = Vec::Zero(6), phi = Vec::Zero(6);
  psi(1) = 1;
  psi(5) = 1;  // |0,1> + |1,2>
  phi(1) = 1;
  phi(5) = -1;
  // unequal weights keep the mixture entangled (equal weights would cancel
  // the coherences and leave a classically correlated state)
  Mat m = psi * psi.adjoint() + 0.5 * phi * phi.adjoint();
  StateMatrix rho(HilbertStructure({2, 3}, {"A", "C1"}), m);

  ProjectionCascade cascade = projection_cascade(rho, basis);
  CHECK(cascade.final_rank == 2);
  CHECK(cascade.surviving_indices == std::vector<int>{1, 2});
  StateMatrix pair = reduce_to_canonical_pair(rho, basis);
  CHECK(pair.structure().dims == std::vector<int>{2, 2});
  CHECK(min_eigenvalue(partial_transpose(pair, {pair.structure().labels[1]})) < -1e-10);
}

TEST_CASE("cascade peels dependent a-vectors through unipotent steps") {
  // psi1 = |a,0> + |a,1| lives entirely on the parallel pair, so the pivot
  // finds no independent partner in its column and must peel; psi2 keeps the
  // state entangled through the independent third vector
  EBBasis basis;
  basis.index_dim = 3;
  Vec a = Vec::Zero(2), b = Vec::Zero(2);
  a(0) = 1;
  b(0) = 0.6;
  b(1) = 0.8;
  basis.a_vectors = {a, a, b};
  Vec psi1 = basis.span_vector(0, 3) + basis.span_vector(1, 3);
  Vec psi2 = basis.span_vector(1, 3) + basis.span_vector(2, 3);
  Mat m = psi1 * psi1.adjoint() + psi2 * psi2.adjoint();
  StateMatrix rho(HilbertStructure({2, 3}, {"A", "C1"}), m / m.trace().real(), true);
  REQUIRE(min_eigenvalue(partial_transpose(rho, {"C1"})) < -1e-10);

  ProjectionCascade cascade = projection_cascade(rho, basis);
  CHECK(cascade.final_rank <= 2);
  CHECK(static_cast<int>(cascade.steps.size()) <= 3);
  bool has_peel = false;
  for (const auto& s : cascade.steps) has_peel |= s.kind == "Q";
  CHECK(has_peel);
  CHECK((replay_cascade(rho, cascade) - cascade.final_state.matrix()).norm() < 1e-8);
}

TEST_CASE("cascade property sweep: rank <= 2, NPT, <= n steps, replayable") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 3 + static_cast<int>(trial % 3);
    int na = 2 + static_cast<int>((trial / 3) % 2);
    EBBasis basis = random_eb_basis(rng, na, n);
    StateMatrix rho = random_eb_state(rng, basis, 3);
    ProjectionCascade cascade = projection_cascade(rho, basis);
    CHECK(cascade.final_rank <= 2);
    CHECK(static_cast<int>(cascade.steps.size()) <= n);
    CHECK((replay_cascade(rho, cascade) - cascade.final_state.matrix()).norm() < 1e-8);
    StateMatrix pair = reduce_to_canonical_pair(rho, basis);
    CHECK(min_eigenvalue(partial_transpose(pair, {pair.structure().labels[1]})) < -1e-10);
    // spectrum preserved between the cascade output and the compressed pair
    Eigen::SelfAdjointEigenSolver<Mat> e1(cascade.final_state.matrix());
    Eigen::SelfAdjointEigenSolver<Mat> e2(pair.matrix());
    CHECK(std::abs(e1.eigenvalues().maxCoeff() - e2.eigenvalues().maxCoeff()) < 1e-9);
  }
}

TEST_CASE("cascade refuses PPT input") {
  EBBasis basis = computational_basis_2();
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = m(3, 3) = 0.5;  // classically correlated: separable
  StateMatrix rho(HilbertStructure({2, 2}, {"A", "C1"}), m);
  CHECK_THROWS_AS(projection_cascade(rho, basis), Error);
}

TEST_CASE("product vectors in a 2x2 pencil: exact quadratic") {
  HilbertStructure s({2, 2}, {"A", "B"});
  Vec v00 = Vec::Zero(4), v11 = Vec::Zero(4), v01 = Vec::Zero(4);
  v00(0) = 1;
  v11(3) = 1;
  v01(1) = 1;

  PencilSolutions sol = product_vectors_in_pencil(PureVector(s, v00), PureVector(s, v11));
  REQUIRE(!sol.infinite_family);
  REQUIRE(sol.ratios.size() == 2);
  for (const auto& [a, b] : sol.ratios) CHECK(std::abs(a * b) < 1e-10);

  sol = product_vectors_in_pencil(PureVector(s, v00), PureVector(s, v01));
  CHECK(sol.infinite_family);  // common A factor: every combination is product

  Vec plus = (v00 + v11) / std::sqrt(2.0), minus = (v00 - v11) / std::sqrt(2.0);
  sol = product_vectors_in_pencil(PureVector(s, plus), PureVector(s, minus));
  REQUIRE(!sol.infinite_family);
  REQUIRE(sol.ratios.size() == 2);
  for (const auto& [a, b] : sol.ratios) CHECK(std::abs(std::abs(a) - std::abs(b)) < 1e-10);
}

TEST_CASE("product vectors in a 2x3 pencil: grid search path") {
  HilbertStructure s({2, 3}, {"A", "B"});
  Vec v = Vec::Zero(6), w = Vec::Zero(6);
  v(0) = 1;  // |0,0>
  w(4) = 1;  // |1,1>
  PencilSolutions sol = product_vectors_in_pencil(PureVector(s, v), PureVector(s, w));
  REQUIRE(!sol.infinite_family);
  REQUIRE(sol.ratios.size() == 2);
  for (const auto& [a, b] : sol.ratios) CHECK(std::abs(a * b) < 1e-6);

  // v = |00>+|11>, w = |01>+|12>: no product vector in the pencil
  Vec v2 = Vec::Zero(6), w2 = Vec::Zero(6);
  v2(0) = 1;
  v2(4) = 1;
  w2(1) = 1;
  w2(5) = 1;
  sol = product_vectors_in_pencil(PureVector(s, v2), PureVector(s, w2));
  CHECK(!sol.infinite_family);
  CHECK(sol.ratios.empty());
}

TEST_CASE("normal form on the closed-form example") {
  // alpha = 1/2 (|00>+|11>)(.)^dag + 1/4 |00><00|; normalized corner matrix
  // [[0.6, 0.4], [0.4, 0.4]] gives sin^2(theta) = det/m11 = 0.2, mu = pi/4
  HilbertStructure s({2, 2}, {"A", "B"});
  Vec u = Vec::Zero(4), e00 = Vec::Zero(4);
  u(0) = u(3) = 1.0;
  e00(0) = 1.0;
  Mat m = 0.5 * u * u.adjoint() + 0.25 * e00 * e00.adjoint();
  StateMatrix alpha(s, m);

  NormalFormResult nf = normal_form_rank2(alpha);
  CHECK(!nf.pure_limit);
  CHECK(nf.theta == doctest::Approx(std::asin(std::sqrt(0.2))).epsilon(1e-10));
  CHECK(nf.mu == doctest::Approx(M_PI / 4).epsilon(1e-10));

  Mat xy = Eigen::kroneckerProduct(nf.x.factors[0], nf.y.factors[1]).eval();
  Mat moved = xy * m * xy.adjoint();
  moved /= moved.trace().real();
  CHECK((moved - canonical_rank2_state(nf.theta, nf.mu).matrix()).norm() < 1e-9);
}

TEST_CASE("normal form limit and degeneracy cases") {
  HilbertStructure s({2, 2}, {"A", "B"});
  double mu = 0.7;
  Vec u = Vec::Zero(4);
  u(0) = std::cos(mu);
  u(3) = std::sin(mu);
  NormalFormResult nf = normal_form_rank2(StateMatrix(s, u * u.adjoint()));
  CHECK(nf.pure_limit);
  CHECK(nf.mu == doctest::Approx(mu).epsilon(1e-10));

  Mat corr = Mat::Zero(4, 4);
  corr(0, 0) = corr(3, 3) = 0.5;  // separable classically correlated state
  CHECK_THROWS_AS(normal_form_rank2(StateMatrix(s, corr)), Error);
}

TEST_CASE("normal form round trip under gauge-preserving local factors") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> angle(0.1, M_PI / 2 - 0.1);
  int done = 0;
  while (done < 25) {
    double theta = angle(rng), mu = angle(rng);
    if (!canonical_representative(theta, mu)) continue;
    StateMatrix canon = canonical_rank2_state(theta, mu);
    Mat ga = random_gauge_factor(rng, 2), gb = random_gauge_factor(rng, 2);
    Mat g = kroneckerProduct(ga, gb).eval();
    Mat m = g * canon.matrix() * g.adjoint();
    StateMatrix alpha(HilbertStructure({2, 2}, {"A", "B"}), m);

    NormalFormResult nf = normal_form_rank2(alpha);
    CHECK(std::abs(nf.theta - theta) < 1e-8);
    CHECK(std::abs(nf.mu - mu) < 1e-8);
    Mat xy = Eigen::kroneckerProduct(nf.x.factors[0], nf.y.factors[1]).eval();
    Mat moved = xy * m * xy.adjoint();
    moved /= moved.trace().real();
    CHECK((moved - canonical_rank2_state(nf.theta, nf.mu).matrix()).norm() < 1e-9);
    ++done;
  }
}

TEST_CASE("reduce_to_canonical_pair permutes far indices and preserves spectrum") {
  std::mt19937_64 rng(45);
  EBBasis basis = random_eb_basis(rng, 2, 6);
  // support only indices 3 and 5 so the cascade must relabel them to (0, 1)
  Vec s3 = basis.span_vector(3, 6), s5 = basis.span_vector(5, 6);
  Mat m = (s3 + s5) * (s3 + s5).adjoint() + 0.4 * s3 * s3.adjoint();
  StateMatrix rho(HilbertStructure({2, 6}, {"A", "C1"}), m / m.trace().real(), true);
  if (min_eigenvalue(partial_transpose(rho, {"C1"})) < -1e-8) {
    ProjectionCascade cascade = projection_cascade(rho, basis);
    CHECK(cascade.surviving_indices == std::vector<int>{3, 5});
    StateMatrix pair = reduce_to_canonical_pair(rho, basis);
    Eigen::SelfAdjointEigenSolver<Mat> e1(cascade.final_state.matrix()), e2(pair.matrix());
    CHECK(std::abs(e1.eigenvalues().maxCoeff() - e2.eigenvalues().maxCoeff()) < 1e-9);
  }
}
