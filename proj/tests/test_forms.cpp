#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "genent/forms.hpp"
#include "helpers.hpp"

using namespace genent;
using namespace genent::test;

namespace {

Vec unit(Vec v) { return v / v.norm(); }

/// Random fixture with y_j = x_j whose xi_j sit inside the PSD-feasible
/// window determined by (theta, mu); beta0/beta1 are filled by the solver.
RankTwoBisepParams random_fixture(std::mt19937_64& rng, int terms, int db = 2, int dc2 = 2) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RankTwoBisepParams params;
  params.theta = 0.2 + 1.1 * u(rng);
  params.mu = 0.2 + 1.1 * u(rng);
  params.f = 0.2 + 0.6 * u(rng);
  params.nu = 0.2 + 1.1 * u(rng);

  double ct2 = std::pow(std::cos(params.theta), 2), st2 = std::pow(std::sin(params.theta), 2);
  double cm = std::cos(params.mu), sm = std::sin(params.mu);
  double lo = std::atan(ct2 * cm * sm / (ct2 * cm * cm + st2));
  double hi = params.mu;
  std::vector<double> weights(terms);
  double sum = 0;
  for (auto& w : weights) sum += (w = 0.1 + u(rng));
  for (int j = 0; j < terms; ++j) {
    EpsTerm t;
    t.p = weights[j] / sum;
    t.xi = lo + (0.15 + 0.7 * u(rng)) * (hi - lo);
    t.w = unit(random_complex_vector(rng, db));
    t.x = unit(random_complex_vector(rng, dc2));
    t.y = t.x;
    params.eps_terms.push_back(t);
  }
  return params;
}

}  // namespace

TEST_CASE("parameter validation") {
  RankTwoBisepParams params;
  params.theta = 0.5;
  params.mu = 0.5;
  params.f = 0.5;
  params.nu = 0.5;
  EpsTerm t;
  t.p = 1.0;
  t.xi = 0.0;  // excluded endpoint: belongs to delta
  t.w = Vec::Ones(2);
  t.x = Vec::Ones(2);
  t.y = Vec::Ones(2);
  params.eps_terms.push_back(t);
  try {
    params.validate();
    FAIL("endpoint xi must be rejected");
  } catch (const Error& e) {
    CHECK(e.kind() == Error::Kind::Endpoint);
  }
  params.eps_terms[0].xi = 0.4;
  CHECK_NOTHROW(params.validate());
  params.eps_terms[0].p = 0.9;  // weights no longer sum to one
  CHECK_THROWS_AS(params.validate(), Error);
}

TEST_CASE("delta endpoints and marginal support") {
  std::mt19937_64 rng(51);
  HilbertStructure bc({2, 2}, {"B", "C2"});
  RankTwoBisepParams params;
  params.theta = 0.6;
  params.mu = 0.6;
  params.f = 0.5;
  params.nu = 0.0;
  params.beta0 = random_state(rng, bc, 2);
  params.beta1 = random_state(rng, bc, 2);

  // nu = 0: only the |00> corner carries weight
  StateMatrix delta = build_delta(params);
  CHECK(delta.trace() == doctest::Approx(0.5 * params.beta0->trace()).epsilon(1e-12));
  StateMatrix ac1 = partial_trace(delta, {"A", "C1"});
  CHECK(std::abs(ac1.matrix()(3, 3)) < 1e-14);

  // nu = pi/4 with beta0 = beta1 = I/4: diagonal AC1 marginal, equal corners
  params.nu = M_PI / 4;
  params.beta0 = StateMatrix(bc, Mat::Identity(4, 4) / 4.0);
  params.beta1 = params.beta0;
  delta = build_delta(params);
  ac1 = partial_trace(delta, {"A", "C1"});
  CHECK(std::abs(ac1.matrix()(0, 0) - ac1.matrix()(3, 3)) < 1e-14);
  Mat off = ac1.matrix();
  off(0, 0) = off(3, 3) = 0;
  CHECK(off.norm() < 1e-14);

  // random parameters: the AC1 marginal range always sits in span{|00>,|11>}
  params.nu = 0.9;
  params.beta0 = random_state(rng, bc, 3);
  params.beta1 = random_state(rng, bc, 3);
  delta = build_delta(params);
  ac1 = partial_trace(delta, {"A", "C1"});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if ((i == 1 || i == 2 || j == 1 || j == 2)) CHECK(std::abs(ac1.matrix()(i, j)) < 1e-14);
}

TEST_CASE("epsilon weight bookkeeping and range containment") {
  std::mt19937_64 rng(52);
  RankTwoBisepParams params = random_fixture(rng, 2);
  StateMatrix eps = build_epsilon(params);
  CHECK(eps.trace() == doctest::Approx(1.0 - params.f).epsilon(1e-12));

  StateMatrix ac1 = partial_trace(eps, {"A", "C1"});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if ((i == 1 || i == 2 || j == 1 || j == 2)) CHECK(std::abs(ac1.matrix()(i, j)) < 1e-13);

  // single term, xi = pi/4, x = y: a B-product state with a pure AC1C2 factor
  RankTwoBisepParams single;
  single.theta = 0.5;
  single.mu = 0.5;
  single.f = 0.5;
  single.nu = 0.5;
  EpsTerm t;
  t.p = 1.0;
  t.xi = M_PI / 4;
  t.w = unit(random_complex_vector(rng, 2));
  t.x = unit(random_complex_vector(rng, 2));
  t.y = t.x;
  single.eps_terms.push_back(t);
  StateMatrix eps1 = build_epsilon(single);
  CHECK(numerical_rank(eps1, 1e-10) == 1);
}

TEST_CASE("forward-constructed fixtures satisfy all marginal equations") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    RankTwoBisepParams params = random_fixture(rng, 1 + trial % 3);
    StateMatrix beta;
    try {
      beta = solve_marginal_fixture(params);
    } catch (const Error&) {
      continue;  // infeasible xi draw
    }
    StateMatrix alpha = canonical_rank2_state(params.theta, params.mu);
    MarginalReport rep = verify_marginals(alpha, beta, params);
    CHECK(rep.alpha_residual < 1e-12);
    CHECK(rep.cos2 < 1e-10);
    CHECK(rep.sin2 < 1e-10);
    CHECK(rep.cross < 1e-10);

    // summing the two diagonal equations recovers trace consistency
    CHECK(rep.cos2 + rep.sin2 < 2e-10);

    // the assembled 4-partite state has its AC1 marginal proportional to alpha
    StateMatrix sigma(build_delta(params).structure(),
                      build_delta(params).matrix() + build_epsilon(params).matrix());
    StateMatrix ac1 = partial_trace(sigma, {"A", "C1"});
    double tr = ac1.trace();
    CHECK((ac1.matrix() / tr - alpha.matrix()).norm() < 1e-9);
  }
}

TEST_CASE("perturbation probes push residuals above 1e-5") {
  std::mt19937_64 rng(54);
  RankTwoBisepParams params = random_fixture(rng, 2);
  StateMatrix beta;
  for (int attempt = 0;; ++attempt) {
    try {
      beta = solve_marginal_fixture(params);
      break;
    } catch (const Error&) {
      REQUIRE(attempt < 50);
      params = random_fixture(rng, 2);
    }
  }
  StateMatrix alpha = canonical_rank2_state(params.theta, params.mu);

  RankTwoBisepParams bumped = params;
  bumped.eps_terms[0].x(0) += 1e-3;
  bumped.eps_terms[0].y = bumped.eps_terms[0].x;
  MarginalReport rep = verify_marginals(alpha, beta, bumped);
  CHECK(rep.cross > 1e-5);

  bumped = params;
  bumped.theta += 1e-3;
  rep = verify_marginals(canonical_rank2_state(bumped.theta, bumped.mu), beta, bumped);
  CHECK(rep.cos2 + rep.sin2 + rep.cross > 1e-5);
}

TEST_CASE("missing epsilon terms leave the cross equation unmatched") {
  std::mt19937_64 rng(55);
  RankTwoBisepParams params;
  params.theta = 0.7;
  params.mu = 0.8;
  params.f = 0.5;
  params.nu = 0.6;
  HilbertStructure bc({2, 2}, {"B", "C2"});
  params.beta0 = random_state(rng, bc, 2);
  params.beta1 = random_state(rng, bc, 2);
  StateMatrix beta = random_state(rng, bc, 3);
  MarginalReport rep = verify_marginals(canonical_rank2_state(params.theta, params.mu), beta,
                                        params);
  double expected = std::pow(std::cos(params.theta), 2) * std::cos(params.mu) *
                    std::sin(params.mu) * beta.matrix().norm();
  CHECK(rep.cross == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("corner-supported terms fold into delta without changing the state") {
  std::mt19937_64 rng(56);
  RankTwoBisepParams params = random_fixture(rng, 2);
  StateMatrix beta;
  for (int attempt = 0;; ++attempt) {
    try {
      beta = solve_marginal_fixture(params);
      break;
    } catch (const Error&) {
      REQUIRE(attempt < 50);
      params = random_fixture(rng, 2);
    }
  }
  StateMatrix delta = build_delta(params), eps = build_epsilon(params);

  // carve a corner-supported zeta out of delta and re-merge it
  double g = 0.3;
  RankTwoBisepParams carved = params;
  carved.beta0 = StateMatrix(params.beta0->structure(), (1.0 - g) * params.beta0->matrix());
  StateMatrix delta_carved = build_delta(carved);
  Mat zeta = delta.matrix() - delta_carved.matrix();
  CHECK(min_eigenvalue(zeta) > -1e-12);  // zeta is itself a valid state part
  CHECK((delta_carved.matrix() + zeta + eps.matrix() - (delta.matrix() + eps.matrix())).norm() <
        1e-13);

  // merging back reproduces the original parameters' marginal consistency
  MarginalReport rep =
      verify_marginals(canonical_rank2_state(params.theta, params.mu), beta, params);
  CHECK(rep.cos2 < 1e-10);
}

TEST_CASE("pt-symmetric branch fixtures verify all matching equations") {
  std::mt19937_64 rng(57);
  for (int trial = 0; trial < 5; ++trial) {
    // real epsilon terms with y = x are PT-symmetric; the branch terms are
    // then q_k = p_k, eta_k = xi_k, psi_k = |w_k, x_k>
    RankTwoBisepParams params = random_fixture(rng, 2);
    for (auto& t : params.eps_terms) {
      t.w = unit(t.w.real().cast<cplx>());
      t.x = unit(t.x.real().cast<cplx>());
      t.y = t.x;
    }
    for (const auto& t : params.eps_terms) {
      PtTerm q;
      q.q = t.p;
      q.eta = t.xi;
      Vec psi(t.w.size() * t.x.size());
      for (int b = 0; b < t.w.size(); ++b)
        for (int c = 0; c < t.x.size(); ++c) psi(b * t.x.size() + c) = t.w(b) * t.x(c);
      q.psi = psi;
      params.pt_terms.push_back(q);
    }
    StateMatrix eps = build_epsilon(params);
    PtBranchReport rep = verify_pt_branch(eps.matrix(), params);
    CHECK(rep.pt_symmetric);
    REQUIRE(rep.applicable);
    CHECK(rep.symmetry_residual < 1e-12);
    CHECK(rep.form_residual < 1e-10);
    CHECK(rep.weights < 1e-10);
    CHECK(rep.sines < 1e-10);
    CHECK(rep.cross < 1e-10);
    CHECK(rep.rank_bound_ok);

    // perturbing one branch angle breaks the matching equations
    RankTwoBisepParams bumped = params;
    bumped.pt_terms[0].eta += 1e-3;
    PtBranchReport bad = verify_pt_branch(eps.matrix(), bumped);
    CHECK(bad.weights + bad.sines + bad.cross > 1e-5);
  }
}

TEST_CASE("complex relative phases break PT symmetry") {
  std::mt19937_64 rng(58);
  RankTwoBisepParams params = random_fixture(rng, 1);
  params.eps_terms[0].w = unit(params.eps_terms[0].w.real().cast<cplx>());
  params.eps_terms[0].x = unit(params.eps_terms[0].x.real().cast<cplx>());
  params.eps_terms[0].y = params.eps_terms[0].x * cplx(std::cos(0.7), std::sin(0.7));
  PtTerm q;
  q.q = 1.0;
  q.eta = params.eps_terms[0].xi;
  q.psi = Vec::Ones(4);
  params.pt_terms.push_back(q);
  StateMatrix eps = build_epsilon(params);
  PtBranchReport rep = verify_pt_branch(eps.matrix(), params);
  CHECK(!rep.pt_symmetric);
  CHECK(!rep.applicable);
}

TEST_CASE("equal-angle orthonormal branch reduces to equal-weight mixtures") {
  RankTwoBisepParams params;
  params.theta = 0.5;
  params.mu = 0.5;
  params.f = 0.5;
  params.nu = 0.5;
  HilbertStructure bc({2, 2}, {"B", "C2"});
  params.beta0 = StateMatrix(bc, Mat::Identity(4, 4) / 4.0);
  for (int k = 0; k < 2; ++k) {
    PtTerm q;
    q.q = 0.5;
    q.eta = M_PI / 4;
    q.psi = Vec::Zero(4);
    q.psi(k) = 1.0;
    params.pt_terms.push_back(q);
  }
  StateMatrix eps = build_epsilon_pt(params);
  PtBranchReport rep = verify_pt_branch(eps.matrix(), params);
  CHECK(rep.pt_symmetric);
  CHECK(rep.form_residual < 1e-12);
  CHECK(rep.rank_bound_ok);
}

TEST_CASE("proportionality detection") {
  std::mt19937_64 rng(59);
  Vec u = random_complex_vector(rng, 3);
  auto m = proportional_factor(u, (cplx(0, 2) * u).eval(), 1e-10);
  REQUIRE(m.has_value());
  CHECK(std::abs(*m - cplx(0, 2)) < 1e-12);

  Vec v = Vec::Zero(3), w = Vec::Zero(3);
  v(0) = 1;
  w(1) = 1;
  CHECK(!proportional_factor(v, w, 1e-10).has_value());

  Vec noisy = u + 1e-12 * random_complex_vector(rng, 3);
  auto m2 = proportional_factor(u, noisy, 1e-10);
  REQUIRE(m2.has_value());
  CHECK(std::abs(*m2 - 1.0) < 1e-9);
}

TEST_CASE("NPT/PPT verdict for B C2 operators") {
  StateMatrix bell = bell_state();
  WernerReduction red = werner_reduction_check(bell);
  CHECK(red.npt);
  CHECK(red.min_pt_eigenvalue == doctest::Approx(-0.5).epsilon(1e-12));

  StateMatrix mixed(HilbertStructure({2, 2}, {"B", "C2"}), Mat::Identity(4, 4) / 4.0, true);
  CHECK(!werner_reduction_check(mixed).npt);

  WernerParams wp{3, -0.5};
  CHECK(werner_reduction_check(werner_state(wp)).npt);
}
