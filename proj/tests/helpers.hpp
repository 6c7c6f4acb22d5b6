#ifndef GENENT_TEST_HELPERS_HPP
#define GENENT_TEST_HELPERS_HPP

#include "genent/constructions.hpp"
#include "genent/criteria.hpp"
#include "genent/eb.hpp"
#include "genent/rng.hpp"

namespace genent::test {

inline StateMatrix bell_state() {
  Vec v = Vec::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return StateMatrix(HilbertStructure({2, 2}, {"A", "B"}), v * v.adjoint(), true);
}

inline StateMatrix ghz_state() {
  Vec v = Vec::Zero(8);
  v(0) = v(7) = 1.0 / std::sqrt(2.0);
  return StateMatrix(HilbertStructure({2, 2, 2}, {"A", "B", "C"}), v * v.adjoint(), true);
}

inline StateMatrix random_state(std::mt19937_64& rng, const HilbertStructure& s, int rank) {
  return StateMatrix(s, random_density(rng, s.total_dim(), rank), true);
}

/// Random basis {|a_i>, i} with n index states on an na-dimensional A side.
inline EBBasis random_eb_basis(std::mt19937_64& rng, int na, int n) {
  EBBasis basis;
  basis.index_dim = n;
  for (int i = 0; i < n; ++i) basis.a_vectors.push_back(random_complex_vector(rng, na));
  return basis;
}

/// Random rank-r state supported on span{|a_i, i>}, resampled until NPT.
inline StateMatrix random_eb_state(std::mt19937_64& rng, const EBBasis& basis, int rank) {
  int na = basis.dim_a(), n = basis.size();
  HilbertStructure s({na, n}, {"A", "C1"});
  for (int attempt = 0; attempt < 100; ++attempt) {
    Mat c = random_complex_matrix(rng, n, rank);
    Mat span(na * n, n);
    for (int i = 0; i < n; ++i) span.col(i) = basis.span_vector(i, n);
    Mat psi = span * c;
    Mat m = psi * psi.adjoint();
    StateMatrix rho(s, m / m.trace().real(), true);
    if (min_eigenvalue(partial_transpose(rho, {"C1"})) < -1e-6) return rho;
  }
  throw std::runtime_error("failed to sample an NPT span-supported state");
}

/// Random invertible local factor whose first two columns are unit vectors:
/// the gauge class under which the canonical rank-2 parameters are invariant.
inline Mat random_gauge_factor(std::mt19937_64& rng, int d) {
  for (;;) {
    Mat g = random_complex_matrix(rng, d, d);
    if (std::abs(g.determinant()) < 1e-3) continue;
    g.col(0).normalize();
    g.col(1).normalize();
    return g;
  }
}

/// Whether (theta, mu) is the representative its own extraction selects
/// (corner 0 carries the larger separable weight).
inline bool canonical_representative(double theta, double mu) {
  double ct2 = std::pow(std::cos(theta), 2), st2 = std::pow(std::sin(theta), 2);
  double cm2 = std::pow(std::cos(mu), 2), sm2 = std::pow(std::sin(mu), 2);
  return ct2 * cm2 + st2 > ct2 * sm2 + 1e-6;
}

}  // namespace genent::test

#endif
