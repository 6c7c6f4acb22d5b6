#ifndef GENENT_RNG_HPP
#define GENENT_RNG_HPP

#include <cstdint>
#include <random>

#include "genent/types.hpp"

namespace genent {

/// splitmix64 step; used to derive independent sub-seeds from a base seed so
/// that restart fan-out is reproducible.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d4a2fa9b1ba4bULL;
  return z ^ (z >> 31);
}

inline uint64_t sub_seed(uint64_t seed, uint64_t index) {
  uint64_t s = seed + 0x517cc1b727220a95ULL * (index + 1);
  return splitmix64(s);
}

inline Vec random_complex_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cplx(g(rng), g(rng));
  return v;
}

inline Mat random_complex_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

/// Haar-random unitary via QR of a Ginibre matrix.
inline Mat random_unitary(std::mt19937_64& rng, int dim) {
  Mat g = random_complex_matrix(rng, dim, dim);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    cplx d = r(i, i);
    q.col(i) *= (std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0));
  }
  return q;
}

/// Random density matrix of the given rank (Ginibre ensemble), trace 1.
inline Mat random_density(std::mt19937_64& rng, int dim, int rank) {
  Mat g = random_complex_matrix(rng, dim, rank);
  Mat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

}  // namespace genent

#endif
