#include "genent/measures.hpp"

#include <cmath>

namespace genent {

double concurrence_2qubit(const StateMatrix& rho) {
  if (rho.structure().dims != std::vector<int>{2, 2})
    throw Error(Error::Kind::Shape, "concurrence is defined for two-qubit states");
  Mat m = rho.matrix() / rho.trace();
  Mat yy = Mat::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;  // (sy (x) sy) in the computational basis
  // The lambda_i are the singular values of tau = Phi^T (sy x sy) Phi for any
  // factorization rho = Phi Phi^dagger. Truncating Phi to the numerically
  // nonzero spectrum keeps the zero lambdas exact instead of sqrt-amplifying
  // eigenvalue noise on rank-deficient states.
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  double lmax = std::max(es.eigenvalues().maxCoeff(), 0.0);
  std::vector<int> keep;
  for (int i = 0; i < 4; ++i)
    if (es.eigenvalues()(i) > 1e-13 * lmax) keep.push_back(i);
  Mat phi(4, static_cast<int>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k)
    phi.col(k) = std::sqrt(es.eigenvalues()(keep[k])) * es.eigenvectors().col(keep[k]);
  Mat tau = phi.transpose() * yy * phi;
  Eigen::JacobiSVD<Mat> svd(tau);
  double c = 0.0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    c += (i == 0 ? 1.0 : -1.0) * svd.singularValues()(i);
  return std::max(0.0, c);
}

double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double eof_from_concurrence(double c) {
  c = std::clamp(c, 0.0, 1.0);
  return binary_entropy((1.0 + std::sqrt(1.0 - c * c)) / 2.0);
}

double eof_2qubit(const StateMatrix& rho) { return eof_from_concurrence(concurrence_2qubit(rho)); }

double entanglement_entropy(const PureVector& psi, const std::vector<std::string>& side) {
  Vec v = psi.vector / psi.vector.norm();
  StateMatrix proj(psi.structure, v * v.adjoint(), true);
  StateMatrix red = partial_trace(proj, side);
  Eigen::SelfAdjointEigenSolver<Mat> es(red.matrix(), Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double l = es.eigenvalues()(i);
    if (l > 1e-15) h -= l * std::log2(l);
  }
  return h;
}

std::string eof_tag_name(EofTag t) {
  switch (t) {
    case EofTag::WOOTTERS_EXACT: return "WOOTTERS_EXACT";
    case EofTag::PURE_ENTROPY: return "PURE_ENTROPY";
    case EofTag::SEPARABLE_ZERO: return "SEPARABLE_ZERO";
    case EofTag::EB_RANGE_ADDITIVE: return "EB_RANGE_ADDITIVE";
    case EofTag::TENSOR_ADDITIVE: return "TENSOR_ADDITIVE";
    case EofTag::SEP_FACTOR_ADDITIVE: return "SEP_FACTOR_ADDITIVE";
    case EofTag::BOUND_ONLY: return "BOUND_ONLY";
  }
  return "?";
}

}  // namespace genent
