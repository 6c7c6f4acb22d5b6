#ifndef GENENT_MEASURES_HPP
#define GENENT_MEASURES_HPP

#include <string>
#include <vector>

#include "genent/hilbert.hpp"

namespace genent {

/// Wootters concurrence C = max(0, l1 - l2 - l3 - l4) for a normalized
/// two-qubit state; the l_i are the descending square roots of the
/// eigenvalues of rho (sy (x) sy) rho* (sy (x) sy).
double concurrence_2qubit(const StateMatrix& rho);

double binary_entropy(double x);

/// h((1 + sqrt(1 - C^2)) / 2) in ebits.
double eof_from_concurrence(double c);
double eof_2qubit(const StateMatrix& rho);

/// Von Neumann entropy (base 2) of the reduced state across the cut.
double entanglement_entropy(const PureVector& psi, const std::vector<std::string>& side);

/// Justification tags for entanglement-of-formation bookkeeping. Values are
/// exact only for WOOTTERS_EXACT / PURE_ENTROPY / SEPARABLE_ZERO entries; the
/// additivity tags record structural composition rules, and BOUND_ONLY
/// entries carry a negativity lower-bound instead of an EOF value.
enum class EofTag {
  WOOTTERS_EXACT,
  PURE_ENTROPY,
  SEPARABLE_ZERO,
  EB_RANGE_ADDITIVE,
  TENSOR_ADDITIVE,
  SEP_FACTOR_ADDITIVE,
  BOUND_ONLY,
};
std::string eof_tag_name(EofTag t);

struct LedgerEntry {
  std::string cut;  // e.g. "A1:A2*C"
  double value = 0;
  EofTag tag = EofTag::BOUND_ONLY;
  std::string justification;
};

struct AdditivityLedger {
  std::vector<LedgerEntry> entries;
};

}  // namespace genent

#endif
