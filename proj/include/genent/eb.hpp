#ifndef GENENT_EB_HPP
#define GENENT_EB_HPP

#include <optional>
#include <string>
#include <vector>

#include "genent/hilbert.hpp"

namespace genent {

/// Spanning data of an entanglement-breaking subspace span{|a_i, i>}:
/// one (not necessarily normalized or distinct) vector |a_i> on the A side
/// per computational index basis state |i> on the C1 side.
struct EBBasis {
  std::vector<Vec> a_vectors;  // each of dimension dim_a
  int index_dim = 0;           // n; the C1 side must have dimension >= n

  int size() const { return static_cast<int>(a_vectors.size()); }
  int dim_a() const { return a_vectors.empty() ? 0 : static_cast<int>(a_vectors[0].size()); }
  /// |a_i, i> as a flat vector on dim_a * c1_dim.
  Vec span_vector(int i, int c1_dim) const;
};

/// Coefficients c_{ij} expressing decomposition vectors |psi_j> = sum_i
/// c_{ij} |a_i, i> of a state supported on the EB span.
struct CoefficientMatrix {
  Mat c;          // n x k
  EBBasis basis;  // the span the coefficients refer to
  int c1_dim = 0;

  /// sum_j |psi_j><psi_j| on the full (dim_a * c1_dim) space.
  Mat reconstruct() const;
};

struct CascadeStep {
  std::string kind;          // "P", "Q", "P'" or "Q'"
  std::vector<int> indices;  // index-basis states the step touches
  Mat c1_operator;           // the factor acting on C1 (A side is identity)
};

struct ProjectionCascade {
  std::vector<CascadeStep> steps;
  StateMatrix final_state;   // on the original (A, C1) space
  int final_rank = 0;
  std::vector<int> surviving_indices;  // the two index-basis states carrying the result
};

/// Checks range(rho) within span{|a_i, i>} and returns the coefficients of
/// the eigendecomposition vectors; throws Membership with the residual
/// otherwise.
CoefficientMatrix verify_eb_membership(const StateMatrix& rho, const EBBasis& basis,
                                       double tol = 1e-8);

/// Right-multiplies C by a unitary so the given row becomes (c, 0, ..., 0)
/// with c != 0. The reconstructed state is untouched because any two
/// decompositions of the same state differ by a right isometry.
CoefficientMatrix wootters_zero_row(const CoefficientMatrix& C, int row);

/// Constructive reduction of an entangled EB-supported state to an entangled
/// state of rank at most two by local index-side projections.
ProjectionCascade projection_cascade(const StateMatrix& rho, const EBBasis& basis,
                                     double tol = 1e-8);

/// Relabels the cascade output onto index-basis states {0, 1} and compresses
/// both sides, returning an entangled 2 (x) 2 state.
StateMatrix reduce_to_canonical_pair(const StateMatrix& rho, const EBBasis& basis,
                                     double tol = 1e-8);

struct PencilSolutions {
  bool infinite_family = false;
  std::vector<std::pair<cplx, cplx>> ratios;  // (a : b), normalized |a|^2+|b|^2 = 1
};

/// All (a : b) with a*v + b*w a product vector across the bipartition of the
/// common structure. Exact quadratic when both local dimensions are 2;
/// otherwise grid search plus golden-section refinement on the second
/// singular value of the matricization.
PencilSolutions product_vectors_in_pencil(const PureVector& v, const PureVector& w);

struct NormalFormResult {
  LocalOperator x;  // invertible A-side factor (paired with identity elsewhere)
  LocalOperator y;  // invertible B-side factor
  double theta = 0;
  double mu = 0;
  bool pure_limit = false;  // theta at the lower endpoint (pure input)
};

/// Brings a rank-2 state with product-spanned range to the canonical
/// two-parameter form on span{|00>, |11>}: after applying (X (x) Y) the state
/// is exactly cos^2(theta) |u><u| + sin^2(theta) |00><00| with
/// |u> = cos(mu)|00> + sin(mu)|11>, trace one.
///
/// Gauge conventions (required for the parameters to be well defined): the
/// two range product vectors are mapped from unit vectors, the residual
/// phase is absorbed so the (00,11) element is real positive, and of the two
/// corner assignments the one with the larger separable weight sin^2(theta)
/// is chosen.
NormalFormResult normal_form_rank2(const StateMatrix& alpha, double tol = 1e-8);

/// Canonical-form state for given parameters: trace-one 2 (x) 2 rank-2 state
/// on span{|00>, |11>}.
StateMatrix canonical_rank2_state(double theta, double mu);

}  // namespace genent

#endif
