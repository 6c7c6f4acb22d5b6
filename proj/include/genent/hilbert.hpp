#ifndef GENENT_HILBERT_HPP
#define GENENT_HILBERT_HPP

#include <optional>
#include <string>
#include <vector>

#include "genent/types.hpp"

namespace genent {

/// Ordered list of subsystem dimensions with unique labels. Defines the
/// tensor factorization of every state built on top of it.
struct HilbertStructure {
  std::vector<int> dims;
  std::vector<std::string> labels;

  HilbertStructure() = default;
  HilbertStructure(std::vector<int> d, std::vector<std::string> l);

  int num_systems() const { return static_cast<int>(dims.size()); }
  int total_dim() const;
  int index_of(const std::string& label) const;  // throws Error::Kind::Label
  bool has_label(const std::string& label) const;

  bool operator==(const HilbertStructure& o) const {
    return dims == o.dims && labels == o.labels;
  }
};

/// Hermitian PSD matrix over a HilbertStructure. States are stored
/// unnormalized by default; normalization is an explicit operation.
class StateMatrix {
 public:
  StateMatrix() = default;
  /// Validates Hermiticity and PSD-ness within `tol`.
  StateMatrix(HilbertStructure structure, Mat matrix, bool normalized = false,
              const Tolerances& tol = {});

  const HilbertStructure& structure() const { return structure_; }
  const Mat& matrix() const { return matrix_; }
  bool normalized() const { return normalized_; }
  double trace() const { return matrix_.trace().real(); }

  StateMatrix normalize() const;

 private:
  HilbertStructure structure_;
  Mat matrix_;
  bool normalized_ = false;
};

/// Column vector over a HilbertStructure.
struct PureVector {
  HilbertStructure structure;
  Vec vector;
  bool unit = false;

  PureVector() = default;
  PureVector(HilbertStructure s, Vec v);
  PureVector normalize() const;
  StateMatrix projector() const;  // |v><v| as an unnormalized state
};

/// One matrix factor per subsystem; factor i has column count dims[i]
/// (rows may differ for rectangular projectors/compressions).
struct LocalOperator {
  HilbertStructure structure;
  std::vector<Mat> factors;

  LocalOperator() = default;
  LocalOperator(HilbertStructure s, std::vector<Mat> f);
  Mat full() const;  // Kronecker product of the factors
  static LocalOperator identity(const HilbertStructure& s);
};

// ---------------------------------------------------------------------------
// Products and index bookkeeping

/// Plain tensor product: structures concatenate, matrices Kronecker-multiply.
StateMatrix tensor_product(const StateMatrix& rho, const StateMatrix& sigma);

/// Reorders the subsystems: perm[new_pos] = old_pos.
StateMatrix permute_systems(const StateMatrix& rho, const std::vector<int>& perm);
PureVector permute_systems(const PureVector& v, const std::vector<int>& perm);

/// The permutation matrix realizing permute_systems on flat indices.
Mat permutation_matrix(const HilbertStructure& s, const std::vector<int>& perm);

/// Fuses `count` adjacent systems starting at `start` into one system whose
/// label joins the originals with '*'. Pure relabeling: the matrix is
/// untouched because adjacent systems already use Kronecker index order.
StateMatrix merge_adjacent(const StateMatrix& rho, int start, int count);

/// Inverse of merge_adjacent given the sub-dimensions; also a pure relabeling.
StateMatrix split_system(const StateMatrix& rho, int pos, const std::vector<int>& sub_dims,
                         const std::vector<std::string>& sub_labels);

StateMatrix relabel(const StateMatrix& rho, const std::vector<std::string>& labels);

/// Kronecker product of states: pairs the first m systems of rho with the
/// systems of sigma and fuses each pair. `pairing` lists (rho label, sigma
/// label) pairs and must match the leading systems of both states in order.
StateMatrix kron_merge(const StateMatrix& rho, const StateMatrix& sigma,
                       const std::vector<std::pair<std::string, std::string>>& pairing);

/// Lead-system-preserving Kronecker product: alpha on (A, C_{1,1..n}) and
/// beta on (B, C_{2,1..n}) combine into (A, B, C_1..C_n) with each C_j the
/// fusion of C_{1,j} and C_{2,j}.
StateMatrix kc_product(const StateMatrix& alpha, const StateMatrix& beta);

// ---------------------------------------------------------------------------
// Reductions and local maps

StateMatrix partial_trace(const StateMatrix& rho, const std::vector<std::string>& keep);

/// Transposes the listed systems; returns a plain Hermitian matrix (the
/// result need not be PSD).
Mat partial_transpose(const StateMatrix& rho, const std::vector<std::string>& systems);

/// Raw-matrix variant for intermediates that need not be PSD.
Mat partial_transpose(const Mat& m, const HilbertStructure& s,
                      const std::vector<std::string>& systems);

/// X rho X^dagger with X the Kronecker product of the per-system factors.
StateMatrix apply_local(const StateMatrix& rho, const LocalOperator& X,
                        const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Spectral queries

int numerical_rank(const StateMatrix& rho, double tol);
double min_eigenvalue(const Mat& m);
std::vector<PureVector> range_basis(const StateMatrix& rho, double tol);

/// Enforces Hermiticity within tol.herm (relative); throws Integrity otherwise.
void check_hermitian(const Mat& m, double rel_tol);

}  // namespace genent

#endif
