#ifndef GENENT_TYPES_HPP
#define GENENT_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace genent {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr const char* kVersion = "0.1.0";

/// Numerical tolerances shared across the library. All overridable.
struct Tolerances {
  double herm = 1e-10;   // relative Hermiticity deviation
  double psd = 1e-9;     // eigenvalue floor, relative to lambda_max
  double trace = 1e-10;  // trace-one deviation for normalized states
  double rank = 1e-10;   // eigenvalue cutoff for numerical rank
};

class Error : public std::runtime_error {
 public:
  enum class Kind {
    Label,        // unknown or colliding system label
    Arity,        // mismatched system counts
    Shape,        // incompatible matrix/vector dimensions
    Integrity,    // Hermiticity/PSD/trace violation
    Membership,   // range not contained in the declared span
    DegenerateRow,
    Cascade,      // projection cascade could not produce an entangled rank-2 state
    NormalForm,   // range not spanned by two product vectors
    Degeneracy,   // separable / endpoint-degenerate input
    Endpoint,     // parameter at an excluded interval endpoint
    Validity,     // generic invalid-argument
    DimCap,       // construction exceeds the configured dimension cap
    Io,           // file/JSON errors
  };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace genent

#endif
