#ifndef GENENT_CRITERIA_HPP
#define GENENT_CRITERIA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genent/hilbert.hpp"

namespace genent {

struct WernerParams {
  int d = 2;       // local dimension >= 2
  double p = 0.0;  // in [-1, 1]
  void validate() const;
};

enum class WernerClass { SEPARABLE, NPT_1COPY_UNDISTILLABLE, NPT_1COPY_DISTILLABLE };
std::string werner_class_name(WernerClass c);

/// (I + p V) / (d^2 + p d) on d (x) d with V the swap operator; unit trace.
/// PPT exactly when p >= -1/d.
StateMatrix werner_state(const WernerParams& params);

/// Interval classification: p in [-1/d, 1] separable; [-1/2, -1/d) NPT but
/// one-copy undistillable; [-1, -1/2) NPT and one-copy distillable.
WernerClass classify_werner(const WernerParams& params);

enum class Verdict {
  SEPARABLE_CERTIFIED,
  PPT,
  NPT,
  ONE_COPY_DISTILLABLE,
  NOT_FOUND_DISTILLABLE,
  GE_CERTIFIED,
  PPT_MIXTURE_FEASIBLE,
  INCONCLUSIVE,
};
std::string verdict_name(Verdict v);
Verdict verdict_from_name(const std::string& name);

/// Outcome record for entanglement tests. Evidence:
///  - witness: the certified witness W (GE) or a candidate seed (stalled search)
///  - parts: mixture parts [delta, eps, zeta] in cut order, or the per-cut
///    witness decompositions [P_A, Q_A, P_B, Q_B, P_C, Q_C]
///  - vector: a Schmidt-rank-2 vector in the state's system order
struct Certificate {
  Verdict verdict = Verdict::INCONCLUSIVE;
  double value = 0;
  double residual = 0;
  uint64_t seed = 0;
  std::optional<Mat> witness;
  std::vector<Mat> parts;
  std::optional<Vec> vector;
};

/// PPT across the cut whose second side is `side`: true iff the minimum
/// eigenvalue of the partial transpose is >= -tol.psd * lambda_max.
std::pair<bool, double> ppt_check(const StateMatrix& rho, const std::vector<std::string>& side,
                                  const Tolerances& tol = {});

/// (||rho^Gamma||_1 - 1) / 2 for the trace-normalized state; zero for PPT.
double negativity(const StateMatrix& rho, const std::vector<std::string>& side);

/// Alternating minimization of <psi| rho^Gamma |psi> over Schmidt-rank-2
/// vectors across the cut (side = transposed systems); seeded restarts.
/// Negative results are heuristic: NOT_FOUND_DISTILLABLE is not a proof.
Certificate one_copy_distillable_search(const StateMatrix& rho,
                                        const std::vector<std::string>& side, int restarts,
                                        uint64_t seed, int max_iters = 500);

/// Alternating-projection feasibility for delta + eps + zeta = rho with each
/// part PSD and PT-PSD across its own single-system cut. Feasible ->
/// PPT_MIXTURE_FEASIBLE (explicitly NOT a biseparability proof). Stalled ->
/// INCONCLUSIVE with the residual direction stored as a witness seed.
Certificate ppt_mixture_search(const StateMatrix& rho, int max_iters, double tol, uint64_t seed);

/// Fully decomposable witness certification: normalizes W0, requires
/// Tr(W rho) < -1e-9, and searches P_M, Q_M >= 0 with W = P_M + Q_M^{Gamma_M}
/// for every single-system cut M. All cuts feasible -> GE_CERTIFIED.
Certificate witness_certify(const StateMatrix& rho, const Mat& w0, uint64_t seed,
                            int max_iters = 5000);

/// Full pipeline: mixture search, then witness certification from the stalled
/// residual direction, then a spectral fallback seed.
Certificate certify_ge(const StateMatrix& rho, uint64_t seed, int max_iters = 20000,
                       double tol = 1e-7);

/// Re-checks a certificate against a state from stored evidence alone.
/// Returns an empty string on success, else the name of the failing check.
std::string reverify_certificate(const Certificate& cert, const StateMatrix& rho,
                                 const std::vector<std::string>& side_hint = {});

}  // namespace genent

#endif
