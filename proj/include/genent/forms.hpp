#ifndef GENENT_FORMS_HPP
#define GENENT_FORMS_HPP

#include <optional>
#include <vector>

#include "genent/eb.hpp"
#include "genent/hilbert.hpp"

namespace genent {

/// One term of the parametric epsilon part: weight p, angle xi in (0, pi/2),
/// |w> on B, |x> and |y> on C_2.
struct EpsTerm {
  double p = 0;
  double xi = 0;
  Vec w, x, y;
};

/// One term of the PT-symmetric separable branch: weight q, angle eta in
/// (-pi/2, 0) u (0, pi/2), |psi> on the joint B C_2 space.
struct PtTerm {
  double q = 0;
  double eta = 0;
  Vec psi;
};

/// Parameters of the structural biseparable decomposition of a rank-2 state:
/// the canonical-form angles (theta, mu) of the A C_1 part, the delta/epsilon
/// mixing weight f, the delta split angle nu with its two B C_2 states, the
/// epsilon terms, and (optionally) the PT-symmetric branch terms.
struct RankTwoBisepParams {
  double theta = 0, mu = 0;  // in (0, pi/2)
  double f = 0;              // in (0, 1)
  double nu = 0;             // in [0, pi/2]
  std::optional<StateMatrix> beta0, beta1;  // on (B, C_2)
  std::vector<EpsTerm> eps_terms;
  std::vector<PtTerm> pt_terms;

  int dim_b() const;
  int dim_c2() const;
  /// Weight sums (tol 1e-12) and angle ranges; Endpoint error for xi or eta
  /// at an excluded interval end.
  void validate() const;
};

/// The 4-partite structure (A, B, C1, C2) shared by delta/epsilon.
HilbertStructure bisep_structure(int dim_b, int dim_c2);

/// f cos^2(nu) |00><00|_{AC1} (x) beta0 + f sin^2(nu) |11><11|_{AC1} (x) beta1
/// on systems (A, B, C1, C2).
StateMatrix build_delta(const RankTwoBisepParams& params);

/// (1-f) sum_j p_j |w_j><w_j|_B (x) |phi_j><phi_j| with
/// |phi_j> = cos(xi_j)|00>_{AC1}|x_j> + sin(xi_j)|11>_{AC1}|y_j>.
StateMatrix build_epsilon(const RankTwoBisepParams& params);

/// The separable-branch form: (1-f) sum_k q_k |chi_k><chi_k|_{AC1} (x)
/// |psi_k><psi_k|_{BC2} with |chi_k> = cos(eta_k)|00> + sin(eta_k)|11>.
StateMatrix build_epsilon_pt(const RankTwoBisepParams& params);

/// Residuals (Frobenius) of the three marginal consistency equations linking
/// the canonical A C_1 part to the B C_2 operators:
///   cos2:  (c^2(theta) c^2(mu) + s^2(theta)) beta
///          vs f c^2(nu) beta0 + (1-f) sum p_j c^2(xi_j) |w_j,x_j><w_j,x_j|
///   sin2:  c^2(theta) s^2(mu) beta
///          vs f s^2(nu) beta1 + (1-f) sum p_j s^2(xi_j) |w_j,y_j><w_j,y_j|
///   cross: c^2(theta) c(mu) s(mu) beta
///          vs (1-f) sum p_j c(xi_j) s(xi_j) |w_j,x_j><w_j,y_j|
struct MarginalReport {
  double alpha_residual = 0;  // distance of alpha from the declared canonical form
  double cos2 = 0, sin2 = 0, cross = 0;
};

MarginalReport verify_marginals(const StateMatrix& alpha, const StateMatrix& beta,
                                const RankTwoBisepParams& params);

/// PT-symmetric branch: checks eps^{Gamma_{AC1}} = eps; if so verifies the
/// separable form from pt_terms and the three matching equations tying the
/// epsilon terms to the branch terms, plus the rank bound r >= rank of the
/// B C_2 marginal.
struct PtBranchReport {
  bool applicable = false;    // pt_terms present
  bool pt_symmetric = false;
  double symmetry_residual = 0;
  double form_residual = 0;   // || eps - branch form ||_F
  double weights = 0;         // cos^2 matching equation residual
  double sines = 0;           // sin^2 matching equation residual
  double cross = 0;           // cross matching equation residual
  bool rank_bound_ok = false;
  int r = 0;
  int marginal_rank = 0;
};

PtBranchReport verify_pt_branch(const Mat& eps, const RankTwoBisepParams& params,
                                double tol = 1e-8);

/// Returns m with v = m u within tol * ||v||, from inner-product projection.
std::optional<cplx> proportional_factor(const Vec& u, const Vec& v, double tol);

/// NPT/PPT verdict for a bipartite B C_2 operator. An NPT verdict licenses
/// swapping the operator for a swap-symmetric family member in downstream
/// analysis; the conversion protocol itself is out of scope.
struct WernerReduction {
  bool npt = false;
  double min_pt_eigenvalue = 0;
  std::string note;
};

WernerReduction werner_reduction_check(const StateMatrix& beta, const Tolerances& tol = {});

/// Fixture solver: given theta, mu, f, nu and eps_terms (with y_j = x_j for a
/// Hermitian cross equation), solves the two diagonal marginal equations for
/// beta0/beta1 and returns the implied beta. Throws Validity when a solved
/// operator is not PSD (xi_j outside the feasible window).
StateMatrix solve_marginal_fixture(RankTwoBisepParams& params);

}  // namespace genent

#endif
