#include "genent/forms.hpp"

#include <cmath>

namespace genent {

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kAngleTol = 1e-12;

Mat proj(const Vec& v) { return v * v.adjoint(); }

/// |w, x> on the flat B C_2 space.
Vec joint(const Vec& w, const Vec& x) {
  Vec out(w.size() * x.size());
  for (int b = 0; b < w.size(); ++b)
    for (int c = 0; c < x.size(); ++c) out(b * x.size() + c) = w(b) * x(c);
  return out;
}

/// Partial transpose of the A and C1 systems on dims [2, db, 2, dc2].
Mat pt_ac1(const Mat& m, int db, int dc2) {
  int total = 4 * db * dc2;
  Mat out(total, total);
  auto idx = [&](int a, int b, int c1, int c2) { return ((a * db + b) * 2 + c1) * dc2 + c2; };
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < db; ++b)
      for (int c1 = 0; c1 < 2; ++c1)
        for (int c2 = 0; c2 < dc2; ++c2)
          for (int a2 = 0; a2 < 2; ++a2)
            for (int b2 = 0; b2 < db; ++b2)
              for (int d1 = 0; d1 < 2; ++d1)
                for (int d2 = 0; d2 < dc2; ++d2)
                  out(idx(a2, b, d1, c2), idx(a, b2, c1, d2)) =
                      m(idx(a, b, c1, c2), idx(a2, b2, d1, d2));
  return out;
}

}  // namespace

int RankTwoBisepParams::dim_b() const {
  if (!eps_terms.empty()) return static_cast<int>(eps_terms[0].w.size());
  if (beta0) return beta0->structure().dims[0];
  throw Error(Error::Kind::Validity, "cannot infer the B dimension from empty parameters");
}

int RankTwoBisepParams::dim_c2() const {
  if (!eps_terms.empty()) return static_cast<int>(eps_terms[0].x.size());
  if (beta0) return beta0->structure().dims[1];
  throw Error(Error::Kind::Validity, "cannot infer the C2 dimension from empty parameters");
}

void RankTwoBisepParams::validate() const {
  auto in_open = [](double v, double lo, double hi) {
    return v > lo + kAngleTol && v < hi - kAngleTol;
  };
  if (!in_open(theta, 0, M_PI / 2) || !in_open(mu, 0, M_PI / 2))
    throw Error(Error::Kind::Validity, "theta and mu must lie strictly inside (0, pi/2)");
  if (!(f > 0 && f < 1)) throw Error(Error::Kind::Validity, "f must lie in (0, 1)");
  if (nu < -kAngleTol || nu > M_PI / 2 + kAngleTol)
    throw Error(Error::Kind::Validity, "nu must lie in [0, pi/2]");
  if (!eps_terms.empty()) {
    double sum = 0;
    for (const auto& t : eps_terms) {
      if (t.p <= 0) throw Error(Error::Kind::Validity, "epsilon weights must be positive");
      if (!in_open(t.xi, 0, M_PI / 2))
        throw Error(Error::Kind::Endpoint,
                    "xi at an interval end; such terms belong to the delta part");
      sum += t.p;
    }
    if (std::abs(sum - 1.0) > kWeightTol)
      throw Error(Error::Kind::Validity, "epsilon weights must sum to 1");
  }
  if (!pt_terms.empty()) {
    double sum = 0;
    for (const auto& t : pt_terms) {
      if (t.q <= 0) throw Error(Error::Kind::Validity, "branch weights must be positive");
      if (std::abs(t.eta) < kAngleTol || std::abs(std::abs(t.eta) - M_PI / 2) < kAngleTol ||
          std::abs(t.eta) > M_PI / 2)
        throw Error(Error::Kind::Endpoint,
                    "eta at an excluded point; such terms belong to the delta part");
      sum += t.q;
    }
    if (std::abs(sum - 1.0) > kWeightTol)
      throw Error(Error::Kind::Validity, "branch weights must sum to 1");
  }
}

HilbertStructure bisep_structure(int dim_b, int dim_c2) {
  return HilbertStructure({2, dim_b, 2, dim_c2}, {"A", "B", "C1", "C2"});
}

StateMatrix build_delta(const RankTwoBisepParams& params) {
  params.validate();
  if (!params.beta0 || !params.beta1)
    throw Error(Error::Kind::Validity, "delta needs both beta0 and beta1");
  int db = params.beta0->structure().dims[0];
  int dc2 = params.beta0->structure().dims[1];
  if (params.beta1->structure().dims != std::vector<int>{db, dc2})
    throw Error(Error::Kind::Shape, "beta0 and beta1 must share dimensions");

  double c2 = std::pow(std::cos(params.nu), 2), s2 = std::pow(std::sin(params.nu), 2);
  HilbertStructure s = bisep_structure(db, dc2);
  int total = s.total_dim();
  Mat out = Mat::Zero(total, total);
  auto idx = [&](int a, int b, int c1, int c2i) { return ((a * db + b) * 2 + c1) * dc2 + c2i; };
  for (int b = 0; b < db; ++b)
    for (int c = 0; c < dc2; ++c)
      for (int b2 = 0; b2 < db; ++b2)
        for (int c2i = 0; c2i < dc2; ++c2i) {
          cplx v0 = params.beta0->matrix()(b * dc2 + c, b2 * dc2 + c2i);
          cplx v1 = params.beta1->matrix()(b * dc2 + c, b2 * dc2 + c2i);
          out(idx(0, b, 0, c), idx(0, b2, 0, c2i)) += params.f * c2 * v0;
          out(idx(1, b, 1, c), idx(1, b2, 1, c2i)) += params.f * s2 * v1;
        }
  return StateMatrix(s, std::move(out));
}

StateMatrix build_epsilon(const RankTwoBisepParams& params) {
  params.validate();
  if (params.eps_terms.empty())
    throw Error(Error::Kind::Validity, "epsilon needs at least one term");
  int db = params.dim_b(), dc2 = params.dim_c2();
  HilbertStructure s = bisep_structure(db, dc2);
  int total = s.total_dim();
  Mat out = Mat::Zero(total, total);
  auto idx = [&](int a, int b, int c1, int c2i) { return ((a * db + b) * 2 + c1) * dc2 + c2i; };
  for (const auto& t : params.eps_terms) {
    if (t.w.size() != db || t.x.size() != dc2 || t.y.size() != dc2)
      throw Error(Error::Kind::Shape, "epsilon term vector dimensions disagree");
    Vec phi = Vec::Zero(total);
    for (int b = 0; b < db; ++b)
      for (int c = 0; c < dc2; ++c) {
        phi(idx(0, b, 0, c)) = std::cos(t.xi) * t.w(b) * t.x(c);
        phi(idx(1, b, 1, c)) = std::sin(t.xi) * t.w(b) * t.y(c);
      }
    out += (1.0 - params.f) * t.p * proj(phi);
  }
  return StateMatrix(s, std::move(out));
}

StateMatrix build_epsilon_pt(const RankTwoBisepParams& params) {
  params.validate();
  if (params.pt_terms.empty())
    throw Error(Error::Kind::Validity, "branch form needs at least one term");
  int dbc = static_cast<int>(params.pt_terms[0].psi.size());
  // psi lives on the joint B C_2 space; recover the split from eps_terms when
  // present, else require a declared square split via beta0
  int db, dc2;
  if (!params.eps_terms.empty() || params.beta0) {
    db = params.dim_b();
    dc2 = params.dim_c2();
  } else {
    throw Error(Error::Kind::Validity, "cannot infer the B:C2 split for branch terms");
  }
  if (db * dc2 != dbc)
    throw Error(Error::Kind::Shape, "branch vector length disagrees with the B:C2 split");
  HilbertStructure s = bisep_structure(db, dc2);
  int total = s.total_dim();
  Mat out = Mat::Zero(total, total);
  auto idx = [&](int a, int b, int c1, int c2i) { return ((a * db + b) * 2 + c1) * dc2 + c2i; };
  for (const auto& t : params.pt_terms) {
    Vec chi_psi = Vec::Zero(total);
    for (int b = 0; b < db; ++b)
      for (int c = 0; c < dc2; ++c) {
        chi_psi(idx(0, b, 0, c)) = std::cos(t.eta) * t.psi(b * dc2 + c);
        chi_psi(idx(1, b, 1, c)) = std::sin(t.eta) * t.psi(b * dc2 + c);
      }
    out += (1.0 - params.f) * t.q * proj(chi_psi);
  }
  return StateMatrix(s, std::move(out));
}

MarginalReport verify_marginals(const StateMatrix& alpha, const StateMatrix& beta,
                                const RankTwoBisepParams& params) {
  params.validate();
  MarginalReport rep;
  rep.alpha_residual =
      (alpha.matrix() - canonical_rank2_state(params.theta, params.mu).matrix()).norm();

  double ct2 = std::pow(std::cos(params.theta), 2), st2 = std::pow(std::sin(params.theta), 2);
  double cm = std::cos(params.mu), sm = std::sin(params.mu);
  double cn2 = std::pow(std::cos(params.nu), 2), sn2 = std::pow(std::sin(params.nu), 2);

  int dbc = params.dim_b() * params.dim_c2();
  if (beta.matrix().rows() != dbc)
    throw Error(Error::Kind::Shape, "beta dimension disagrees with the term vectors");

  Mat rhs9 = Mat::Zero(dbc, dbc), rhs10 = Mat::Zero(dbc, dbc), rhs11 = Mat::Zero(dbc, dbc);
  if (params.beta0) rhs9 += params.f * cn2 * params.beta0->matrix();
  if (params.beta1) rhs10 += params.f * sn2 * params.beta1->matrix();
  for (const auto& t : params.eps_terms) {
    Vec wx = joint(t.w, t.x), wy = joint(t.w, t.y);
    double c = std::cos(t.xi), s = std::sin(t.xi);
    rhs9 += (1.0 - params.f) * t.p * c * c * proj(wx);
    rhs10 += (1.0 - params.f) * t.p * s * s * proj(wy);
    rhs11 += (1.0 - params.f) * t.p * c * s * (wx * wy.adjoint());
  }
  rep.cos2 = ((ct2 * cm * cm + st2) * beta.matrix() - rhs9).norm();
  rep.sin2 = (ct2 * sm * sm * beta.matrix() - rhs10).norm();
  rep.cross = (ct2 * cm * sm * beta.matrix() - rhs11).norm();
  return rep;
}

PtBranchReport verify_pt_branch(const Mat& eps, const RankTwoBisepParams& params, double tol) {
  params.validate();
  int db = params.dim_b(), dc2 = params.dim_c2();
  if (eps.rows() != 4 * db * dc2)
    throw Error(Error::Kind::Shape, "epsilon dimension disagrees with the parameters");

  PtBranchReport rep;
  double scale = std::max(eps.norm(), 1e-300);
  rep.symmetry_residual = (pt_ac1(eps, db, dc2) - eps).norm() / scale;
  rep.pt_symmetric = rep.symmetry_residual < tol;
  if (!rep.pt_symmetric || params.pt_terms.empty()) {
    rep.applicable = false;
    return rep;
  }
  rep.applicable = true;
  rep.form_residual = (eps - build_epsilon_pt(params).matrix()).norm();

  int dbc = db * dc2;
  Mat l13 = Mat::Zero(dbc, dbc), l14 = Mat::Zero(dbc, dbc), l15 = Mat::Zero(dbc, dbc);
  for (const auto& t : params.eps_terms) {
    Vec wx = joint(t.w, t.x), wy = joint(t.w, t.y);
    double c = std::cos(t.xi), s = std::sin(t.xi);
    l13 += t.p * c * c * proj(wx);
    l14 += t.p * s * s * proj(wy);
    l15 += t.p * c * s * (wx * wy.adjoint());
  }
  Mat r13 = Mat::Zero(dbc, dbc), r14 = Mat::Zero(dbc, dbc), r15 = Mat::Zero(dbc, dbc);
  for (const auto& t : params.pt_terms) {
    Mat pk = proj(t.psi);
    double c = std::cos(t.eta), s = std::sin(t.eta);
    r13 += t.q * c * c * pk;
    r14 += t.q * s * s * pk;
    r15 += t.q * c * s * pk;
  }
  rep.weights = (l13 - r13).norm();
  rep.sines = (l14 - r14).norm();
  rep.cross = (l15 - r15).norm();

  // rank bound: the branch needs at least as many terms as the rank of the
  // B C_2 marginal it has to span
  Mat marginal = Mat::Zero(dbc, dbc);
  auto idx = [&](int a, int b, int c1, int c2i) { return ((a * db + b) * 2 + c1) * dc2 + c2i; };
  for (int a = 0; a < 2; ++a)
    for (int c1 = 0; c1 < 2; ++c1)
      for (int b = 0; b < db; ++b)
        for (int c = 0; c < dc2; ++c)
          for (int b2 = 0; b2 < db; ++b2)
            for (int c2i = 0; c2i < dc2; ++c2i)
              marginal(b * dc2 + c, b2 * dc2 + c2i) +=
                  eps(idx(a, b, c1, c), idx(a, b2, c1, c2i));
  StateMatrix msm(HilbertStructure({db, dc2}, {"B", "C2"}), marginal);
  rep.marginal_rank = numerical_rank(msm, 1e-10);
  rep.r = static_cast<int>(params.pt_terms.size());
  rep.rank_bound_ok = rep.r >= rep.marginal_rank;
  return rep;
}

std::optional<cplx> proportional_factor(const Vec& u, const Vec& v, double tol) {
  if (u.norm() <= 0 || v.norm() <= 0)
    throw Error(Error::Kind::Validity, "proportionality check needs nonzero vectors");
  cplx m = u.dot(v) / cplx(u.squaredNorm());
  if ((v - m * u).norm() < tol * v.norm()) return m;
  return std::nullopt;
}

WernerReduction werner_reduction_check(const StateMatrix& beta, const Tolerances& tol) {
  if (beta.structure().num_systems() != 2)
    throw Error(Error::Kind::Arity, "verdict requires a bipartite operator");
  Mat pt = partial_transpose(beta, {beta.structure().labels[1]});
  WernerReduction out;
  out.min_pt_eigenvalue = min_eigenvalue(pt);
  double scale = std::max(beta.trace(), 1e-300);
  out.npt = out.min_pt_eigenvalue < -tol.psd * scale;
  out.note = out.npt
                 ? "NPT: may be replaced by a swap-symmetric family member in downstream "
                   "analysis (conversion protocol out of scope)"
                 : "PPT: no reduction applies";
  return out;
}

StateMatrix solve_marginal_fixture(RankTwoBisepParams& params) {
  params.validate();
  if (params.eps_terms.empty())
    throw Error(Error::Kind::Validity, "fixture solver needs epsilon terms");
  for (const auto& t : params.eps_terms)
    if ((t.x - t.y).norm() > 1e-14 * t.x.norm())
      throw Error(Error::Kind::Validity, "fixture solver assumes y_j = x_j");
  double ct2 = std::pow(std::cos(params.theta), 2), st2 = std::pow(std::sin(params.theta), 2);
  double cm = std::cos(params.mu), sm = std::sin(params.mu);
  double cn2 = std::pow(std::cos(params.nu), 2), sn2 = std::pow(std::sin(params.nu), 2);
  if (cn2 < 1e-12 || sn2 < 1e-12)
    throw Error(Error::Kind::Validity, "fixture solver needs nu strictly inside (0, pi/2)");

  int dbc = params.dim_b() * params.dim_c2();
  Mat beta = Mat::Zero(dbc, dbc), b0 = Mat::Zero(dbc, dbc), b1 = Mat::Zero(dbc, dbc);
  for (const auto& t : params.eps_terms) {
    Vec wx = joint(t.w, t.x);
    if (std::abs(wx.norm() - 1.0) > 1e-12)
      throw Error(Error::Kind::Validity, "fixture term vectors must be unit");
    double c = std::cos(t.xi), s = std::sin(t.xi);
    double w = (1.0 - params.f) * t.p;
    // the cross equation defines beta
    double beta_coeff = w * c * s / (ct2 * cm * sm);
    beta += beta_coeff * proj(wx);
    // the diagonal equations then determine beta0 and beta1
    double c0 = ((ct2 * cm * cm + st2) * beta_coeff - w * c * c) / (params.f * cn2);
    double c1 = (ct2 * sm * sm * beta_coeff - w * s * s) / (params.f * sn2);
    if (c0 < -1e-12 || c1 < -1e-12)
      throw Error(Error::Kind::Validity,
                  "solved beta0/beta1 not PSD: xi outside the feasible window for (theta, mu)");
    b0 += std::max(c0, 0.0) * proj(wx);
    b1 += std::max(c1, 0.0) * proj(wx);
  }
  HilbertStructure s(
      {params.dim_b(), params.dim_c2()}, {"B", "C2"});
  params.beta0 = StateMatrix(s, b0);
  params.beta1 = StateMatrix(s, b1);
  return StateMatrix(s, beta);
}

}  // namespace genent
