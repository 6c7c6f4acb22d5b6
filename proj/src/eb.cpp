#include "genent/eb.hpp"

#include <algorithm>
#include <cmath>

namespace genent {

namespace {

constexpr double kDepTol = 1e-8;  // relative sigma_2 threshold for linear dependence

bool linearly_independent(const Vec& a, const Vec& b) {
  Mat pair(a.size(), 2);
  pair.col(0) = a;
  pair.col(1) = b;
  Eigen::JacobiSVD<Mat> svd(pair);
  return svd.singularValues()(1) > kDepTol * svd.singularValues()(0);
}

Mat matricize(const Vec& v, int da, int db) {
  Mat m(da, db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j) m(i, j) = v(i * db + j);
  return m;
}

double sigma2_ratio(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  double s1 = svd.singularValues()(0);
  if (s1 <= 0) return 0.0;
  return svd.singularValues()(std::min<Eigen::Index>(1, svd.singularValues().size() - 1)) / s1;
}

// Completes {cols} to an invertible square matrix and returns its inverse,
// i.e. a map sending cols[i] -> e_i.
Mat inverse_of_completion(const std::vector<Vec>& cols) {
  int d = static_cast<int>(cols[0].size());
  int r = static_cast<int>(cols.size());
  Mat b(d, d);
  Mat span(d, r);
  for (int i = 0; i < r; ++i) {
    b.col(i) = cols[i];
    span.col(i) = cols[i];
  }
  // orthonormal completion of the span for the remaining columns
  Eigen::JacobiSVD<Mat> svd(span, Eigen::ComputeFullU);
  for (int k = r; k < d; ++k) b.col(k) = svd.matrixU().col(k);
  return b.inverse();
}

void require_bipartite(const StateMatrix& rho) {
  if (rho.structure().num_systems() != 2)
    throw Error(Error::Kind::Arity, "operation requires a bipartite state");
}

}  // namespace

Vec EBBasis::span_vector(int i, int c1_dim) const {
  const Vec& a = a_vectors[i];
  Vec out = Vec::Zero(a.size() * c1_dim);
  for (int k = 0; k < a.size(); ++k) out(k * c1_dim + i) = a(k);
  return out;
}

Mat CoefficientMatrix::reconstruct() const {
  int d = basis.dim_a() * c1_dim;
  Mat span(d, basis.size());
  for (int i = 0; i < basis.size(); ++i) span.col(i) = basis.span_vector(i, c1_dim);
  Mat psi = span * c;  // columns are the decomposition vectors
  return psi * psi.adjoint();
}

CoefficientMatrix verify_eb_membership(const StateMatrix& rho, const EBBasis& basis, double tol) {
  require_bipartite(rho);
  int da = rho.structure().dims[0];
  int dc1 = rho.structure().dims[1];
  if (basis.size() == 0 || basis.dim_a() != da)
    throw Error(Error::Kind::Shape, "basis A-side dimension mismatch");
  if (basis.size() > dc1)
    throw Error(Error::Kind::Shape, "more span vectors than index-basis states");
  for (const auto& a : basis.a_vectors)
    if (a.norm() <= 0) throw Error(Error::Kind::Validity, "zero |a_i> vector in the span");

  int n = basis.size();
  // |a_i, i> are pairwise orthogonal across distinct indices i
  Mat span(da * dc1, n);
  for (int i = 0; i < n; ++i) span.col(i) = basis.span_vector(i, dc1);

  Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix());
  double lmax = es.eigenvalues().maxCoeff();
  if (lmax <= 0) throw Error(Error::Kind::Validity, "zero state");

  std::vector<int> kept;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 1e-12 * lmax) kept.push_back(i);

  int k = static_cast<int>(kept.size());
  Mat c(n, k);
  double worst = 0.0;
  for (int j = 0; j < k; ++j) {
    Vec u = es.eigenvectors().col(kept[j]);
    Vec proj = Vec::Zero(u.size());
    Vec coeff(n);
    for (int i = 0; i < n; ++i) {
      coeff(i) = span.col(i).dot(u) / span.col(i).squaredNorm();
      proj += coeff(i) * span.col(i);
    }
    worst = std::max(worst, (u - proj).norm());
    c.col(j) = std::sqrt(es.eigenvalues()(kept[j])) * coeff;
  }
  if (worst > tol)
    throw Error(Error::Kind::Membership,
                "range not contained in the declared span; residual = " + std::to_string(worst));
  return CoefficientMatrix{std::move(c), basis, dc1};
}

CoefficientMatrix wootters_zero_row(const CoefficientMatrix& C, int row) {
  if (row < 0 || row >= C.c.rows()) throw Error(Error::Kind::Shape, "row out of range");
  Vec r = C.c.row(row).transpose();
  if (r.norm() <= 1e-14 * std::max(1.0, C.c.norm()))
    throw Error(Error::Kind::DegenerateRow, "cannot pivot on an all-zero row");
  // any unitary whose first column is conj(r)/|r| sends the row to (c,0,..,0)
  Mat seed = r.conjugate();
  Eigen::HouseholderQR<Mat> qr(seed);
  Mat u = qr.householderQ();
  CoefficientMatrix out = C;
  out.c = C.c * u;
  return out;
}

namespace {

struct CascadeState {
  Mat c;                    // coefficients, columns >= col still live
  int col = 0;              // first live column
  std::vector<bool> peeled; // rows already reduced to |a_i, i><a_i, i| pieces
};

}  // namespace

ProjectionCascade projection_cascade(const StateMatrix& rho, const EBBasis& basis, double tol) {
  CoefficientMatrix coeffs = verify_eb_membership(rho, basis, tol);
  const auto& s = rho.structure();
  int da = s.dims[0], dc1 = s.dims[1], n = basis.size();

  {
    Mat pt = partial_transpose(rho, {s.labels[1]});
    double scale = std::max(rho.trace(), 1e-300);
    if (min_eigenvalue(pt) > -1e-10 * scale)
      throw Error(Error::Kind::Cascade, "input state is PPT across A:C1; cascade needs an entangled input");
  }

  Mat c = coeffs.c;
  int k = static_cast<int>(c.cols());
  double cscale = c.cwiseAbs().maxCoeff();
  auto nonzero = [&](cplx z) { return std::abs(z) > 1e-9 * cscale; };

  ProjectionCascade out;
  Mat cur = rho.matrix();
  std::vector<bool> peeled(n, false);
  int col = 0;
  std::optional<std::pair<int, int>> surviving;

  auto apply_c1 = [&](const Mat& op) {
    Mat full = Mat::Zero(da * dc1, da * dc1);
    for (int i = 0; i < da; ++i)
      full.block(i * dc1, i * dc1, dc1, dc1) = op;  // identity (x) op in row-major order
    cur = full * cur * full.adjoint();
  };

  while (k - col > 1 && !surviving) {
    // pivot: first unpeeled row with weight in the live columns
    int pivot = -1;
    for (int i = 0; i < n && pivot < 0; ++i) {
      if (peeled[i]) continue;
      if (c.row(i).tail(k - col).norm() > 1e-9 * cscale) pivot = i;
    }
    if (pivot < 0) break;

    // rotate the live columns so the pivot row becomes (gamma, 0, ..., 0)
    {
      Vec r = c.row(pivot).tail(k - col).transpose();
      Eigen::HouseholderQR<Mat> qr(Mat(r.conjugate()));
      Mat u = qr.householderQ();
      c.rightCols(k - col) = c.rightCols(k - col) * u;
    }

    // case a: some other contributor to the first live column has an
    // independent A-side vector -> one projection finishes the job
    int partner = -1;
    for (int i = 0; i < n; ++i) {
      if (i == pivot || peeled[i] || !nonzero(c(i, col))) continue;
      if (linearly_independent(basis.a_vectors[pivot], basis.a_vectors[i])) {
        partner = i;
        break;
      }
    }
    if (partner >= 0) {
      Mat op = Mat::Zero(dc1, dc1);
      op(pivot, pivot) = 1.0;
      op(partner, partner) = 1.0;
      apply_c1(op);
      out.steps.push_back({"P", {pivot, partner}, op});
      surviving = {pivot, partner};
      break;
    }

    // case b: every contributor is A-side proportional to the pivot, so the
    // leading decomposition vector is a product vector |a_pivot> (x) u.
    // Peel it onto |a_pivot, pivot> with a unipotent index-side operator.
    Vec u = Vec::Zero(dc1);
    const Vec& apiv = basis.a_vectors[pivot];
    for (int i = 0; i < n; ++i) {
      if (peeled[i] || !nonzero(c(i, col))) continue;
      cplx t = apiv.dot(basis.a_vectors[i]) / cplx(apiv.squaredNorm());
      u(i) = c(i, col) * t;
    }
    cplx gamma = u(pivot);
    if (!nonzero(gamma))
      throw Error(Error::Kind::Cascade, "degenerate pivot while peeling");
    Vec rvec = u;
    rvec(pivot) = 0.0;
    Mat q = Mat::Identity(dc1, dc1);
    q.col(pivot) -= rvec / gamma;
    apply_c1(q);
    out.steps.push_back({"Q", {pivot}, q});

    // bookkeeping: the leading vector is now gamma |a_pivot, pivot>
    c.col(col).setZero();
    c(pivot, col) = gamma;
    peeled[pivot] = true;
    ++col;
  }

  if (!surviving) {
    // one live column left; project onto two independent contributors
    int m1 = -1, m2 = -1;
    for (int i = 0; i < n && m2 < 0; ++i) {
      if (peeled[i] || !nonzero(c(i, col))) continue;
      if (m1 < 0) {
        m1 = i;
        continue;
      }
      if (linearly_independent(basis.a_vectors[m1], basis.a_vectors[i])) m2 = i;
    }
    if (m1 < 0 || m2 < 0)
      throw Error(Error::Kind::Cascade,
                  "remaining pure component is a product vector; no entangled rank-2 "
                  "projection exists (potential counterexample instance)");
    Mat op = Mat::Zero(dc1, dc1);
    op(m1, m1) = 1.0;
    op(m2, m2) = 1.0;
    apply_c1(op);
    out.steps.push_back({out.steps.empty() ? "P" : "P'", {m1, m2}, op});
    surviving = {m1, m2};
  }

  out.final_state = StateMatrix(s, cur);
  out.final_rank = numerical_rank(out.final_state, 1e-10);
  out.surviving_indices = {surviving->first, surviving->second};
  if (out.final_rank > 2)
    throw Error(Error::Kind::Cascade, "cascade produced a state of rank > 2");

  // the 2-dimensional result must stay entangled: compress to the effective
  // 2 (x) 2 subspace, where PPT is decisive
  {
    int i1 = surviving->first, i2 = surviving->second;
    Mat aspan(da, 2);
    aspan.col(0) = basis.a_vectors[i1].normalized();
    aspan.col(1) = basis.a_vectors[i2];
    aspan.col(1) -= aspan.col(0) * aspan.col(0).dot(aspan.col(1));
    aspan.col(1).normalize();
    Mat iso = Mat::Zero(da * dc1, 4);
    for (int a = 0; a < 2; ++a) {
      int idx[2] = {i1, i2};
      for (int ci = 0; ci < 2; ++ci) {
        Vec col = Vec::Zero(da * dc1);
        for (int r = 0; r < da; ++r) col(r * dc1 + idx[ci]) = aspan(r, a);
        iso.col(a * 2 + ci) = col;
      }
    }
    Mat sigma = iso.adjoint() * cur * iso;
    double tr = sigma.trace().real();
    if (tr <= 0) throw Error(Error::Kind::Cascade, "projection annihilated the state");
    StateMatrix eff(HilbertStructure({2, 2}, {"a", "c"}), sigma / tr);
    if (min_eigenvalue(partial_transpose(eff, {"c"})) > -1e-10)
      throw Error(Error::Kind::Cascade,
                  "projected rank-2 state is separable (potential counterexample instance)");
  }
  return out;
}

StateMatrix reduce_to_canonical_pair(const StateMatrix& rho, const EBBasis& basis, double tol) {
  ProjectionCascade cas = projection_cascade(rho, basis, tol);
  const auto& s = rho.structure();
  int da = s.dims[0], dc1 = s.dims[1];
  int m1 = cas.surviving_indices[0], m2 = cas.surviving_indices[1];

  // index-side relabeling m1 -> 0, m2 -> 1 as a permutation unitary
  std::vector<int> dest(dc1, -1);
  dest[m1] = 0;
  dest[m2] = 1;
  int next = 2;
  for (int i = 0; i < dc1; ++i)
    if (dest[i] < 0) dest[i] = next++;
  Mat qp = Mat::Zero(dc1, dc1);
  for (int i = 0; i < dc1; ++i) qp(dest[i], i) = 1.0;

  Mat full = Mat::Zero(da * dc1, da * dc1);
  for (int i = 0; i < da; ++i) full.block(i * dc1, i * dc1, dc1, dc1) = qp;
  Mat m = full * cas.final_state.matrix() * full.adjoint();

  // compress: A side onto the span of the two surviving |a_i>, index side
  // onto {|0>, |1>}; both are isometries on the support, so the spectrum is
  // preserved
  Mat aspan(da, 2);
  aspan.col(0) = basis.a_vectors[m1].normalized();
  aspan.col(1) = basis.a_vectors[m2];
  aspan.col(1) -= aspan.col(0) * aspan.col(0).dot(aspan.col(1));
  aspan.col(1).normalize();
  Mat iso = Mat::Zero(da * dc1, 4);
  for (int a = 0; a < 2; ++a)
    for (int ci = 0; ci < 2; ++ci) {
      Vec col = Vec::Zero(da * dc1);
      for (int r = 0; r < da; ++r) col(r * dc1 + ci) = aspan(r, a);
      iso.col(a * 2 + ci) = col;
    }
  Mat sigma = iso.adjoint() * m * iso;
  return StateMatrix(HilbertStructure({2, 2}, {s.labels[0], s.labels[1]}), sigma);
}

PencilSolutions product_vectors_in_pencil(const PureVector& v, const PureVector& w) {
  if (!(v.structure == w.structure))
    throw Error(Error::Kind::Shape, "pencil vectors live on different structures");
  if (v.structure.num_systems() != 2)
    throw Error(Error::Kind::Arity, "pencil requires a bipartite structure");
  if (!linearly_independent(v.vector, w.vector))
    throw Error(Error::Kind::Validity, "pencil vectors must be linearly independent");

  int da = v.structure.dims[0], db = v.structure.dims[1];
  Mat vm = matricize(v.vector, da, db);
  Mat wm = matricize(w.vector, da, db);

  PencilSolutions out;
  auto canonicalize = [](cplx a, cplx b) {
    double norm = std::sqrt(std::norm(a) + std::norm(b));
    a /= norm;
    b /= norm;
    cplx lead = std::abs(a) >= std::abs(b) ? a : b;
    cplx phase = lead / std::abs(lead);
    return std::make_pair(a / phase, b / phase);
  };
  auto push_unique = [&](cplx a, cplx b) {
    auto [ca, cb] = canonicalize(a, b);
    for (const auto& [ea, eb] : out.ratios)
      if (std::abs(ca * std::conj(ea) + cb * std::conj(eb)) > 1.0 - 1e-7) return;
    out.ratios.emplace_back(ca, cb);
  };

  if (da == 2 && db == 2) {
    cplx detv = vm.determinant(), detw = wm.determinant();
    cplx mix = (vm + wm).determinant() - detv - detw;
    double scale = std::max({std::abs(detv), std::abs(detw), std::abs(mix), 1e-300});
    double eps = 1e-12 * std::max(1.0, scale);
    if (std::abs(detv) < eps && std::abs(detw) < eps && std::abs(mix) < eps) {
      out.infinite_family = true;
      return out;
    }
    // det(a V + b W) = a^2 detv + a b mix + b^2 detw
    if (std::abs(detv) < eps) {
      push_unique(1.0, 0.0);
      if (std::abs(mix) > eps) push_unique(-detw / mix, 1.0);
    } else {
      cplx disc = std::sqrt(mix * mix - 4.0 * detv * detw);
      push_unique((-mix + disc) / (2.0 * detv), 1.0);
      push_unique((-mix - disc) / (2.0 * detv), 1.0);
    }
    return out;
  }

  // general case: scan CP^1 with (a, b) = (cos t, sin t e^{i phi}) and refine
  auto sigma2_at = [&](double t, double phi) {
    cplx a = std::cos(t);
    cplx b = std::sin(t) * std::exp(cplx(0.0, phi));
    return sigma2_ratio(a * vm + b * wm);
  };
  const int nt = 180, nphi = 48;
  int below = 0;
  std::vector<std::pair<double, double>> seeds;
  for (int it = 0; it <= nt; ++it) {
    double t = (M_PI / 2.0) * it / nt;
    for (int ip = 0; ip < nphi; ++ip) {
      double phi = 2.0 * M_PI * ip / nphi;
      double s2 = sigma2_at(t, phi);
      if (s2 < 1e-8) ++below;
      if (s2 < 1e-3) seeds.emplace_back(t, phi);
      if (ip == 0 && (it == 0 || it == nt)) break;  // poles need one phi only
    }
  }
  if (below > (nt * nphi) / 4) {
    out.infinite_family = true;
    return out;
  }
  auto golden = [&](double lo, double hi, auto f) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    for (int i = 0; i < 60; ++i) {
      if (f(c) < f(d))
        hi = d, d = c, c = hi - g * (hi - lo);
      else
        lo = c, c = d, d = lo + g * (hi - lo);
    }
    return (lo + hi) / 2.0;
  };
  for (auto [t0, p0] : seeds) {
    double t = t0, phi = p0;
    for (int round = 0; round < 4; ++round) {
      double span_t = (M_PI / 2.0) / nt * std::pow(0.2, round);
      double span_p = (2.0 * M_PI) / nphi * std::pow(0.2, round);
      t = golden(t - span_t, t + span_t, [&](double x) { return sigma2_at(x, phi); });
      phi = golden(phi - span_p, phi + span_p, [&](double x) { return sigma2_at(t, x); });
    }
    if (sigma2_at(t, phi) < 1e-8)
      push_unique(std::cos(t), std::sin(t) * std::exp(cplx(0.0, phi)));
  }
  return out;
}

StateMatrix canonical_rank2_state(double theta, double mu) {
  Vec u = Vec::Zero(4);
  u(0) = std::cos(mu);
  u(3) = std::sin(mu);
  Mat m = std::pow(std::cos(theta), 2) * (u * u.adjoint());
  m(0, 0) += std::pow(std::sin(theta), 2);
  return StateMatrix(HilbertStructure({2, 2}, {"A", "C1"}), m, true);
}

NormalFormResult normal_form_rank2(const StateMatrix& alpha, double tol) {
  require_bipartite(alpha);
  int da = alpha.structure().dims[0], db = alpha.structure().dims[1];
  int rank = numerical_rank(alpha, 1e-10);
  if (rank > 2) throw Error(Error::Kind::Validity, "normal form requires rank <= 2");
  if (rank == 0) throw Error(Error::Kind::Validity, "zero state");

  Vec p1, p2;  // unit product vectors spanning the range (A and B factors below)
  bool pure = (rank == 1);
  Vec a1, a2, b1, b2;

  if (pure) {
    // Schmidt form; the two corners are the Schmidt basis pairs
    auto rb = range_basis(alpha, 1e-10);
    Mat m = matricize(rb[0].vector, da, db);
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    double s1 = svd.singularValues()(0);
    double s2 = svd.singularValues().size() > 1 ? svd.singularValues()(1) : 0.0;
    if (s2 < 1e-10 * s1) throw Error(Error::Kind::Degeneracy, "pure input is a product vector");
    a1 = svd.matrixU().col(0);
    a2 = svd.matrixU().col(1);
    b1 = svd.matrixV().col(0).conjugate();
    b2 = svd.matrixV().col(1).conjugate();
  } else {
    auto rb = range_basis(alpha, 1e-10);
    PencilSolutions sols = product_vectors_in_pencil(rb[0], rb[1]);
    if (sols.infinite_family)
      throw Error(Error::Kind::Degeneracy, "every range vector is a product vector (common local factor)");
    if (sols.ratios.size() != 2)
      throw Error(Error::Kind::NormalForm, "range is not spanned by two product vectors");
    std::vector<Vec> avs, bvs;
    for (const auto& [a, b] : sols.ratios) {
      Vec prod = a * rb[0].vector + b * rb[1].vector;
      Mat m = matricize(prod, da, db);
      Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
      avs.push_back(svd.matrixU().col(0));
      bvs.push_back(svd.matrixV().col(0).conjugate());
    }
    a1 = avs[0];
    a2 = avs[1];
    b1 = bvs[0];
    b2 = bvs[1];
    if (!linearly_independent(a1, a2) || !linearly_independent(b1, b2))
      throw Error(Error::Kind::Degeneracy, "product vectors share a local factor; state is separable");
  }

  Mat xa = inverse_of_completion({a1, a2});
  Mat yb = inverse_of_completion({b1, b2});

  auto compressed = [&](const Mat& xam, const Mat& ybm) {
    Mat f = Mat::Zero(da * db, da * db);
    for (int i = 0; i < da; ++i)
      for (int j = 0; j < da; ++j) f.block(i * db, j * db, db, db) = xam(i, j) * ybm;
    Mat sig = f * alpha.matrix() * f.adjoint();
    Mat m(2, 2);
    int i00 = 0, i11 = db + 1;
    m << sig(i00, i00), sig(i00, i11), sig(i11, i00), sig(i11, i11);
    return m;
  };

  Mat m = compressed(xa, yb);
  double trm = m.trace().real();
  if (trm <= 0) throw Error(Error::Kind::NormalForm, "degenerate transformed state");
  m /= trm;

  NormalFormResult res;
  res.pure_limit = pure;

  if (!pure) {
    // corner gauge: of the two assignments pick the larger separable weight
    double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
    double lam0 = det / m(1, 1).real();
    double lam1 = det / m(0, 0).real();
    if (lam1 > lam0) {
      Mat swap_a = Mat::Identity(da, da);
      swap_a(0, 0) = swap_a(1, 1) = 0.0;
      swap_a(0, 1) = swap_a(1, 0) = 1.0;
      Mat swap_b = Mat::Identity(db, db);
      swap_b(0, 0) = swap_b(1, 1) = 0.0;
      swap_b(0, 1) = swap_b(1, 0) = 1.0;
      xa = swap_a * xa;
      yb = swap_b * yb;
      m = compressed(xa, yb);
      m /= m.trace().real();
    }
  }

  // absorb the relative phase so the (00,11) element is real positive
  if (std::abs(m(0, 1)) > 0) {
    cplx ph = m(0, 1) / std::abs(m(0, 1));
    Mat d = Mat::Identity(db, db);
    d(1, 1) = ph;
    yb = d * yb;
    m(0, 1) = std::abs(m(0, 1));
    m(1, 0) = m(0, 1);
  }

  if (std::abs(m(0, 1)) < tol * m.trace().real())
    throw Error(Error::Kind::Degeneracy, "no coherence between the corners; state is separable");

  double lam, cos2theta;
  if (pure) {
    lam = 0.0;
    cos2theta = 1.0;
  } else {
    double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
    lam = det / m(1, 1).real();  // separable weight sin^2(theta)
    cos2theta = 1.0 - lam;
  }
  double r00 = m(0, 0).real() - lam;
  double r11 = m(1, 1).real();
  res.theta = std::atan2(std::sqrt(std::max(lam, 0.0)), std::sqrt(std::max(cos2theta, 0.0)));
  res.mu = std::atan2(std::sqrt(std::max(r11, 0.0)), std::sqrt(std::max(r00, 0.0)));

  // trace normalization folded into the A-side factor
  xa /= std::sqrt(trm);

  HilbertStructure s = alpha.structure();
  res.x = LocalOperator(s, {xa, Mat::Identity(db, db)});
  res.y = LocalOperator(s, {Mat::Identity(da, da), yb});
  return res;
}

}  // namespace genent
