#include "genent/hilbert.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace genent {

namespace {

// Flat index -> multi-index digits for the given dims (row-major, system 0
// most significant).
void unflatten(int flat, const std::vector<int>& dims, std::vector<int>& out) {
  out.resize(dims.size());
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    out[k] = flat % dims[k];
    flat /= dims[k];
  }
}

int flatten(const std::vector<int>& digits, const std::vector<int>& dims) {
  int flat = 0;
  for (size_t k = 0; k < dims.size(); ++k) flat = flat * dims[k] + digits[k];
  return flat;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::string join_labels(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += '*';
    out += parts[i];
  }
  return out;
}

}  // namespace

HilbertStructure::HilbertStructure(std::vector<int> d, std::vector<std::string> l)
    : dims(std::move(d)), labels(std::move(l)) {
  if (dims.empty()) throw Error(Error::Kind::Shape, "structure needs at least one system");
  if (dims.size() != labels.size())
    throw Error(Error::Kind::Shape, "dims/labels length mismatch");
  for (int dim : dims)
    if (dim < 1) throw Error(Error::Kind::Shape, "subsystem dimension must be >= 1");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size())
    throw Error(Error::Kind::Label, "duplicate system labels");
}

int HilbertStructure::total_dim() const {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
}

bool HilbertStructure::has_label(const std::string& label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

int HilbertStructure::index_of(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw Error(Error::Kind::Label, "unknown system label: " + label);
  return static_cast<int>(it - labels.begin());
}

void check_hermitian(const Mat& m, double rel_tol) {
  double scale = std::max(m.norm(), 1e-300);
  if ((m - m.adjoint()).norm() > rel_tol * scale)
    throw Error(Error::Kind::Integrity, "matrix is not Hermitian within tolerance");
}

StateMatrix::StateMatrix(HilbertStructure structure, Mat matrix, bool normalized,
                         const Tolerances& tol)
    : structure_(std::move(structure)), matrix_(std::move(matrix)), normalized_(normalized) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != structure_.total_dim())
    throw Error(Error::Kind::Shape, "state matrix side does not match the structure");
  check_hermitian(matrix_, tol.herm);
  matrix_ = (matrix_ + matrix_.adjoint()) / 2.0;  // symmetrize roundoff
  Eigen::SelfAdjointEigenSolver<Mat> es(matrix_, Eigen::EigenvaluesOnly);
  double lmax = std::max(es.eigenvalues().maxCoeff(), 0.0);
  if (es.eigenvalues().minCoeff() < -tol.psd * std::max(lmax, 1e-300) - 1e-300)
    throw Error(Error::Kind::Integrity, "state matrix is not PSD within tolerance");
  if (normalized_ && std::abs(trace() - 1.0) > tol.trace)
    throw Error(Error::Kind::Integrity, "normalized flag set but trace differs from 1");
}

StateMatrix StateMatrix::normalize() const {
  double tr = trace();
  if (tr <= 0) throw Error(Error::Kind::Integrity, "cannot normalize a traceless state");
  return StateMatrix(structure_, matrix_ / tr, true);
}

PureVector::PureVector(HilbertStructure s, Vec v) : structure(std::move(s)), vector(std::move(v)) {
  if (vector.size() != structure.total_dim())
    throw Error(Error::Kind::Shape, "vector length does not match the structure");
  if (vector.norm() <= 0) throw Error(Error::Kind::Shape, "zero vector");
  unit = std::abs(vector.norm() - 1.0) < 1e-12;
}

PureVector PureVector::normalize() const {
  PureVector out = *this;
  out.vector /= vector.norm();
  out.unit = true;
  return out;
}

StateMatrix PureVector::projector() const {
  return StateMatrix(structure, vector * vector.adjoint(), false);
}

LocalOperator::LocalOperator(HilbertStructure s, std::vector<Mat> f)
    : structure(std::move(s)), factors(std::move(f)) {
  if (factors.size() != structure.dims.size())
    throw Error(Error::Kind::Shape, "one factor per subsystem required");
  for (size_t i = 0; i < factors.size(); ++i)
    if (factors[i].cols() != structure.dims[i])
      throw Error(Error::Kind::Shape, "factor column count must equal the subsystem dimension");
}

Mat LocalOperator::full() const {
  Mat out = factors[0];
  for (size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

LocalOperator LocalOperator::identity(const HilbertStructure& s) {
  std::vector<Mat> f;
  f.reserve(s.dims.size());
  for (int d : s.dims) f.push_back(Mat::Identity(d, d));
  return LocalOperator(s, std::move(f));
}

StateMatrix tensor_product(const StateMatrix& rho, const StateMatrix& sigma) {
  for (const auto& l : sigma.structure().labels)
    if (rho.structure().has_label(l))
      throw Error(Error::Kind::Label, "label collision in tensor product: " + l);
  std::vector<int> dims = rho.structure().dims;
  dims.insert(dims.end(), sigma.structure().dims.begin(), sigma.structure().dims.end());
  std::vector<std::string> labels = rho.structure().labels;
  labels.insert(labels.end(), sigma.structure().labels.begin(), sigma.structure().labels.end());
  return StateMatrix(HilbertStructure(std::move(dims), std::move(labels)),
                     kron(rho.matrix(), sigma.matrix()),
                     rho.normalized() && sigma.normalized());
}

namespace {

std::vector<int> permuted_index_map(const HilbertStructure& s, const std::vector<int>& perm) {
  int n = s.num_systems();
  if (static_cast<int>(perm.size()) != n)
    throw Error(Error::Kind::Shape, "permutation length mismatch");
  std::vector<int> check(perm);
  std::sort(check.begin(), check.end());
  for (int k = 0; k < n; ++k)
    if (check[k] != k) throw Error(Error::Kind::Shape, "invalid system permutation");

  std::vector<int> new_dims(n);
  for (int k = 0; k < n; ++k) new_dims[k] = s.dims[perm[k]];
  int total = s.total_dim();
  std::vector<int> map(total);
  std::vector<int> digits, new_digits(n);
  for (int flat = 0; flat < total; ++flat) {
    unflatten(flat, s.dims, digits);
    for (int k = 0; k < n; ++k) new_digits[k] = digits[perm[k]];
    map[flat] = flatten(new_digits, new_dims);
  }
  return map;
}

}  // namespace

StateMatrix permute_systems(const StateMatrix& rho, const std::vector<int>& perm) {
  const auto& s = rho.structure();
  auto map = permuted_index_map(s, perm);
  int n = s.num_systems();
  std::vector<int> dims(n);
  std::vector<std::string> labels(n);
  for (int k = 0; k < n; ++k) {
    dims[k] = s.dims[perm[k]];
    labels[k] = s.labels[perm[k]];
  }
  int total = s.total_dim();
  Mat out(total, total);
  for (int r = 0; r < total; ++r)
    for (int c = 0; c < total; ++c) out(map[r], map[c]) = rho.matrix()(r, c);
  return StateMatrix(HilbertStructure(std::move(dims), std::move(labels)), std::move(out),
                     rho.normalized());
}

PureVector permute_systems(const PureVector& v, const std::vector<int>& perm) {
  auto map = permuted_index_map(v.structure, perm);
  int n = v.structure.num_systems();
  std::vector<int> dims(n);
  std::vector<std::string> labels(n);
  for (int k = 0; k < n; ++k) {
    dims[k] = v.structure.dims[perm[k]];
    labels[k] = v.structure.labels[perm[k]];
  }
  Vec out(v.vector.size());
  for (int r = 0; r < v.vector.size(); ++r) out(map[r]) = v.vector(r);
  return PureVector(HilbertStructure(std::move(dims), std::move(labels)), std::move(out));
}

Mat permutation_matrix(const HilbertStructure& s, const std::vector<int>& perm) {
  auto map = permuted_index_map(s, perm);
  int total = s.total_dim();
  Mat pi = Mat::Zero(total, total);
  for (int r = 0; r < total; ++r) pi(map[r], r) = 1.0;
  return pi;
}

StateMatrix merge_adjacent(const StateMatrix& rho, int start, int count) {
  const auto& s = rho.structure();
  if (start < 0 || count < 1 || start + count > s.num_systems())
    throw Error(Error::Kind::Shape, "merge range out of bounds");
  std::vector<int> dims;
  std::vector<std::string> labels;
  for (int k = 0; k < start; ++k) {
    dims.push_back(s.dims[k]);
    labels.push_back(s.labels[k]);
  }
  int fused = 1;
  std::vector<std::string> parts;
  for (int k = start; k < start + count; ++k) {
    fused *= s.dims[k];
    parts.push_back(s.labels[k]);
  }
  dims.push_back(fused);
  labels.push_back(join_labels(parts));
  for (int k = start + count; k < s.num_systems(); ++k) {
    dims.push_back(s.dims[k]);
    labels.push_back(s.labels[k]);
  }
  return StateMatrix(HilbertStructure(std::move(dims), std::move(labels)), rho.matrix(),
                     rho.normalized());
}

StateMatrix split_system(const StateMatrix& rho, int pos, const std::vector<int>& sub_dims,
                         const std::vector<std::string>& sub_labels) {
  const auto& s = rho.structure();
  if (pos < 0 || pos >= s.num_systems()) throw Error(Error::Kind::Shape, "split position out of bounds");
  int prod = std::accumulate(sub_dims.begin(), sub_dims.end(), 1, std::multiplies<int>());
  if (prod != s.dims[pos])
    throw Error(Error::Kind::Shape, "sub-dimensions do not factor the merged system");
  std::vector<int> dims;
  std::vector<std::string> labels;
  for (int k = 0; k < pos; ++k) {
    dims.push_back(s.dims[k]);
    labels.push_back(s.labels[k]);
  }
  dims.insert(dims.end(), sub_dims.begin(), sub_dims.end());
  labels.insert(labels.end(), sub_labels.begin(), sub_labels.end());
  for (int k = pos + 1; k < s.num_systems(); ++k) {
    dims.push_back(s.dims[k]);
    labels.push_back(s.labels[k]);
  }
  return StateMatrix(HilbertStructure(std::move(dims), std::move(labels)), rho.matrix(),
                     rho.normalized());
}

StateMatrix relabel(const StateMatrix& rho, const std::vector<std::string>& labels) {
  return StateMatrix(HilbertStructure(rho.structure().dims, labels), rho.matrix(),
                     rho.normalized());
}

StateMatrix kron_merge(const StateMatrix& rho, const StateMatrix& sigma,
                       const std::vector<std::pair<std::string, std::string>>& pairing) {
  int n = rho.structure().num_systems();
  int m = sigma.structure().num_systems();
  if (m > n) throw Error(Error::Kind::Arity, "second factor has more systems than the first");
  if (static_cast<int>(pairing.size()) != m)
    throw Error(Error::Kind::Arity, "pairing must cover every system of the second factor");
  for (int i = 0; i < m; ++i) {
    if (pairing[i].first != rho.structure().labels[i] ||
        pairing[i].second != sigma.structure().labels[i])
      throw Error(Error::Kind::Label, "pairing must match the leading systems in order");
  }
  StateMatrix tau = tensor_product(rho, sigma);
  // interleave: A1 B1 A2 B2 ... Am Bm A_{m+1} ... A_n
  std::vector<int> perm;
  for (int i = 0; i < m; ++i) {
    perm.push_back(i);
    perm.push_back(n + i);
  }
  for (int i = m; i < n; ++i) perm.push_back(i);
  tau = permute_systems(tau, perm);
  for (int i = 0; i < m; ++i) tau = merge_adjacent(tau, i, 2);
  return tau;
}

StateMatrix kc_product(const StateMatrix& alpha, const StateMatrix& beta) {
  int na = alpha.structure().num_systems() - 1;
  int nb = beta.structure().num_systems() - 1;
  if (na != nb || na < 1)
    throw Error(Error::Kind::Arity, "lead-preserving product needs matching trailing systems");
  StateMatrix tau = tensor_product(alpha, beta);
  // A C11..C1n B C21..C2n -> A B C11 C21 ... C1n C2n
  std::vector<int> perm = {0, na + 1};
  for (int j = 0; j < na; ++j) {
    perm.push_back(1 + j);
    perm.push_back(na + 2 + j);
  }
  tau = permute_systems(tau, perm);
  for (int j = 0; j < na; ++j) tau = merge_adjacent(tau, 2 + j, 2);
  return tau;
}

StateMatrix partial_trace(const StateMatrix& rho, const std::vector<std::string>& keep) {
  const auto& s = rho.structure();
  if (keep.empty()) throw Error(Error::Kind::Label, "must keep at least one system");
  std::vector<bool> kept(s.num_systems(), false);
  for (const auto& l : keep) kept[s.index_of(l)] = true;

  std::vector<int> keep_pos, trace_pos;
  for (int k = 0; k < s.num_systems(); ++k) (kept[k] ? keep_pos : trace_pos).push_back(k);

  std::vector<int> kdims, tdims;
  std::vector<std::string> klabels;
  for (int k : keep_pos) {
    kdims.push_back(s.dims[k]);
    klabels.push_back(s.labels[k]);
  }
  for (int k : trace_pos) tdims.push_back(s.dims[k]);
  int kd = std::accumulate(kdims.begin(), kdims.end(), 1, std::multiplies<int>());
  int td = std::accumulate(tdims.begin(), tdims.end(), 1, std::multiplies<int>());

  Mat out = Mat::Zero(kd, kd);
  std::vector<int> kr, kc, t, digits(s.num_systems());
  for (int r = 0; r < kd; ++r) {
    unflatten(r, kdims, kr);
    for (int c = 0; c < kd; ++c) {
      unflatten(c, kdims, kc);
      cplx sum = 0.0;
      for (int e = 0; e < td; ++e) {
        unflatten(e, tdims, t);
        for (size_t i = 0; i < keep_pos.size(); ++i) digits[keep_pos[i]] = kr[i];
        for (size_t i = 0; i < trace_pos.size(); ++i) digits[trace_pos[i]] = t[i];
        int row = flatten(digits, s.dims);
        for (size_t i = 0; i < keep_pos.size(); ++i) digits[keep_pos[i]] = kc[i];
        int col = flatten(digits, s.dims);
        sum += rho.matrix()(row, col);
      }
      out(r, c) = sum;
    }
  }
  return StateMatrix(HilbertStructure(std::move(kdims), std::move(klabels)), std::move(out),
                     false);
}

Mat partial_transpose(const Mat& m, const HilbertStructure& s,
                      const std::vector<std::string>& systems) {
  std::vector<bool> flip(s.num_systems(), false);
  for (const auto& l : systems) flip[s.index_of(l)] = true;

  int total = s.total_dim();
  if (m.rows() != total || m.cols() != total)
    throw Error(Error::Kind::Shape, "matrix side does not match the structure");
  Mat out(total, total);
  std::vector<int> rd, cd;
  for (int r = 0; r < total; ++r) {
    unflatten(r, s.dims, rd);
    for (int c = 0; c < total; ++c) {
      unflatten(c, s.dims, cd);
      std::vector<int> nr = rd, nc = cd;
      for (int k = 0; k < s.num_systems(); ++k)
        if (flip[k]) std::swap(nr[k], nc[k]);
      out(flatten(nr, s.dims), flatten(nc, s.dims)) = m(r, c);
    }
  }
  return out;
}

Mat partial_transpose(const StateMatrix& rho, const std::vector<std::string>& systems) {
  return partial_transpose(rho.matrix(), rho.structure(), systems);
}

StateMatrix apply_local(const StateMatrix& rho, const LocalOperator& X, const Tolerances& tol) {
  if (!(X.structure == rho.structure()))
    throw Error(Error::Kind::Shape, "operator structure does not match the state");
  Mat f = X.full();
  Mat out = f * rho.matrix() * f.adjoint();
  std::vector<int> dims;
  for (const auto& factor : X.factors) dims.push_back(static_cast<int>(factor.rows()));
  return StateMatrix(HilbertStructure(dims, rho.structure().labels), std::move(out), false, tol);
}

int numerical_rank(const StateMatrix& rho, double tol) {
  if (tol <= 0) throw Error(Error::Kind::Validity, "rank tolerance must be positive");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix(), Eigen::EigenvaluesOnly);
  double lmax = es.eigenvalues().maxCoeff();
  if (lmax <= 0) return 0;
  int rank = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > tol * lmax) ++rank;
  return rank;
}

double min_eigenvalue(const Mat& m) {
  check_hermitian(m, 1e-8);
  Eigen::SelfAdjointEigenSolver<Mat> es((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<PureVector> range_basis(const StateMatrix& rho, double tol) {
  if (tol <= 0) throw Error(Error::Kind::Validity, "rank tolerance must be positive");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix());
  double lmax = es.eigenvalues().maxCoeff();
  std::vector<PureVector> out;
  if (lmax <= 0) return out;
  for (int i = es.eigenvalues().size() - 1; i >= 0; --i) {
    if (es.eigenvalues()(i) > tol * lmax)
      out.emplace_back(rho.structure(), es.eigenvectors().col(i));
  }
  return out;
}

}  // namespace genent
