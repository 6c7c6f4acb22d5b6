#include "genent/constructions.hpp"

#include <cmath>
#include <cstdlib>

#include "genent/measures.hpp"
#include "genent/rng.hpp"

namespace genent {

namespace {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

bool is_mc_basis(const EBBasis& basis) {
  if (basis.dim_a() != basis.size()) return false;
  for (int i = 0; i < basis.size(); ++i) {
    Vec a = basis.a_vectors[i];
    for (int k = 0; k < a.size(); ++k)
      if (k != i && std::abs(a(k)) > 1e-12 * a.norm()) return false;
  }
  return true;
}

void check_cap(int total, int cap) {
  if (total > cap)
    throw Error(Error::Kind::DimCap, "construction dimension " + std::to_string(total) +
                                         " exceeds the cap " + std::to_string(cap));
}

}  // namespace

int dim_cap_from_env(int fallback) {
  const char* env = std::getenv("GENENT_DIM_CAP");
  if (!env || !*env) return fallback;
  int v = std::atoi(env);
  if (v < 2) throw Error(Error::Kind::Validity, "GENENT_DIM_CAP must be an integer >= 2");
  return v;
}

StateMatrix mc_state(const Mat& c, const std::vector<std::string>& labels) {
  if (c.rows() != c.cols() || c.rows() < 2)
    throw Error(Error::Kind::Shape, "coefficient matrix must be square, side >= 2");
  check_hermitian(c, 1e-10);
  if (min_eigenvalue(c) < -1e-9 * std::max(c.norm(), 1e-300))
    throw Error(Error::Kind::Validity, "coefficient matrix must be PSD");
  int n = static_cast<int>(c.rows());
  Mat m = Mat::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i * n + i, j * n + j) = c(i, j);
  bool normalized = std::abs(c.trace().real() - 1.0) < 1e-10;
  return StateMatrix(HilbertStructure({n, n}, labels), std::move(m), normalized);
}

EBBasis mc_basis(int n) {
  EBBasis basis;
  basis.index_dim = n;
  for (int i = 0; i < n; ++i) {
    Vec a = Vec::Zero(n);
    a(i) = 1.0;
    basis.a_vectors.push_back(std::move(a));
  }
  return basis;
}

ChainReport chain_state(const std::vector<StateMatrix>& alphas,
                        const std::vector<EBBasis>& bases, uint64_t seed, int dim_cap) {
  int n = static_cast<int>(alphas.size());
  if (n < 2) throw Error(Error::Kind::Arity, "chain needs at least two inputs");
  if (bases.size() != alphas.size())
    throw Error(Error::Kind::Arity, "one EB basis per input required");

  ChainReport rep;
  bool all_mc = true;
  int total = 1;
  for (int j = 0; j < n; ++j) {
    if (alphas[j].structure().num_systems() != 2)
      throw Error(Error::Kind::Arity, "chain inputs must be bipartite");
    StateMatrix a = relabel(alphas[j].normalize(),
                            {"A" + std::to_string(j + 1), "C" + std::to_string(j + 1)});
    verify_eb_membership(a, bases[j]);  // throws Membership on failure
    if (min_eigenvalue(partial_transpose(a, {a.structure().labels[1]})) > -1e-10)
      throw Error(Error::Kind::Validity, "chain inputs must be NPT across A:C");
    all_mc = all_mc && is_mc_basis(bases[j]);
    total *= a.structure().total_dim();
    rep.inputs.push_back(std::move(a));
  }
  check_cap(total, dim_cap);
  rep.bases = bases;

  // tensor all inputs, bring the lead systems to the front, fuse the C block
  StateMatrix rho = rep.inputs[0];
  for (int j = 1; j < n; ++j) rho = tensor_product(rho, rep.inputs[j]);
  std::vector<int> perm;
  for (int j = 0; j < n; ++j) perm.push_back(2 * j);      // A_j
  for (int j = 0; j < n; ++j) perm.push_back(2 * j + 1);  // C_j
  rho = permute_systems(rho, perm);
  for (int j = 1; j < n; ++j) rho = merge_adjacent(rho, n, 2);
  rep.state = rho;
  const std::string c_label = rho.structure().labels.back();

  // pairwise lead marginals must factorize exactly
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      std::string ap = "A" + std::to_string(p + 1), aq = "A" + std::to_string(q + 1);
      StateMatrix pair = partial_trace(rho, {ap, aq});
      StateMatrix mp = partial_trace(rho, {ap});
      StateMatrix mq = partial_trace(rho, {aq});
      double res = (pair.matrix() - kron(mp.matrix(), mq.matrix())).norm();
      std::string cut = ap + ":" + aq;
      rep.reduced_ops.emplace(cut, pair);
      rep.product_residuals.emplace(cut, res);
      rep.ledger.entries.push_back(
          {cut, 0.0, EofTag::SEPARABLE_ZERO,
           "reduced pair operator equals the product of its marginals (residual " +
               std::to_string(res) + ")"});
    }

  // lead-with-C marginals carry the full input factor
  for (int l = 0; l < n; ++l) {
    std::string al = "A" + std::to_string(l + 1);
    StateMatrix red = partial_trace(rho, {al, c_label});
    std::string cut = al + ":" + c_label;
    rep.reduced_ops.emplace(cut, red);
    double neg_red = negativity(red, {c_label});
    double neg_in = negativity(rep.inputs[l], {rep.inputs[l].structure().labels[1]});
    bool two_qubit = rep.inputs[l].structure().dims == std::vector<int>{2, 2};
    rep.ledger.entries.push_back(
        {cut, two_qubit ? eof_2qubit(rep.inputs[l]) : neg_red,
         two_qubit ? EofTag::SEP_FACTOR_ADDITIVE : EofTag::BOUND_ONLY,
         two_qubit ? "reduced operator is the input factor tensored with a separable "
                     "remainder, which contributes zero EOF"
                   : "no exact EOF rule applies above two qubits; value is the "
                     "negativity lower bound"});
    rep.ledger.entries.push_back(
        {al + ":rest", two_qubit ? eof_2qubit(rep.inputs[l]) : negativity(rho, {al}),
         two_qubit ? EofTag::TENSOR_ADDITIVE : EofTag::BOUND_ONLY,
         two_qubit ? "the state is a tensor product across this cut up to index merging, "
                     "so the EOF equals the input factor's two-qubit value"
                   : "no exact EOF rule applies above two qubits; value is the "
                     "negativity lower bound"});
    if (is_mc_basis(bases[l]))
      rep.ledger.entries.push_back(
          {"input " + al + ":C" + std::to_string(l + 1),
           two_qubit ? eof_2qubit(rep.inputs[l]) : neg_in, EofTag::EB_RANGE_ADDITIVE,
           "input range lies in an entanglement-breaking span, making its EOF additive "
           "under tensor composition"});
  }

  // certification: GE for tripartite outputs, distillability per lead-with-C
  // cut when every input is maximally correlated
  if (rho.structure().num_systems() == 3) {
    CutVerdict v;
    v.cut = "genuine-multipartite";
    v.cert = certify_ge(rho, seed);
    rep.bipartition_verdicts.push_back(std::move(v));
  }
  if (all_mc) {
    for (int l = 0; l < n; ++l) {
      std::string al = "A" + std::to_string(l + 1);
      StateMatrix red = rep.reduced_ops.at(al + ":" + c_label);
      CutVerdict v;
      v.cut = al + ":" + c_label;
      v.cert = one_copy_distillable_search(red, {c_label}, 20, sub_seed(seed, 100 + l));
      rep.bipartition_verdicts.push_back(std::move(v));
    }
  }
  return rep;
}

StateMatrix merged_pair_state(const StateMatrix& alpha, const StateMatrix& beta) {
  return kc_product(alpha, beta);
}

StateMatrix ring_state(const std::vector<StateMatrix>& alphas, int dim_cap) {
  int n = static_cast<int>(alphas.size());
  if (n < 3) throw Error(Error::Kind::Arity, "ring needs at least three inputs");
  int total = 1;
  std::vector<StateMatrix> relabeled;
  for (int j = 0; j < n; ++j) {
    if (alphas[j].structure().num_systems() != 2)
      throw Error(Error::Kind::Arity, "ring inputs must be bipartite");
    // alpha_j spans the bond from site j to site j+1 (indices mod n)
    int neighbor = (j + 1) % n + 1;
    relabeled.push_back(
        relabel(alphas[j], {"C" + std::to_string(j + 1), "B" + std::to_string(neighbor)}));
    total *= alphas[j].structure().total_dim();
  }
  check_cap(total, dim_cap);
  StateMatrix rho = relabeled[0];
  for (int j = 1; j < n; ++j) rho = tensor_product(rho, relabeled[j]);
  // current order: C1 B2 C2 B3 ... Cn B1 -> permute to B1 C1 B2 C2 ... Bn Cn
  std::vector<int> perm;
  for (int site = 0; site < n; ++site) {
    int b_pos = site == 0 ? 2 * n - 1 : 2 * site - 1;
    perm.push_back(b_pos);
    perm.push_back(2 * site);
  }
  rho = permute_systems(rho, perm);
  for (int site = 0; site < n; ++site) rho = merge_adjacent(rho, site, 2);
  return rho;
}

StateMatrix satellite_state(const std::vector<StateMatrix>& alphas, int dim_cap) {
  int n = static_cast<int>(alphas.size());
  if (n < 2) throw Error(Error::Kind::Arity, "satellite needs at least two inputs");
  int total = 1;
  std::vector<StateMatrix> relabeled;
  for (int j = 0; j < n; ++j) {
    if (alphas[j].structure().num_systems() != 2)
      throw Error(Error::Kind::Arity, "satellite inputs must be bipartite");
    relabeled.push_back(
        relabel(alphas[j], {"A" + std::to_string(j + 1), "B" + std::to_string(j + 1)}));
    total *= alphas[j].structure().total_dim();
  }
  check_cap(total, dim_cap);
  StateMatrix rho = relabeled[0];
  for (int j = 1; j < n; ++j) rho = tensor_product(rho, relabeled[j]);
  // A1 B1 A2 B2 ... -> A1 ... An B1 ... Bn, then fuse the hub
  std::vector<int> perm;
  for (int j = 0; j < n; ++j) perm.push_back(2 * j);
  for (int j = 0; j < n; ++j) perm.push_back(2 * j + 1);
  rho = permute_systems(rho, perm);
  rho = merge_adjacent(rho, 0, n);
  return rho;
}

}  // namespace genent
