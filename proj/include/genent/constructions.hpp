#ifndef GENENT_CONSTRUCTIONS_HPP
#define GENENT_CONSTRUCTIONS_HPP

#include <map>
#include <string>
#include <vector>

#include "genent/criteria.hpp"
#include "genent/eb.hpp"
#include "genent/measures.hpp"

namespace genent {

/// Dimension cap for constructions entering certification; overridable via
/// the GENENT_DIM_CAP environment variable.
int dim_cap_from_env(int fallback = 64);

/// Maximally correlated state sum_ij c_ij |ii><jj| on n (x) n. The range lies
/// in the entanglement-breaking span {|i, i>}; entangled iff c has a nonzero
/// off-diagonal entry.
StateMatrix mc_state(const Mat& c, const std::vector<std::string>& labels = {"A", "B"});

/// The canonical EB basis {(|i>, i)} of an MC state's range.
EBBasis mc_basis(int n);

struct CutVerdict {
  std::string cut;
  Certificate cert;
};

/// Output of the chain construction: the merged-C state, its pairwise and
/// lead-with-C reduced operators, certification results, and the EOF ledger.
struct ChainReport {
  StateMatrix state;
  std::vector<StateMatrix> inputs;
  std::vector<EBBasis> bases;
  std::map<std::string, StateMatrix> reduced_ops;
  std::map<std::string, double> product_residuals;  // || rho_ApAq - rho_Ap (x) rho_Aq ||
  std::vector<CutVerdict> bipartition_verdicts;
  AdditivityLedger ledger;
};

/// Chains bipartite inputs alpha_j on (A_j, C_j) into an (n+1)-partite state
/// on (A_1, ..., A_n, C) with C the merge of all C_j: the tensor product with
/// C systems fused, associated left to right. Inputs must pass EB membership
/// against their declared bases and be NPT. Reduced pair operators are checked
/// for exact product form; lead-with-C operators for NPT plus negativity
/// matching the input factor. GE certification runs for tripartite outputs and
/// per-cut distillability searches run when every input is MC.
ChainReport chain_state(const std::vector<StateMatrix>& alphas,
                        const std::vector<EBBasis>& bases, uint64_t seed,
                        int dim_cap = 64);

/// (n+2)-partite merge of two (n+1)-partite states: lead systems stay
/// separate, trailing systems fuse pairwise.
StateMatrix merged_pair_state(const StateMatrix& alpha, const StateMatrix& beta);

/// Ring of n >= 3 bipartite states alpha_j on (C_j, B_{j+1}) (indices mod n):
/// site j of the output is the fused pair B_j C_j.
StateMatrix ring_state(const std::vector<StateMatrix>& alphas, int dim_cap = 64);

/// Satellite arrangement: alpha_j on (A_j, B_j); the lead systems fuse into a
/// single hub A = A_1...A_n, leaving (A, B_1, ..., B_n).
StateMatrix satellite_state(const std::vector<StateMatrix>& alphas, int dim_cap = 64);

}  // namespace genent

#endif
