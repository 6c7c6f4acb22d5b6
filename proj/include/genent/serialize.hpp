#ifndef GENENT_SERIALIZE_HPP
#define GENENT_SERIALIZE_HPP

#include "genent/criteria.hpp"
#include "genent/eb.hpp"
#include "genent/forms.hpp"
#include "genent/io.hpp"
#include "genent/measures.hpp"

namespace genent {

/// Certificate file: {verdict, value, residual, seed,
///                    evidence: {witness?, parts?, vector?}}.
Json encode_certificate(const Certificate& cert);
Certificate decode_certificate(const Json& j);

/// EBBasis file: {"a_vectors": [[[re,im],..],..], "index_dim": n}.
Json encode_eb_basis(const EBBasis& basis);
EBBasis decode_eb_basis(const Json& j);

Json encode_cascade_steps(const ProjectionCascade& cascade);

/// Parameter file mirroring the RankTwoBisepParams field list.
Json encode_bisep_params(const RankTwoBisepParams& params);
RankTwoBisepParams decode_bisep_params(const Json& j);

Json encode_ledger(const AdditivityLedger& ledger);

}  // namespace genent

#endif
