#include "genent/serialize.hpp"

namespace genent {

Json encode_certificate(const Certificate& cert) {
  Json j;
  j["verdict"] = verdict_name(cert.verdict);
  j["value"] = cert.value;
  j["residual"] = cert.residual;
  j["seed"] = cert.seed;
  Json evidence = Json::object();
  if (cert.witness) evidence["witness"] = encode_matrix(*cert.witness);
  if (!cert.parts.empty()) {
    Json parts = Json::array();
    for (const auto& p : cert.parts) parts.push_back(encode_matrix(p));
    evidence["parts"] = std::move(parts);
  }
  if (cert.vector) evidence["vector"] = encode_vector(*cert.vector);
  j["evidence"] = std::move(evidence);
  return j;
}

Certificate decode_certificate(const Json& j) {
  Certificate cert;
  cert.verdict = verdict_from_name(j.at("verdict").get<std::string>());
  cert.value = j.at("value").get<double>();
  cert.residual = j.at("residual").get<double>();
  cert.seed = j.at("seed").get<uint64_t>();
  if (j.contains("evidence")) {
    const Json& e = j["evidence"];
    if (e.contains("witness")) cert.witness = decode_matrix(e["witness"]);
    if (e.contains("parts"))
      for (const auto& p : e["parts"]) cert.parts.push_back(decode_matrix(p));
    if (e.contains("vector")) cert.vector = decode_vector(e["vector"]);
  }
  return cert;
}

Json encode_eb_basis(const EBBasis& basis) {
  Json j;
  Json vecs = Json::array();
  for (const auto& a : basis.a_vectors) vecs.push_back(encode_vector(a));
  j["a_vectors"] = std::move(vecs);
  j["index_dim"] = basis.index_dim;
  return j;
}

EBBasis decode_eb_basis(const Json& j) {
  EBBasis basis;
  for (const auto& v : j.at("a_vectors")) basis.a_vectors.push_back(decode_vector(v));
  basis.index_dim = j.at("index_dim").get<int>();
  if (basis.index_dim < basis.size())
    throw Error(Error::Kind::Io, "index_dim smaller than the number of span vectors");
  return basis;
}

Json encode_cascade_steps(const ProjectionCascade& cascade) {
  Json steps = Json::array();
  for (const auto& s : cascade.steps) {
    Json step;
    step["kind"] = s.kind;
    step["indices"] = s.indices;
    steps.push_back(std::move(step));
  }
  return steps;
}

Json encode_bisep_params(const RankTwoBisepParams& params) {
  Json j;
  j["theta"] = params.theta;
  j["mu"] = params.mu;
  j["f"] = params.f;
  j["nu"] = params.nu;
  if (params.beta0) j["beta0"] = encode_state(*params.beta0);
  if (params.beta1) j["beta1"] = encode_state(*params.beta1);
  Json eps = Json::array();
  for (const auto& t : params.eps_terms) {
    Json e;
    e["p"] = t.p;
    e["xi"] = t.xi;
    e["w"] = encode_vector(t.w);
    e["x"] = encode_vector(t.x);
    e["y"] = encode_vector(t.y);
    eps.push_back(std::move(e));
  }
  j["eps_terms"] = std::move(eps);
  Json pt = Json::array();
  for (const auto& t : params.pt_terms) {
    Json e;
    e["q"] = t.q;
    e["eta"] = t.eta;
    e["psi"] = encode_vector(t.psi);
    pt.push_back(std::move(e));
  }
  j["pt_terms"] = std::move(pt);
  return j;
}

RankTwoBisepParams decode_bisep_params(const Json& j) {
  RankTwoBisepParams params;
  params.theta = j.at("theta").get<double>();
  params.mu = j.at("mu").get<double>();
  params.f = j.at("f").get<double>();
  params.nu = j.at("nu").get<double>();
  if (j.contains("beta0")) params.beta0 = decode_state(j["beta0"]);
  if (j.contains("beta1")) params.beta1 = decode_state(j["beta1"]);
  if (j.contains("eps_terms"))
    for (const auto& e : j["eps_terms"]) {
      EpsTerm t;
      t.p = e.at("p").get<double>();
      t.xi = e.at("xi").get<double>();
      t.w = decode_vector(e.at("w"));
      t.x = decode_vector(e.at("x"));
      t.y = decode_vector(e.at("y"));
      params.eps_terms.push_back(std::move(t));
    }
  if (j.contains("pt_terms"))
    for (const auto& e : j["pt_terms"]) {
      PtTerm t;
      t.q = e.at("q").get<double>();
      t.eta = e.at("eta").get<double>();
      t.psi = decode_vector(e.at("psi"));
      params.pt_terms.push_back(std::move(t));
    }
  return params;
}

Json encode_ledger(const AdditivityLedger& ledger) {
  Json out = Json::array();
  for (const auto& e : ledger.entries) {
    Json row;
    row["cut"] = e.cut;
    row["value"] = e.value;
    row["tag"] = eof_tag_name(e.tag);
    row["justification"] = e.justification;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace genent
