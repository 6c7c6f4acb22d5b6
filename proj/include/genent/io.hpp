#ifndef GENENT_IO_HPP
#define GENENT_IO_HPP

#include <string>

#include <json.hpp>

#include "genent/hilbert.hpp"

namespace genent {

using Json = nlohmann::ordered_json;

/// Serializes with every floating number printed at 17 significant digits so
/// that identical runs produce byte-identical files.
std::string dump17(const Json& j, int indent = 2);
void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

Json encode_complex(const cplx& z);
cplx decode_complex(const Json& j);
Json encode_matrix(const Mat& m);
Mat decode_matrix(const Json& j);
Json encode_vector(const Vec& v);
Vec decode_vector(const Json& j);

/// State file: {"dims": [..], "labels": [..], "matrix": [[[re,im],..],..]}
Json encode_state(const StateMatrix& rho);
StateMatrix decode_state(const Json& j, const Tolerances& tol = {});
void write_state_file(const std::string& path, const StateMatrix& rho);
StateMatrix read_state_file(const std::string& path, const Tolerances& tol = {});

/// FNV-1a over a canonical config string; embedded in reports.
uint64_t config_hash(const std::string& canonical);

}  // namespace genent

#endif
