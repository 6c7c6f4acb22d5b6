#include "genent/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace genent {

namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  std::string s(buf);
  // keep the token a valid JSON number
  if (s == "inf" || s == "-inf" || s == "nan" || s == "-nan")
    throw Error(Error::Kind::Io, "non-finite value in JSON output");
  return s;
}

void dump_rec(const Json& j, std::string& out, int indent, int depth) {
  std::string pad(static_cast<size_t>(indent) * depth, ' ');
  std::string pad_in(static_cast<size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad_in;
        out += Json(it.key()).dump();
        out += ": ";
        dump_rec(it.value(), out, indent, depth + 1);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      out += pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // flat arrays of numbers stay on one line
      bool scalar_only = true;
      for (const auto& e : j)
        if (e.is_structured()) scalar_only = false;
      if (scalar_only) {
        out += '[';
        for (size_t i = 0; i < j.size(); ++i) {
          dump_rec(j[i], out, indent, depth);
          if (i + 1 < j.size()) out += ", ";
        }
        out += ']';
        return;
      }
      out += "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        out += pad_in;
        dump_rec(j[i], out, indent, depth + 1);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      out += pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump17(const Json& j, int indent) {
  std::string out;
  dump_rec(j, out, indent, 0);
  out += '\n';
  return out;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Error::Kind::Io, "cannot open for writing: " + path);
  f << dump17(j);
}

Json read_json_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Error::Kind::Io, "cannot open: " + path);
  Json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw Error(Error::Kind::Io, std::string("JSON parse failure in ") + path + ": " + e.what());
  }
  return j;
}

Json encode_complex(const cplx& z) { return Json::array({z.real(), z.imag()}); }

cplx decode_complex(const Json& j) {
  if (!j.is_array() || j.size() != 2)
    throw Error(Error::Kind::Io, "complex entries must be [re, im] pairs");
  return cplx(j[0].get<double>(), j[1].get<double>());
}

Json encode_matrix(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(encode_complex(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat decode_matrix(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(Error::Kind::Io, "matrix must be a non-empty array");
  size_t rows = j.size(), cols = j[0].size();
  Mat m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw Error(Error::Kind::Io, "ragged matrix rows");
    for (size_t c = 0; c < cols; ++c) m(r, c) = decode_complex(j[r][c]);
  }
  return m;
}

Json encode_vector(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(encode_complex(v(i)));
  return out;
}

Vec decode_vector(const Json& j) {
  if (!j.is_array()) throw Error(Error::Kind::Io, "vector must be an array");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(i) = decode_complex(j[i]);
  return v;
}

Json encode_state(const StateMatrix& rho) {
  Json j;
  j["dims"] = rho.structure().dims;
  j["labels"] = rho.structure().labels;
  j["matrix"] = encode_matrix(rho.matrix());
  return j;
}

StateMatrix decode_state(const Json& j, const Tolerances& tol) {
  if (!j.contains("dims") || !j.contains("labels") || !j.contains("matrix"))
    throw Error(Error::Kind::Io, "state file needs dims, labels and matrix");
  HilbertStructure s(j["dims"].get<std::vector<int>>(),
                     j["labels"].get<std::vector<std::string>>());
  return StateMatrix(s, decode_matrix(j["matrix"]), false, tol);
}

void write_state_file(const std::string& path, const StateMatrix& rho) {
  write_json_file(path, encode_state(rho));
}

StateMatrix read_state_file(const std::string& path, const Tolerances& tol) {
  return decode_state(read_json_file(path), tol);
}

uint64_t config_hash(const std::string& canonical) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace genent
