#include "cbsforge/json_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace cbsforge {

namespace {

[[noreturn]] void parse_fail(const std::string& what) {
  fail(ErrorCode::parse_error, what);
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    parse_fail(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

}  // namespace

Json to_json(const DimVector& shape) { return Json(shape.dims()); }

Json to_json(const Hypermatrix& x) {
  Json re = Json::array();
  Json im = Json::array();
  for (const Complex& z : x.entries()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return Json{{"shape", to_json(x.shape())}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Json to_json(const IntHypermatrix& x) {
  Json ints = Json::array();
  for (const BigInt& v : x.entries()) ints.push_back(v.str());
  return Json{{"shape", to_json(x.shape())}, {"int", std::move(ints)}};
}

Json to_json(const CbsInput& input) {
  Json xs = Json::array();
  Json us = Json::array();
  for (const auto& x : input.xs()) xs.push_back(to_json(x));
  for (const auto& u : input.us()) us.push_back(to_json(u));
  return Json{{"n", input.n()}, {"xs", std::move(xs)}, {"us", std::move(us)}};
}

Json to_json(const PhiBreakdown& b) {
  Json terms = Json::array();
  for (const auto& t : b.per_subset) {
    Json positions = Json::array();
    for (std::size_t p = 1; p <= t.subset.rank(); ++p)
      if (t.subset.contains(p)) positions.push_back(p);
    terms.push_back({{"subset", std::move(positions)}, {"weight", t.weight}, {"phi_q", t.value}});
  }
  return Json{{"total", b.total},
              {"cancellation_mass", b.cancellation_mass},
              {"per_subset", std::move(terms)}};
}

DimVector dim_vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) parse_fail("shape must be a non-empty array");
  std::vector<std::size_t> dims;
  for (const Json& d : j) {
    if (!d.is_number_integer() || d.get<long long>() < 1)
      parse_fail("shape entries must be positive integers");
    dims.push_back(d.get<std::size_t>());
  }
  return DimVector(std::move(dims));
}

Hypermatrix hypermatrix_from_json(const Json& j) {
  const DimVector shape = dim_vector_from_json(field(j, "shape"));
  const Json& re = field(j, "re");
  const Json& im = field(j, "im");
  if (!re.is_array() || !im.is_array()) parse_fail("\"re\" and \"im\" must be arrays");
  if (re.size() != shape.total() || im.size() != shape.total())
    parse_fail("hypermatrix arrays have " + std::to_string(re.size()) + "/" +
               std::to_string(im.size()) + " entries, shape " + shape.to_string() +
               " needs " + std::to_string(shape.total()));
  std::vector<Complex> entries(shape.total());
  for (std::size_t a = 0; a < entries.size(); ++a) {
    if (!re[a].is_number() || !im[a].is_number()) parse_fail("non-numeric entry");
    entries[a] = {re[a].get<double>(), im[a].get<double>()};
  }
  return Hypermatrix(shape, std::move(entries));
}

IntHypermatrix int_hypermatrix_from_json(const Json& j) {
  const DimVector shape = dim_vector_from_json(field(j, "shape"));
  const Json& ints = field(j, "int");
  if (!ints.is_array()) parse_fail("\"int\" must be an array");
  if (ints.size() != shape.total())
    parse_fail("integer hypermatrix has " + std::to_string(ints.size()) +
               " entries, shape " + shape.to_string() + " needs " +
               std::to_string(shape.total()));
  std::vector<BigInt> entries;
  entries.reserve(ints.size());
  for (const Json& v : ints) {
    if (!v.is_string()) parse_fail("integer entries must be decimal strings");
    const std::string s = v.get<std::string>();
    const std::size_t start = (!s.empty() && s[0] == '-') ? 1 : 0;
    if (s.size() == start || s.find_first_not_of("0123456789", start) != std::string::npos)
      parse_fail("malformed decimal integer \"" + s + "\"");
    entries.emplace_back(s);
  }
  return IntHypermatrix(shape, std::move(entries));
}

CbsInput cbs_input_from_json(const Json& j) {
  const Json& n = field(j, "n");
  const Json& xs = field(j, "xs");
  const Json& us = field(j, "us");
  if (!n.is_number_integer() || n.get<long long>() < 1) parse_fail("\"n\" must be >= 1");
  if (!xs.is_array() || !us.is_array()) parse_fail("\"xs\" and \"us\" must be arrays");
  const auto count = n.get<std::size_t>();
  if (xs.size() != count || us.size() != count)
    parse_fail("\"xs\"/\"us\" lengths do not match n = " + std::to_string(count));
  std::vector<Hypermatrix> xv, uv;
  for (const Json& x : xs) xv.push_back(hypermatrix_from_json(x));
  for (const Json& u : us) uv.push_back(hypermatrix_from_json(u));
  try {
    return CbsInput(std::move(xv), std::move(uv));
  } catch (const Error& e) {
    parse_fail(std::string("inconsistent CbsInput: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    parse_fail(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::io_error, "write failed: " + path);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::io_error, "sha256 failed");
  std::ostringstream hex;
  for (unsigned int k = 0; k < len; ++k)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
  return hex.str();
}

}  // namespace cbsforge
