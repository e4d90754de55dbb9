#pragma once

// JSON file formats:
//   hypermatrix      {"shape":[d1,...,dm], "re":[...], "im":[...]}
//   int hypermatrix  {"shape":[d1,...,dm], "int":["-3","17",...]}
//   CbsInput         {"n":n, "xs":[<hypermatrix>...], "us":[<hypermatrix>...]}
// Flat arrays are row-major, first axis slowest. Readers reject length
// mismatches with ErrorCode::parse_error.

#include <string>

#include "json.hpp"

#include "cbsforge/cbs_functional.hpp"
#include "cbsforge/hypermatrix.hpp"

namespace cbsforge {

using Json = nlohmann::json;

Json to_json(const DimVector& shape);
Json to_json(const Hypermatrix& x);
Json to_json(const IntHypermatrix& x);
Json to_json(const CbsInput& input);
Json to_json(const PhiBreakdown& b);

DimVector dim_vector_from_json(const Json& j);
Hypermatrix hypermatrix_from_json(const Json& j);
IntHypermatrix int_hypermatrix_from_json(const Json& j);
CbsInput cbs_input_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

/// Hex SHA-256 of a byte string; reports cite input files by this digest.
std::string sha256_hex(const std::string& bytes);

}  // namespace cbsforge
