#pragma once

// JSON schemas shared by the CLI, the C API and the experiment harness.

#include <string>

#include <json.hpp>

#include "horolab/curve.hpp"
#include "horolab/obstruction.hpp"
#include "horolab/weights.hpp"

namespace horolab {

using Json = nlohmann::json;

/// Parses text, throwing ParseError with the parser message on failure.
Json parse_json(const std::string& text);
Json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Row-major array of rows.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// {"dims":[...], "rates":[...], "factors":[[[c0, c1, ...], ...], ...]}
CurveSpec curve_from_json(const Json& j);
Json curve_to_json(const CurveSpec& curve);

/// {"partition":[[1,2],...] (1-based), "m":[...], "mobius": "identity" | [matrix per factor]}.
/// Shape comes from the curve the embedding is tested against.
MobiusEmbeddingSpec mobius_spec_from_json(const Json& j, const ProductShape& shape);

/// {"powers":[...], "null_vectors":[[...], ...]}; "dims"/"rates" optional when a shape is supplied.
UnstableDirectionSpec unstable_spec_from_json(const Json& j, const ProductShape& shape);

/// {"shape":{"dims":[...],"rates":[...]}, "powers":[...], "coeffs":[...]}
Json tensor_to_json(const TensorVector& v);
TensorVector tensor_from_json(const Json& j);

}  // namespace horolab
