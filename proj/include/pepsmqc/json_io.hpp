#pragma once

// JSON encodings shared by the library and the CLI: complex numbers are
// [re, im] pairs, matrices are row-major arrays of rows.

#include <json.hpp>

#include "pepsmqc/numerics.hpp"

namespace pepsmqc::json_io {

nlohmann::json complex_json(cplx z);
/// Accepts [re, im] or a bare real number.
cplx complex_from(const nlohmann::json& j);

nlohmann::json vector_json(const CVector& v);
CVector vector_from(const nlohmann::json& j);

nlohmann::json matrix_json(const CMatrix& m);
/// Accepts an array of rows, or a flat array of rows*cols entries when `rows`
/// is given (flat input is read row-major).
CMatrix matrix_from(const nlohmann::json& j, Eigen::Index rows = -1);

}  // namespace pepsmqc::json_io
