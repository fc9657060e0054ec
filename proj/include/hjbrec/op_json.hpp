#pragma once

// JSON form of operators:
//   {"vars": [...], "params": [...], "terms": [{"coef": "53/4", "pows": [...], "dords": [...]}]}
// ShiftOp uses "shifts" in place of "dords". "pows" runs over vars then params;
// "params" may be omitted when empty. Coefficients must be exact rational
// strings; JSON numbers are rejected.

#include <json.hpp>

#include "hjbrec/operators.hpp"

namespace hjbrec {

nlohmann::json to_json(const DiffOp& op);
nlohmann::json to_json(const ShiftOp& op);

DiffOp diff_op_from_json(const nlohmann::json& j);
ShiftOp shift_op_from_json(const nlohmann::json& j);

}  // namespace hjbrec
