#pragma once

#include <json.hpp>

#include "cftlab/wick.hpp"

namespace cftlab {

// Reads a complex number given either as a number or as [re, im].
cplx json_complex(const nlohmann::json& j, const char* what);
nlohmann::json complex_json(cplx z);

FieldExpr parse_node(const nlohmann::json& node, double b);
HalfPlanePoint parse_point(const nlohmann::json& node);
Background parse_background(const nlohmann::json& j);
// {"nodes": [...], "background": {...}}
CorrelationQuery parse_query(const nlohmann::json& doc);

}  // namespace cftlab
