#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "distortion/geomaps.hpp"

namespace distortion {

using Json = nlohmann::json;

/// Reals that are exact doubles become JSON numbers; anything else is written
/// as a decimal string that parses back to the same value.
Json real_to_json(const Real& x);
Real real_from_json(const Json& j, const std::string& where = "");

Json point_to_json(const Point& p);
Point point_from_json(const Json& j, int dim, const std::string& where = "");

/// Root object carries "dim"; nested nodes do not. External nodes cannot be
/// serialized (UnsupportedError).
Json map_to_json(const MapExpr& m);
MapExpr map_from_json(const Json& j);
/// Parse a node whose dimension is fixed by an enclosing document.
MapExpr map_from_json(const Json& j, int dim, const std::string& where);

std::string serialize_map(const MapExpr& m);
MapExpr parse_map(std::string_view text);

/// JSON text parse with ParseError carrying the byte offset.
Json parse_json_text(std::string_view text);

}  // namespace distortion
