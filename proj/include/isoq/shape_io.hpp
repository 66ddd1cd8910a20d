#pragma once

#include "isoq/shape.hpp"

#include <json.hpp>

#include <string>

namespace isoq {

/// Shape from its JSON object:
///   {"kind": "polygon2d", "vertices": [[x, y], ...]}
///   {"kind": "radial2d", "fourier": {"a0": .., "a": [..], "b": [..]}, "center": [x, y]}
///   {"kind": "radial3d", "grid": {"nlat": .., "nlon": .., "values": [..]}, "center": [x, y, z]}
/// Grid values are row-major (latitude outer). "center" is optional.
ShapeRep shape_from_json(const nlohmann::json& j);

nlohmann::json shape_to_json(const ShapeRep& shape);

/// Parses text; syntax errors become ValidationError with "line L, column C".
nlohmann::json parse_json_text(const std::string& text, const std::string& source = "<input>");

nlohmann::json read_json_file(const std::string& path);

ShapeRep load_shape(const std::string& path);

}  // namespace isoq
