#include "isoq/shape_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace isoq {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(where + ": missing \"" + key + "\"");
  }
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  return j.get<double>();
}

Eigen::VectorXd numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array of numbers");
  Eigen::VectorXd out(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = number(j[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

int count(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ValidationError(where + ": expected an integer");
  return j.get<int>();
}

}  // namespace

ShapeRep shape_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("shape: expected a JSON object");
  const json& kind_j = field(j, "kind", "shape");
  if (!kind_j.is_string()) throw ValidationError("shape.kind: expected a string");
  const std::string kind = kind_j.get<std::string>();

  if (kind == "polygon2d") {
    const json& v = field(j, "vertices", "shape");
    if (!v.is_array()) throw ValidationError("shape.vertices: expected an array");
    Eigen::Matrix2Xd vertices(2, v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string where = "shape.vertices[" + std::to_string(i) + "]";
      const Eigen::VectorXd p = numbers(v[i], where);
      if (p.size() != 2) throw ValidationError(where + ": expected [x, y]");
      vertices.col(static_cast<Eigen::Index>(i)) = p;
    }
    return ShapeRep::polygon(std::move(vertices));
  }

  if (kind == "radial2d") {
    const json& f = field(j, "fourier", "shape");
    const Eigen::VectorXd a = f.contains("a") ? numbers(f.at("a"), "shape.fourier.a") : Eigen::VectorXd();
    const Eigen::VectorXd b = f.contains("b") ? numbers(f.at("b"), "shape.fourier.b") : Eigen::VectorXd();
    // a shorter list is padded with zeros
    FourierSeries u = FourierSeries::zero(static_cast<int>(std::max(a.size(), b.size())));
    u.a0 = f.contains("a0") ? number(f.at("a0"), "shape.fourier.a0") : 0.0;
    u.a.head(a.size()) = a;
    u.b.head(b.size()) = b;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    if (j.contains("center")) {
      const Eigen::VectorXd c = numbers(j.at("center"), "shape.center");
      if (c.size() != 2) throw ValidationError("shape.center: expected [x, y]");
      center = c;
    }
    return ShapeRep::radial2d(std::move(u), center);
  }

  if (kind == "radial3d") {
    const json& g = field(j, "grid", "shape");
    const int nlat = count(field(g, "nlat", "shape.grid"), "shape.grid.nlat");
    const int nlon = count(field(g, "nlon", "shape.grid"), "shape.grid.nlon");
    if (nlat < 2 || nlon < 4) throw ValidationError("shape.grid: need nlat >= 2 and nlon >= 4");
    const Eigen::VectorXd flat = numbers(field(g, "values", "shape.grid"), "shape.grid.values");
    if (flat.size() != static_cast<Eigen::Index>(nlat) * nlon) {
      throw ValidationError("shape.grid.values: expected nlat * nlon = " +
                            std::to_string(nlat * nlon) + " values, got " +
                            std::to_string(flat.size()));
    }
    SphericalGrid grid = SphericalGrid::zero(nlat, nlon);
    for (int i = 0; i < nlat; ++i)
      for (int k = 0; k < nlon; ++k) grid.values(i, k) = flat[i * nlon + k];
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    if (j.contains("center")) {
      const Eigen::VectorXd c = numbers(j.at("center"), "shape.center");
      if (c.size() != 3) throw ValidationError("shape.center: expected [x, y, z]");
      center = c;
    }
    return ShapeRep::radial3d(std::move(grid), center);
  }

  throw ValidationError("shape.kind: unknown kind \"" + kind + "\"");
}

json shape_to_json(const ShapeRep& shape) {
  json j;
  j["kind"] = kind_name(shape.kind());
  auto vec = [](const auto& v) {
    std::vector<double> out(v.data(), v.data() + v.size());
    return out;
  };
  switch (shape.kind()) {
    case ShapeKind::Polygon2D: {
      json v = json::array();
      const auto& m = shape.as_polygon().vertices;
      for (Eigen::Index i = 0; i < m.cols(); ++i) v.push_back({m(0, i), m(1, i)});
      j["vertices"] = v;
      break;
    }
    case ShapeKind::RadialGraph2D: {
      const auto& r = shape.as_radial2d();
      j["fourier"] = {{"a0", r.u.a0}, {"a", vec(r.u.a)}, {"b", vec(r.u.b)}};
      j["center"] = vec(r.center);
      break;
    }
    case ShapeKind::RadialGraph3D: {
      const auto& r = shape.as_radial3d();
      std::vector<double> flat;
      flat.reserve(static_cast<std::size_t>(r.u.nlat) * r.u.nlon);
      for (int i = 0; i < r.u.nlat; ++i)
        for (int k = 0; k < r.u.nlon; ++k) flat.push_back(r.u.values(i, k));
      j["grid"] = {{"nlat", r.u.nlat}, {"nlon", r.u.nlon}, {"values", flat}};
      j["center"] = vec(r.center);
      break;
    }
  }
  return j;
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points one past the offending character
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    const auto colon = what.rfind(": ");
    if (colon != std::string::npos) what = what.substr(colon + 2);
    throw ValidationError(source + ": malformed JSON at line " + std::to_string(line) +
                          ", column " + std::to_string(column) + ": " + what);
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_json_text(text.str(), path);
}

ShapeRep load_shape(const std::string& path) { return shape_from_json(read_json_file(path)); }

}  // namespace isoq
