#include "isoq/corpus.hpp"

#include "isoq/geometry.hpp"
#include "isoq/nearly_spherical.hpp"

#include <cstdio>
#include <functional>
#include <map>

namespace isoq {

namespace {

using nlohmann::json;
using Params = std::map<std::string, double>;

ShapeRep polygon_from(int m, const std::function<Eigen::Vector2d(int)>& vertex) {
  Eigen::Matrix2Xd v(2, m);
  for (int j = 0; j < m; ++j) v.col(j) = vertex(j);
  return ShapeRep::polygon(std::move(v));
}

double param(const Params& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

double required(const Params& p, const std::string& key, const std::string& generator) {
  const auto it = p.find(key);
  if (it == p.end()) throw ValidationError(generator + ": missing parameter '" + key + "'");
  return it->second;
}

int integer(double v, const std::string& what) {
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ValidationError(what + " must be an integer");
  return static_cast<int>(v);
}

ShapeRep ellipse(double aspect, int m) {
  if (!(aspect > 0)) throw ValidationError("ellipse: aspect must be positive");
  return polygon_from(m, [&](int j) {
    const double t = 2 * kPi * j / m;
    return Eigen::Vector2d(aspect * std::cos(t), std::sin(t));
  });
}

ShapeRep stadium(double length, int per_cap) {
  if (!(length >= 0)) throw ValidationError("stadium: length must be nonnegative");
  const double h = 0.5 * length;
  // the cap endpoints are shared with the straight sides
  return polygon_from(2 * per_cap + 2, [&](int j) {
    const bool right = j <= per_cap;
    const int i = right ? j : j - per_cap - 1;
    const double t = -0.5 * kPi + kPi * i / per_cap + (right ? 0.0 : kPi);
    return Eigen::Vector2d((right ? h : -h) + std::cos(t), std::sin(t));
  });
}

ShapeRep perturbed_ball(int mode, double amplitude, int dim, int nlat, int nlon) {
  if (mode < 0) throw ValidationError("perturbed-ball: mode must be nonnegative");
  if (dim == 2) return ShapeRep::radial2d(FourierSeries::single_mode(mode, amplitude));
  if (dim != 3) throw ValidationError("perturbed-ball: dim must be 2 or 3");
  // zonal Legendre polynomial P_mode(cos theta)
  SphericalGrid g = SphericalGrid::zero(nlat, nlon);
  for (int i = 0; i < nlat; ++i) {
    const double x = std::cos(g.colatitude(i));
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= mode; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    g.values.row(i).setConstant(amplitude * (mode == 0 ? 1.0 : p1));
  }
  return ShapeRep::radial3d(std::move(g));
}

std::vector<ShapeRep> generate(const std::string& generator, const Params& p) {
  if (generator == "regular-ngon") {
    return {regular_polygon(integer(required(p, "sides", generator), "sides"), kPi)};
  }
  if (generator == "square") return {rectangle(1.0, 1.0)};
  if (generator == "rectangle") {
    const double aspect = required(p, "aspect", generator);
    if (!(aspect > 0)) throw ValidationError("rectangle: aspect must be positive");
    return {rectangle(aspect, 1.0)};
  }
  if (generator == "ellipse") {
    return {ellipse(required(p, "aspect", generator), integer(param(p, "vertices", 720), "vertices"))};
  }
  if (generator == "stadium") {
    return {stadium(required(p, "length", generator), integer(param(p, "vertices", 360), "vertices") / 2)};
  }
  if (generator == "perturbed-ball") {
    return {perturbed_ball(integer(required(p, "mode", generator), "mode"), required(p, "amplitude", generator),
                           integer(param(p, "dim", 2), "dim"), integer(param(p, "nlat", 32), "nlat"),
                           integer(param(p, "nlon", 64), "nlon"))};
  }
  if (generator == "random-fourier") {
    RandomFamilyOptions o;
    o.max_mode = integer(param(p, "modes", 8), "modes");
    o.amplitude = param(p, "scale", 0.05);
    o.seed = static_cast<std::uint64_t>(integer(param(p, "seed", 0), "seed"));
    if (o.max_mode < o.min_mode) throw ValidationError("random-fourier: modes must be at least 2");
    const int count = integer(param(p, "count", 1), "count");
    std::vector<ShapeRep> out;
    for (int i = 0; i < count; ++i) out.push_back(ShapeRep::radial2d(random_fourier(o, static_cast<std::uint64_t>(i))));
    return out;
  }
  throw ValidationError("unknown generator '" + generator + "'");
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// Cartesian product over list-valued parameters, in key order.
std::vector<Params> expand_params(const json& entry) {
  std::vector<Params> out{{}};
  for (const auto& [key, value] : entry.items()) {
    if (key == "generator" || key == "rotate" || key == "translate") continue;
    std::vector<double> values;
    if (value.is_number()) {
      values.push_back(value.get<double>());
    } else if (value.is_array() && !value.empty()) {
      for (const json& v : value) {
        if (!v.is_number()) throw ValidationError("parameter '" + key + "' must be numeric");
        values.push_back(v.get<double>());
      }
    } else {
      throw ValidationError("parameter '" + key + "' must be a number or a nonempty list");
    }
    std::vector<Params> next;
    for (const Params& base : out)
      for (double v : values) {
        Params p = base;
        p[key] = v;
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

std::vector<int> node_list(const json& spec) {
  if (!spec.contains("nodes")) return {kDefaultNodes};
  const json& n = spec["nodes"];
  std::vector<int> out;
  if (n.is_number_integer()) {
    out.push_back(n.get<int>());
  } else if (n.is_array()) {
    for (const json& v : n) {
      if (!v.is_number_integer()) throw ValidationError("nodes must be integers");
      out.push_back(v.get<int>());
    }
  } else {
    throw ValidationError("nodes must be an integer or a list of integers");
  }
  for (int v : out)
    if (v < 16) throw ValidationError("nodes must be at least 16");
  return out;
}

}  // namespace

ShapeRep rotate(const ShapeRep& shape, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  switch (shape.kind()) {
    case ShapeKind::Polygon2D:
      return ShapeRep::polygon(R * shape.as_polygon().vertices);
    case ShapeKind::RadialGraph2D: {
      const RadialGraph2D& g = shape.as_radial2d();
      FourierSeries u = g.u;
      for (int k = 1; k <= u.modes(); ++k) {
        // u'(theta) = u(theta - angle)
        const double ck = std::cos(k * angle), sk = std::sin(k * angle);
        const double a = g.u.a[k - 1], b = g.u.b[k - 1];
        u.a[k - 1] = a * ck - b * sk;
        u.b[k - 1] = a * sk + b * ck;
      }
      return ShapeRep::radial2d(std::move(u), R * g.center);
    }
    case ShapeKind::RadialGraph3D:
      break;
  }
  throw ValidationError("rotate: only planar shapes");
}

std::vector<CorpusEntry> expand_corpus(const json& spec) {
  if (!spec.is_object()) throw ValidationError("corpus spec must be an object");
  if (!spec.contains("shapes") || !spec["shapes"].is_array())
    throw ValidationError("corpus spec needs a 'shapes' list");
  const std::vector<int> nodes = node_list(spec);

  std::vector<CorpusEntry> base;
  for (const json& entry : spec["shapes"]) {
    if (!entry.is_object() || !entry.contains("generator") || !entry["generator"].is_string())
      throw ValidationError("every corpus entry needs a 'generator' string");
    const std::string generator = entry["generator"].get<std::string>();
    std::optional<double> angle;
    if (entry.contains("rotate")) {
      if (!entry["rotate"].is_number()) throw ValidationError("rotate must be a number");
      angle = entry["rotate"].get<double>();
    }
    std::optional<Point> shift;
    if (entry.contains("translate")) {
      const json& t = entry["translate"];
      if (!t.is_array() || t.size() < 2 || t.size() > 3)
        throw ValidationError("translate must be a list of 2 or 3 numbers");
      Point v(static_cast<int>(t.size()));
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (!t[i].is_number()) throw ValidationError("translate must be numeric");
        v[static_cast<int>(i)] = t[i].get<double>();
      }
      shift = v;
    }

    for (Params p : expand_params(entry)) {
      if (generator == "random-fourier" && !p.contains("seed") && spec.contains("seed")) {
        if (!spec["seed"].is_number_unsigned()) throw ValidationError("seed must be a nonnegative integer");
        p["seed"] = static_cast<double>(spec["seed"].get<std::uint64_t>());
      }
      std::string id = generator;
      for (const auto& [k, v] : p) id += "/" + k + "=" + number(v);
      if (angle) id += "/rotate=" + number(*angle);
      if (shift) {
        id += "/translate=";
        for (int i = 0; i < shift->size(); ++i) id += (i ? ";" : "") + number((*shift)[i]);
      }
      try {
        const std::vector<ShapeRep> shapes = generate(generator, p);
        for (std::size_t i = 0; i < shapes.size(); ++i) {
          ShapeRep s = rescale_to_unit_volume(shapes[i]).first;
          if (angle) s = rotate(s, *angle);
          if (shift) {
            if (shift->size() != s.dim()) throw ValidationError("translate has the wrong dimension");
            s = translate(s, *shift);
          }
          CorpusEntry e;
          e.id = shapes.size() > 1 ? id + "/#" + std::to_string(i) : id;
          e.family = generator;
          e.shape = std::move(s);
          base.push_back(std::move(e));
        }
      } catch (const std::exception& ex) {
        CorpusEntry e;
        e.id = id;
        e.family = generator;
        e.error = ex.what();
        base.push_back(std::move(e));
      }
    }
  }

  std::vector<CorpusEntry> out;
  for (int n : nodes)
    for (CorpusEntry e : base) {
      e.nodes = n;
      out.push_back(std::move(e));
    }
  return out;
}

json default_corpus_spec() {
  return json::parse(R"({
    "seed": 0,
    "nodes": 4096,
    "shapes": [
      {"generator": "regular-ngon", "sides": [3, 4, 5, 6, 7, 8, 9, 10, 11, 12]},
      {"generator": "square"},
      {"generator": "rectangle", "aspect": [1.5, 2, 3, 5]},
      {"generator": "ellipse", "aspect": [1.25, 1.5, 2, 3]},
      {"generator": "stadium", "length": [0.5, 1, 2]},
      {"generator": "perturbed-ball", "mode": 2, "amplitude": [0.01, 0.02, 0.04, 0.08]},
      {"generator": "perturbed-ball", "mode": 3, "amplitude": 0.05},
      {"generator": "perturbed-ball", "mode": 4, "amplitude": 0.2},
      {"generator": "random-fourier", "count": 4, "modes": 8, "scale": 0.05, "seed": 1},
      {"generator": "random-fourier", "count": 2, "modes": 6, "scale": 0.6, "seed": 2},
      {"generator": "regular-ngon", "sides": 5, "rotate": 0.3, "translate": [0.7, -0.3]},
      {"generator": "rectangle", "aspect": 2, "rotate": 0.5}
    ]
  })");
}

}  // namespace isoq
