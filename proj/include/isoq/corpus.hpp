#pragma once

#include "isoq/shape.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace isoq {

/// One shape of an expanded corpus. A generator failure keeps its row with
/// the message instead of a shape.
struct CorpusEntry {
  std::string id;      ///< generator plus its parameters, e.g. "rectangle/aspect=2"
  std::string family;  ///< generator name
  int nodes = 0;
  std::optional<ShapeRep> shape;  ///< rescaled to |E| = omega_n
  std::string error;
};

/// Expands a corpus spec:
///   {"seed": S, "nodes": N | [N1, N2], "shapes": [{"generator": ..., params...}, ...]}
/// Generators and their parameters (any numeric parameter may be a list;
/// lists expand as a Cartesian product):
///   regular-ngon   sides
///   square
///   rectangle      aspect
///   ellipse        aspect, vertices (default 720)
///   stadium        length (straight part, caps of radius 1), vertices (default 360)
///   perturbed-ball mode, amplitude, dim (2 | 3), nlat, nlon
///   random-fourier count, modes, scale, seed
/// Every entry also accepts "rotate" (radians, 2D) and "translate" ([x, y]),
/// applied after the volume rescaling. Throws ValidationError for a malformed spec.
std::vector<CorpusEntry> expand_corpus(const nlohmann::json& spec);

/// The built-in corpus: 36 planar shapes covering corners, elongation,
/// nonconvex star shapes and the nearly spherical regime.
nlohmann::json default_corpus_spec();

/// Rotation about the origin (planar shapes).
ShapeRep rotate(const ShapeRep& shape, double angle);

}  // namespace isoq
