#include "isoq/geometry.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace isoq;

namespace {

const double kSqrtPi = std::sqrt(kPi);

ShapeRep square_area_pi() { return rectangle(kSqrtPi, kSqrtPi); }
ShapeRep hexagon_area_pi() { return regular_polygon(6, kPi); }

// Closed forms, evaluated independently with mpmath (30 digits).
constexpr double kHexPerimeter = 6.597816664747606;
constexpr double kSquareSymDiff = 0.5689171008196038;
constexpr double kHexSymDiff = 0.23394106746327349;

}  // namespace

TEST_CASE("volume") {
  CHECK(volume(unit_ball()) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(volume(square_area_pi()) == doctest::Approx(kPi).epsilon(1e-14));

  // u = t cos 2θ with the constant mode fixed by (1 + a0)^2 = 1 - t^2/2
  const double t = 0.01;
  FourierSeries u = FourierSeries::single_mode(2, t);
  u.a0 = std::sqrt(1 - t * t / 2) - 1;
  const ShapeRep e = ShapeRep::radial2d(u);
  const double trapezoid = [&] {
    const int m = 64;
    double s = 0;
    for (int j = 0; j < m; ++j) s += 0.5 * std::pow(1 + u.value(2 * kPi * j / m), 2);
    return s * 2 * kPi / m;
  }();
  CHECK(std::abs(volume(e) - kPi) < 1e-10);
  CHECK(std::abs(trapezoid - kPi) < 1e-10);

  CHECK_THROWS_AS(ShapeRep::polygon(Eigen::Matrix2Xd::Zero(2, 3)), ValidationError);
}

TEST_CASE("volume of the 3D grid ball and its barycenter") {
  const ShapeRep b = unit_ball(3, 16, 32);
  CHECK(volume(b) == doctest::Approx(4 * kPi / 3).epsilon(1e-13));
  CHECK(perimeter(b) == doctest::Approx(4 * kPi).epsilon(1e-13));
  const ShapeRep moved = translate(ball(make_point(0.1, -0.2, 0.3), 2.0, 16, 32), make_point(0, 0, 0));
  CHECK(volume(moved) == doctest::Approx(32 * kPi / 3).epsilon(1e-13));
  CHECK((barycenter(moved) - make_point(0.1, -0.2, 0.3)).norm() < 1e-13);
}

TEST_CASE("perimeter") {
  CHECK(perimeter(unit_ball()) == doctest::Approx(2 * kPi).epsilon(1e-14));
  CHECK(perimeter(square_area_pi()) == doctest::Approx(4 * kSqrtPi).epsilon(1e-15));
  CHECK(perimeter(hexagon_area_pi()) == doctest::Approx(kHexPerimeter).epsilon(1e-14));
  CHECK(kHexPerimeter == doctest::Approx(2 * std::sqrt(6 * kPi * std::tan(kPi / 6))).epsilon(1e-14));
}

TEST_CASE("regular N-gon perimeter closed form and O(N^-2) deficit decay") {
  double previous = 0;
  for (int sides : {8, 16, 32, 64, 128}) {
    const double p = perimeter(regular_polygon(sides, kPi));
    CHECK(p == doctest::Approx(2 * std::sqrt(kPi * sides * std::tan(kPi / sides))).epsilon(1e-13));
    const double d = p - 2 * kPi;
    if (previous > 0) CHECK(previous / d == doctest::Approx(4.0).epsilon(0.05));
    previous = d;
  }
}

TEST_CASE("boundary quadrature") {
  SUBCASE("unit circle") {
    const BoundaryQuadrature q = boundary_quadrature(unit_ball(), 256);
    CHECK(std::abs(q.total_weight() - 2 * kPi) < 1e-10);
    for (int i = 0; i < q.size(); ++i) {
      CHECK((q.normals.col(i) - q.points.col(i).normalized()).norm() < 1e-14);
    }
  }
  SUBCASE("square: 4 edges x 64 Gauss nodes") {
    const BoundaryQuadrature q = boundary_quadrature(square_area_pi(), 256);
    CHECK(q.size() == 256);
    CHECK(q.total_weight() == doctest::Approx(4 * kSqrtPi).epsilon(1e-15));
  }
  SUBCASE("closed-boundary identity and unit normals") {
    for (const ShapeRep& s : {hexagon_area_pi(), square_area_pi(),
                              ShapeRep::radial2d(FourierSeries::single_mode(3, 0.2, 0.1))}) {
      for (int nodes : {16, 100, 4096}) {
        const BoundaryQuadrature q = boundary_quadrature(s, nodes);
        CHECK(q.flux().norm() < 1e-12);
        CHECK((q.normals.colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-12);
        CHECK((q.weights.array() > 0).all());
      }
    }
  }
  SUBCASE("radial normals point outward") {
    const BoundaryQuadrature q =
        boundary_quadrature(ShapeRep::radial2d(FourierSeries::single_mode(4, 0.1)), 128);
    for (int i = 0; i < q.size(); ++i) CHECK(q.normals.col(i).dot(q.points.col(i)) > 0);
  }
  CHECK_THROWS_AS(boundary_quadrature(unit_ball(), 15), ValidationError);
}

TEST_CASE("barycenter") {
  CHECK(barycenter(unit_ball()).norm() < 1e-15);
  const ShapeRep moved = translate(square_area_pi(), make_point(0.3, 0));
  CHECK((barycenter(moved) - make_point(0.3, 0)).norm() < 1e-15);

  // u = t cos θ: x̄ = (t + t^3/4) / (1 + t^2/2) by hand, and a polar midpoint grid
  const double t = 0.05;
  const ShapeRep e = ShapeRep::radial2d(FourierSeries::single_mode(1, t));
  const double closed = (t + t * t * t / 4) / (1 + t * t / 2);
  const int m = 4000;
  double mx = 0, mv = 0;
  for (int j = 0; j < m; ++j) {
    const double th = 2 * kPi * (j + 0.5) / m;
    const double rho = 1 + t * std::cos(th);
    for (int k = 0; k < 400; ++k) {
      const double r = rho * (k + 0.5) / 400;
      const double da = r * (rho / 400) * (2 * kPi / m);
      mv += da;
      mx += r * std::cos(th) * da;
    }
  }
  const Point b = barycenter(e);
  CHECK(b[0] == doctest::Approx(closed).epsilon(1e-13));
  CHECK(b[0] == doctest::Approx(mx / mv).epsilon(1e-5));
  CHECK(std::abs(b[1]) < 1e-15);
}

TEST_CASE("rescale to unit volume") {
  CHECK(rescale_to_unit_volume(unit_ball()).second == doctest::Approx(1.0));
  CHECK(rescale_to_unit_volume(ball(make_point(0, 0), 2.0)).second == doctest::Approx(0.5));
  const auto [unit_square, lambda] = rescale_to_unit_volume(rectangle(1, 1));
  CHECK(lambda == doctest::Approx(kSqrtPi).epsilon(1e-15));
  CHECK(std::abs(volume(unit_square) - kPi) < 1e-10);
  CHECK(perimeter(unit_square) == doctest::Approx(4 * lambda).epsilon(1e-15));

  const ShapeRep wavy = ShapeRep::radial2d(FourierSeries::single_mode(5, 0.3), Eigen::Vector2d(1, 2));
  const auto [unit_wavy, mu] = rescale_to_unit_volume(wavy);
  CHECK(std::abs(volume(unit_wavy) - kPi) < 1e-10);
  CHECK(perimeter(unit_wavy) == doctest::Approx(mu * perimeter(wavy)).epsilon(1e-13));
}

TEST_CASE("scaling laws") {
  for (const ShapeRep& s : {hexagon_area_pi(), rectangle(0.3, 2.0)}) {
    for (double lambda : {0.1, 2.5, 7.0}) {
      const ShapeRep big = scale(s, lambda);
      CHECK(std::abs(volume(big) - lambda * lambda * volume(s)) < 1e-12 * volume(big));
      CHECK(std::abs(perimeter(big) - lambda * perimeter(s)) < 1e-12 * perimeter(big));
    }
  }
  const ShapeRep s3 = ShapeRep::radial3d([] {
    SphericalGrid g = SphericalGrid::zero(12, 24);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 24; ++j) g.values(i, j) = 0.05 * std::cos(g.colatitude(i)) * std::sin(g.longitude(j));
    return g;
  }());
  const ShapeRep s3big = scale(s3, 3.0);
  CHECK(volume(s3big) == doctest::Approx(27 * volume(s3)).epsilon(1e-13));
  CHECK(perimeter(s3big) == doctest::Approx(9 * perimeter(s3)).epsilon(1e-13));
}

TEST_CASE("translate") {
  const ShapeRep sq = translate(rectangle(2, 2), make_point(1, 1));
  Eigen::Matrix2Xd expected(2, 4);
  expected << 0, 2, 2, 0,
              0, 0, 2, 2;
  CHECK(sq.as_polygon().vertices == expected);

  const ShapeRep circle = polygonize(translate(unit_ball(), make_point(0.5, 0)), 4096);
  CHECK(circle.kind() == ShapeKind::Polygon2D);
  CHECK(std::abs(perimeter(circle) - 2 * kPi) < 1e-6);
  CHECK(std::abs(volume(circle) - kPi) < 1e-5);
  CHECK((barycenter(circle) - make_point(0.5, 0)).norm() < 1e-12);

  // round trip: exact up to one rounding of each coordinate
  const ShapeRep hex = hexagon_area_pi();
  const Point v = make_point(0.7, -0.3);
  const ShapeRep back = translate(translate(hex, v), -v);
  CHECK((back.as_polygon().vertices - hex.as_polygon().vertices).cwiseAbs().maxCoeff() < 4e-16);

  // radial graphs move exactly
  const ShapeRep wavy = ShapeRep::radial2d(FourierSeries::single_mode(3, 0.1));
  const ShapeRep moved = translate(wavy, v);
  CHECK(volume(moved) == volume(wavy));
  CHECK(perimeter(moved) == perimeter(wavy));

  CHECK_THROWS_AS(polygonize(translate(unit_ball(), v), 64), ValidationError);
}

TEST_CASE("symmetric difference with a ball") {
  const Point origin = make_point(0, 0);
  CHECK(sym_diff_with_ball(unit_ball(), BallSpec{origin, 1.0}) < 1e-12);

  SUBCASE("square and hexagon against circular-segment closed forms") {
    const double h = kSqrtPi / 2;
    CHECK(kSquareSymDiff == doctest::Approx(8 * oracle::segment_area(h)).epsilon(1e-14));
    const double apothem = std::sqrt(kPi / (6 * std::tan(kPi / 6)));
    CHECK(kHexSymDiff == doctest::Approx(12 * oracle::segment_area(apothem)).epsilon(1e-14));

    CHECK(sym_diff_with_ball(square_area_pi(), BallSpec{origin, 1.0}) ==
          doctest::Approx(kSquareSymDiff).epsilon(1e-13));
    CHECK(sym_diff_with_ball(hexagon_area_pi(), BallSpec{origin, 1.0}) ==
          doctest::Approx(kHexSymDiff).epsilon(1e-13));
  }

  SUBCASE("off-center ball against grid counting") {
    const ShapeRep hex = hexagon_area_pi();
    const Eigen::Vector2d c(0.3, -0.2);
    const double r = 0.8;
    const double count = oracle::grid_area(
        [&](double x, double y) {
          const bool in_b = (Eigen::Vector2d(x, y) - c).norm() < r;
          return in_b != oracle::in_convex(hex.as_polygon().vertices, x, y);
        },
        1.3, 3000);
    CHECK(sym_diff_with_ball(hex, BallSpec{Point(c), r}) == doctest::Approx(count).epsilon(2e-4));
  }

  SUBCASE("radial graph ray integration matches exact polygon clipping") {
    FourierSeries u = FourierSeries::single_mode(3, 0.1, 0.05);
    u.a0 = 0.02;
    const ShapeRep e = ShapeRep::radial2d(u, Eigen::Vector2d(0.1, 0.0));
    const ShapeRep poly = polygonize(e, 40000, 1e-8);
    for (const BallSpec& b : {BallSpec{make_point(0, 0), 1.0}, BallSpec{make_point(0.25, -0.1), 0.9},
                              BallSpec{make_point(1.2, 0.3), 0.5}, BallSpec{make_point(0.1, 0), 0.3}}) {
      CHECK(sym_diff_with_ball(e, b) == doctest::Approx(sym_diff_with_ball(poly, b)).epsilon(1e-7));
    }
  }

  SUBCASE("translation invariance") {
    const ShapeRep hex = hexagon_area_pi();
    const Point v = make_point(0.7, -0.3);
    const BallSpec b{make_point(0.05, 0.1), 1.0};
    const BallSpec bv{b.center + v, 1.0};
    CHECK(sym_diff_with_ball(translate(hex, v), bv) ==
          doctest::Approx(sym_diff_with_ball(hex, b)).epsilon(1e-13));
    const ShapeRep wavy = ShapeRep::radial2d(FourierSeries::single_mode(2, 0.1));
    CHECK(sym_diff_with_ball(translate(wavy, v), bv) ==
          doctest::Approx(sym_diff_with_ball(wavy, b)).epsilon(1e-12));
  }

  SUBCASE("symmetric in the two sets for a polygonized ball") {
    const Point c1 = make_point(0, 0), c2 = make_point(0.3, 0.1);
    const ShapeRep e1 = polygonize(ball(c1, 1.0), 20000);
    const ShapeRep e2 = polygonize(ball(c2, 1.0), 20000);
    CHECK(sym_diff_with_ball(e1, BallSpec{c2, 1.0}) ==
          doctest::Approx(sym_diff_with_ball(e2, BallSpec{c1, 1.0})).epsilon(1e-10));
  }

  SUBCASE("3D ball against a shifted ball") {
    const ShapeRep b = unit_ball(3, 64, 128);
    // two unit balls at distance d overlap in 2 caps: pi (4 + d)(2 - d)^2 / 12
    const double d = 0.3;
    const double lens = kPi * (4 + d) * (2 - d) * (2 - d) / 12;
    CHECK(intersection_with_ball(b, BallSpec{make_point(d, 0, 0), 1.0}) ==
          doctest::Approx(lens).epsilon(2e-3));
  }
}
