#include "isoq/geometry.hpp"
#include "isoq/harness.hpp"

#include <doctest.h>

#include <sstream>

using namespace isoq;
using nlohmann::json;

namespace {

std::vector<CorpusRow> run(const char* spec, int threads = 1) {
  return run_corpus(expand_corpus(json::parse(spec)), {}, {}, threads);
}

std::vector<CsvRecord> round_trip(const std::vector<CorpusRow>& rows) {
  std::stringstream s;
  write_corpus_csv(s, rows);
  return read_csv(s);
}

}  // namespace

TEST_CASE("corpus expansion") {
  const std::vector<CorpusEntry> e = expand_corpus(json::parse(R"({
    "nodes": [512, 1024],
    "shapes": [{"generator": "rectangle", "aspect": [1, 2, 3]},
               {"generator": "ellipse", "aspect": 2, "vertices": [64, 128]},
               {"generator": "random-fourier", "count": 3, "seed": 4},
               {"generator": "triangle"}]})"));
  REQUIRE(e.size() == 2 * (3 + 2 + 3 + 1));
  CHECK(e[0].id == "rectangle/aspect=1");
  CHECK(e[0].nodes == 512);
  CHECK(e[9].id == e[0].id);
  CHECK(e[9].nodes == 1024);
  CHECK(e[5].id == "random-fourier/count=3/seed=4/#0");
  CHECK(e[8].family == "triangle");
  CHECK(!e[8].shape);
  CHECK(e[8].error.find("unknown generator") != std::string::npos);
  for (const CorpusEntry& x : e)
    if (x.shape) CHECK(volume(*x.shape) == doctest::Approx(kPi).epsilon(1e-12));

  CHECK_THROWS_AS(expand_corpus(json::parse(R"({"shapes": 3})")), ValidationError);
  CHECK_THROWS_AS(expand_corpus(json::parse(R"({"shapes": [{"aspect": 2}]})")), ValidationError);
  CHECK_THROWS_AS(expand_corpus(json::parse(R"({"nodes": 8, "shapes": []})")), ValidationError);
  CHECK_THROWS_AS(expand_corpus(json::parse(R"({"shapes": [{"generator": "square", "rotate": "x"}]})")),
                  ValidationError);

  const std::vector<CorpusEntry> d = expand_corpus(default_corpus_spec());
  CHECK(d.size() >= 30);
  for (const CorpusEntry& x : d) {
    REQUIRE(x.shape);
    CHECK(x.shape->dim() == 2);
  }
}

TEST_CASE("generated shapes") {
  // stadium: |E| = 2L + π, P = 2L + 2π; polygon sampling loses O(m^-2)
  const std::vector<CorpusEntry> s = expand_corpus(json::parse(
      R"({"shapes": [{"generator": "stadium", "length": 2, "vertices": 4000}]})"));
  const double lambda = std::sqrt(kPi / (4 + kPi));
  CHECK(perimeter(*s[0].shape) == doctest::Approx(lambda * (4 + 2 * kPi)).epsilon(1e-6));

  // ellipse with aspect 1 is the dense regular polygon
  const std::vector<CorpusEntry> c = expand_corpus(json::parse(
      R"({"shapes": [{"generator": "ellipse", "aspect": 1, "vertices": 360}]})"));
  CHECK(perimeter(*c[0].shape) ==
        doctest::Approx(perimeter(regular_polygon(360, kPi))).epsilon(1e-13));

  const std::vector<CorpusEntry> b = expand_corpus(json::parse(
      R"({"shapes": [{"generator": "perturbed-ball", "mode": 2, "amplitude": 0.1, "dim": 3, "nlat": 16, "nlon": 32}]})"));
  REQUIRE(b[0].shape);
  CHECK(b[0].shape->dim() == 3);
  CHECK(volume(*b[0].shape) == doctest::Approx(4 * kPi / 3).epsilon(1e-10));
}

TEST_CASE("rotation") {
  FourierSeries u = FourierSeries::zero(3);
  u.a << 0.0, 0.1, 0.0;
  u.b << 0.0, 0.02, 0.05;
  const ShapeRep g = ShapeRep::radial2d(u, Eigen::Vector2d(0.2, -0.1));
  const double phi = 0.7;
  const ShapeRep r = rotate(g, phi);
  const RadialGraph2D& rg = r.as_radial2d();
  const Eigen::Vector2d c = Eigen::Rotation2Dd(phi) * Eigen::Vector2d(0.2, -0.1);
  CHECK((rg.center - c).norm() < 1e-15);
  for (int j = 0; j < 20; ++j) {
    const double th = 0.31 * j;
    CHECK(rg.u.value(th) == doctest::Approx(u.value(th - phi)).epsilon(1e-14));
  }
  const ShapeRep sq = rotate(rectangle(1, 1), kPi / 4);
  CHECK(sq.as_polygon().vertices.col(0).x() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(rotate(unit_ball(3, 8, 16), 0.1), ValidationError);
}

TEST_CASE("regular polygons: D decreases with the side count") {
  const std::vector<CorpusRow> rows = run(R"({"nodes": 4096, "shapes": [{"generator": "regular-ngon", "sides": [3, 4, 5, 6, 7, 8, 9, 10, 11, 12]}]})");
  REQUIRE(rows.size() == 10);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(rows[i].report);
    CHECK(rows[i].status == RowStatus::Ok);
    // D_N = 2 sqrt(πN tan(π/N)) - 2π
    const double n = static_cast<double>(i + 3);
    CHECK(rows[i].report->D == doctest::Approx(2 * std::sqrt(kPi * n * std::tan(kPi / n)) - 2 * kPi).epsilon(1e-12));
    if (i) CHECK(rows[i].report->D < rows[i - 1].report->D);
  }
}

TEST_CASE("square row matches its panel") {
  const std::vector<CorpusRow> rows = run(R"({"shapes": [{"generator": "square"}]})");
  REQUIRE(rows.size() == 1);
  const FunctionalReport& r = *rows[0].report;
  CHECK(r.beta * r.beta == doctest::Approx(0.8410393700252762).epsilon(1e-4));
  CHECK(r.gamma == doctest::Approx(6.248776033596788).epsilon(1e-4));
  CHECK(r.D == doctest::Approx(0.8066300964424776).epsilon(1e-4));
  CHECK(r.alpha == doctest::Approx(0.5689171008196038).epsilon(1e-4));
  CHECK(r.sp_lhs - r.sp_rhs == doctest::Approx(0.02530294915026844).epsilon(1e-4));
}

TEST_CASE("unperturbed ball: every index vanishes") {
  const std::vector<CorpusRow> rows = run(R"({"shapes": [{"generator": "perturbed-ball", "mode": 2, "amplitude": 0}]})");
  const FunctionalReport& r = *rows[0].report;
  CHECK(rows[0].status == RowStatus::Ok);
  CHECK(std::abs(r.D) <= 1e-7);
  CHECK(r.beta <= 1e-7);
  CHECK(r.alpha <= 1e-7);
  CHECK(r.A <= 1e-7);
  CHECK(*rows[0].W12 == 0.0);
}

TEST_CASE("CSV is thread-independent and round-trips") {
  const char* spec = R"({"nodes": 1024, "shapes": [
      {"generator": "regular-ngon", "sides": [5, 7]},
      {"generator": "random-fourier", "count": 3, "scale": 0.1, "seed": 9},
      {"generator": "ellipse", "aspect": 2, "rotate": 0.4, "translate": [1, 2]},
      {"generator": "rectangle", "aspect": -1}]})";
  std::stringstream one, four;
  write_corpus_csv(one, run(spec, 1));
  write_corpus_csv(four, run(spec, 4));
  CHECK(one.str() == four.str());
  CHECK(one.str().find('\r') == std::string::npos);

  const std::vector<CsvRecord> rec = read_csv(one);
  REQUIRE(rec.size() == 7);
  CHECK(rec.front().size() == corpus_prefix_columns().size() + report_csv_columns().size());
  CHECK(rec[6].at("status") == "error");
  CHECK(rec[6].at("D").empty());
  CHECK(rec[2].at("family") == "random-fourier");
  CHECK(!rec[2].at("W12").empty());
  CHECK(rec[0].at("W12").empty());

  std::istringstream quoted("a,b\n\"x, \"\"y\"\"\",2\n");
  const std::vector<CsvRecord> q = read_csv(quoted);
  CHECK(q[0].at("a") == "x, \"y\"");
  std::istringstream ragged("a,b\n1\n");
  CHECK_THROWS_AS(read_csv(ragged), ValidationError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_csv(empty), ValidationError);
}

TEST_CASE("estimate_constants") {
  SUBCASE("ball only: no valid rows") {
    const std::vector<CsvRecord> rows =
        round_trip(run(R"({"shapes": [{"generator": "perturbed-ball", "mode": 2, "amplitude": 0}]})"));
    CHECK_THROWS_AS(estimate_constants(rows), ValidationError);
  }
  SUBCASE("square and hexagon") {
    const json c = estimate_constants(
        round_trip(run(R"({"shapes": [{"generator": "square"}, {"generator": "regular-ngon", "sides": 6}]})")));
    // (A + sqrt D) / beta from the frozen hexagon panel
    const double hex = (1.0345425302236461 + std::sqrt(0.31463135756801989)) / std::sqrt(0.32048135108702417);
    CHECK(hex == doctest::Approx(2.815).epsilon(2e-3));
    CHECK(c["C_prop"]["id"] == "square");
    CHECK(c["worst_offenders"][1]["id"] == "regular-ngon/sides=6");
    CHECK(c["worst_offenders"][1]["ratio_prop"].get<double>() == doctest::Approx(hex).epsilon(1e-6));
    CHECK(c["C0"].is_null());
    CHECK(c["mode2_lower_bound"].is_null());
  }
  SUBCASE("mode-2 family reproduces 32/(3π)") {
    const json c = estimate_constants(round_trip(run(R"({"nodes": [2048, 4096], "shapes": [
        {"generator": "perturbed-ball", "mode": 2, "amplitude": [0.04, 0.02, 0.01]}]})")));
    const json& s = c["mode2_lower_bound"];
    CHECK(s["id"] == "perturbed-ball/amplitude=0.01/mode=2");
    CHECK(s["alpha2_over_D"].get<double>() == doctest::Approx(32 / (3 * kPi)).epsilon(0.05));
    CHECK(s["C_main_at_least"] == true);
    CHECK(c["fuglede_c"]["value"].get<double>() == doctest::Approx(0.3).epsilon(0.02));
    // amplitude 0.04 has W^{1,∞} = 0.12, outside the sub-corpus
    CHECK(c["C0"]["value"].get<double>() <= c["C_main"]["value"].get<double>());
    CHECK(c["C0"]["id"] != "perturbed-ball/amplitude=0.04/mode=2");
    CHECK(c["resolution_deltas"].size() == 3);
    CHECK(c["max_rel_delta_A2_D"].get<double>() < 0.02);
  }
}

TEST_CASE("refinement study") {
  SUBCASE("circle perimeter is exact at every N") {
    const RefinementTable t = refinement_study(unit_ball(), {512, 1024, 2048, 4096}, 2 * kPi, 2 * kPi);
    for (const RefinementRow& r : t.rows) {
      CHECK(std::abs(r.P - 2 * kPi) <= 1e-12);
      CHECK(std::abs(r.gamma - 2 * kPi) <= 1e-12);
    }
    CHECK(std::isnan(t.observed_order_P));
  }
  SUBCASE("square residual") {
    const RefinementTable t = refinement_study(rectangle(1, 1), {1024, 4096});
    CHECK(t.rows.back().residual <= 1e-6 * t.rows.back().P);
  }
  SUBCASE("smooth star converges fast") {
    FourierSeries u = FourierSeries::zero(5);
    u.a[2] = 0.2;
    u.b[4] = 0.05;
    const RefinementTable t = refinement_study(ShapeRep::radial2d(u), {16, 32, 64, 128});
    CHECK(t.rows[1].order_P > 4);
    CHECK(std::abs(t.rows[2].P - t.rows[3].P) < 1e-6);
  }
  CHECK_THROWS_AS(refinement_study(unit_ball(), {1024, 512}), ValidationError);
  CHECK_THROWS_AS(refinement_study(unit_ball(), {}), ValidationError);
}
