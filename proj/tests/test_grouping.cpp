#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pdfm/errors.hpp"
#include "pdfm/frechet.hpp"
#include "pdfm/grouping.hpp"
#include "pdfm/grouping_io.hpp"
#include "support.hpp"

using namespace pdfm;

namespace {

const PersistenceDiagram kRed{{1, 4}, {3, 6}};
const PersistenceDiagram kBlack{{1, 6}, {3, 4}};

// rows {(1,4),(3,4)} and {(3,6),(1,6)}
Grouping square_grouping() { return Grouping({kRed, kBlack}, {{0, 1}, {1, 0}}); }
// rows {(1,4),(1,6)} and {(3,6),(3,4)}
Grouping square_alternative() { return Grouping({kRed, kBlack}, {{0, 0}, {1, 1}}); }

std::vector<PersistenceDiagram> three_points() {
  return {PersistenceDiagram{{0, 10}}, PersistenceDiagram{{1, 10}}, PersistenceDiagram{{0, 11}}};
}

std::vector<PersistenceDiagram> two_clusters() {
  return {PersistenceDiagram{{0, 10}, {20, 30}}, PersistenceDiagram{{1, 10}, {21, 30}},
          PersistenceDiagram{{0, 11}, {20, 31}}};
}

}  // namespace

TEST_CASE("grouping construction") {
  const auto g = square_grouping();
  CHECK(g.row_count() == 4);
  CHECK(g.column_count() == 2);
  CHECK(g.nontrivial_row_count() == 2);
  CHECK(g.is_trivial(2));
  CHECK(g.off_diagonal_count(0) == 2);

  CHECK_THROWS_AS(Grouping({kRed, kBlack}, {{0, 1}}), ValidationError);
  CHECK_THROWS_AS(Grouping({kRed, kBlack}, {{0, 1}, {0, 0}, {1, std::nullopt}}), ValidationError);
  CHECK_THROWS_AS(Grouping({kRed, kBlack}, {{0, 1}, {1, 2}}), ValidationError);
  CHECK_THROWS_AS(Grouping({kRed, kBlack}, {{0, 1, 0}, {1, 0}}), ValidationError);

  const Grouping diag_rows({kRed, kBlack}, {{0, std::nullopt}, {std::nullopt, 0}, {1, 1}});
  CHECK(diag_rows.row_count() == 4);
  CHECK(diag_rows.nontrivial_row_count() == 3);
}

TEST_CASE("mean point") {
  const std::vector<DiagramEntry> both{PlanePoint(1, 4), PlanePoint(1, 6)};
  CHECK(mean_point(both, 2).point() == PlanePoint(1, 5));

  const std::vector<DiagramEntry> mixed{PlanePoint(0, 2), DiagramEntry::diagonal()};
  CHECK(mean_point(mixed, 2).point() == PlanePoint(0.5, 1.5));

  const std::vector<DiagramEntry> none{DiagramEntry::diagonal(), DiagramEntry::diagonal()};
  CHECK(mean_point(none, 2).is_diagonal());

  CHECK_THROWS_AS(mean_point(both, 3), ArityError);
}

TEST_CASE("mean diagram") {
  CHECK(mean_diagram(square_grouping()) == PersistenceDiagram{{2, 4}, {2, 6}});

  const PersistenceDiagram D{{0, 2}, {1, 5}, {1, 5}};
  const Grouping same({D, D, D}, {{0, 0, 0}, {1, 2, 1}, {2, 1, 2}});
  CHECK(mean_diagram(same) == D);
  CHECK(variance_definitional(same) == 0.0);
  CHECK(variance_closed_form(same) == 0.0);

  const Grouping single({D}, {{0}, {1}, {2}});
  CHECK(mean_diagram(single) == D);

  std::size_t dropped = 99;
  mean_diagram(square_grouping(), &dropped);
  CHECK(dropped == 0);
}

TEST_CASE("variance reference values") {
  CHECK(variance_definitional(square_grouping()) == 2.0);
  CHECK(variance_closed_form(square_grouping()) == 2.0);
  CHECK(variance_definitional(square_alternative()) == 2.0);
  CHECK(variance_closed_form(square_alternative()) == 2.0);

  const Grouping mixed({PersistenceDiagram{{0, 2}}, PersistenceDiagram{}}, {{0, std::nullopt}});
  CHECK(variance_definitional(mixed) == 0.5);
  CHECK(variance_closed_form(mixed) == 0.5);
  CHECK(mean_diagram(mixed) == PersistenceDiagram{{0.5, 1.5}});
}

TEST_CASE("variance formulas agree with each other and the oracle") {
  StreamRng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const auto g = testkit::random_grouping(rng, 4, 4);
    const double def = variance_definitional(g);
    CHECK(std::abs(def - variance_closed_form(g)) <= 1e-9);
    CHECK(std::abs(def - oracle::grouping_variance(testkit::raw_rows(g))) <= 1e-9);
  }
}

TEST_CASE("row permutation invariance") {
  StreamRng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = testkit::random_grouping(rng, 3, 4);
    auto rows = g.rows();
    std::reverse(rows.begin(), rows.end());
    const Grouping h(g.diagrams(), rows);
    CHECK(mean_diagram(g) == mean_diagram(h));
    CHECK(std::abs(variance_definitional(g) - variance_definitional(h)) <= 1e-12);
    CHECK(std::abs(variance_closed_form(g) - variance_closed_form(h)) <= 1e-12);
    CHECK(same_assignment(g, h));
  }
}

TEST_CASE("flatness of the three-point cluster") {
  const Grouping g(three_points(), {{0, 0, 0}});
  const auto r = check_flatness(g);
  CHECK(r.flat);
  CHECK(r.reason.empty());
  CHECK(r.max_diameter == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.min_diagonal_clearance == doctest::Approx(9.0 / std::sqrt(2.0)));
  CHECK(std::isinf(r.min_inter_distance));
  REQUIRE(r.feasible_interval);
  CHECK(r.feasible_interval->lo == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.feasible_interval->hi == doctest::Approx(9.0 / std::sqrt(2.0)));
  REQUIRE(r.witness_lambda);
  CHECK(*r.witness_lambda == doctest::Approx((std::sqrt(2.0) + 9.0 / std::sqrt(2.0)) / 2));
}

TEST_CASE("square groupings are not flat") {
  for (const auto& g : {square_grouping(), square_alternative()}) {
    const auto r = check_flatness(g);
    CHECK_FALSE(r.flat);
    CHECK_FALSE(r.feasible_interval.has_value());
    CHECK(r.max_diameter >= r.min_inter_distance);
  }
  CHECK_FALSE(find_flat_grouping(std::vector{kRed, kBlack}).has_value());
}

TEST_CASE("mixed selections are never flat") {
  const Grouping g({PersistenceDiagram{{0, 10}}, PersistenceDiagram{}}, {{0, std::nullopt}});
  const auto r = check_flatness(g);
  CHECK_FALSE(r.flat);
  CHECK(r.reason.find("mixed selection") != std::string::npos);
}

TEST_CASE("find flat grouping") {
  const auto ds = two_clusters();
  const auto g = find_flat_grouping(ds);
  REQUIRE(g);
  CHECK(check_flatness(*g).flat);
  CHECK(g->nontrivial_row_count() == 2);
  const Grouping expected(ds, {{0, 0, 0}, {1, 1, 1}});
  CHECK(same_assignment(*g, expected));

  const auto single = find_flat_grouping(std::vector{PersistenceDiagram{{0, 10}, {20, 40}, {50, 55}}});
  REQUIRE(single);
  CHECK(single->nontrivial_row_count() == 3);

  CHECK_FALSE(find_flat_grouping(std::vector{PersistenceDiagram{{0, 10}}, PersistenceDiagram{{0, 10}, {20, 30}}}));
}

TEST_CASE("flat groupings are structured and strictly optimal") {
  StreamRng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t L = 1 + rng.below(3), k = 1 + rng.below(3);
    const auto inst = testkit::random_flat_instance(rng, L, k);
    const auto g = find_flat_grouping(inst.diagrams);
    REQUIRE(g);
    for (std::size_t i = 0; i < g->nontrivial_row_count(); ++i) CHECK(g->off_diagonal_count(i) == L);
    CHECK(mean_diagram(*g).size() == g->nontrivial_row_count());

    const auto bf = brute_force_optimal_grouping(inst.diagrams);
    CHECK(bf.optima_count == 1);
    CHECK(same_assignment(bf.grouping, *g));
    CHECK(std::abs(bf.variance - variance_definitional(*g)) <= 1e-12);
  }
}

TEST_CASE("grouping json round trip") {
  const auto ds = two_clusters();
  const Grouping g(ds, {{1, 1, std::nullopt}, {0, 0, 0}, {std::nullopt, std::nullopt, 1}});
  const auto j = grouping_to_json(g);
  CHECK(j["L"] == 3);
  CHECK(j["rows"].size() == 3);
  CHECK(j["rows"][0][2] == "diag");
  const auto back = grouping_from_json(j, ds);
  CHECK(back.rows() == g.rows());

  CHECK_THROWS_AS(grouping_from_json(nlohmann::json::parse(R"({"L": 2, "rows": []})"), ds), Error);
  CHECK_THROWS_AS(grouping_from_json(nlohmann::json::parse(R"({"L": 3, "rows": [["x", 0, 0]]})"), ds), Error);
}
