#include <doctest.h>

#include <cmath>

#include "pdfm/errors.hpp"
#include "pdfm/frechet.hpp"
#include "pdfm/wasserstein.hpp"
#include "support.hpp"

using namespace pdfm;

namespace {

const PersistenceDiagram kRed{{1, 4}, {3, 6}};
const PersistenceDiagram kBlack{{1, 6}, {3, 4}};

std::vector<PersistenceDiagram> square() { return {kRed, kBlack}; }

std::vector<PersistenceDiagram> two_clusters() {
  return {PersistenceDiagram{{0, 10}, {20, 30}}, PersistenceDiagram{{1, 10}, {21, 30}},
          PersistenceDiagram{{0, 11}, {20, 31}}};
}

}  // namespace

TEST_CASE("frechet function") {
  const PersistenceDiagram D{{0, 2}, {3, 7}};
  CHECK(frechet_function(D, std::vector{D}) == 0.0);
  CHECK(frechet_function({}, std::vector{D}) == doctest::Approx(std::pow(total_persistence(D), 2)));
  CHECK(frechet_function(PersistenceDiagram{{2, 4}, {2, 6}}, square()) == doctest::Approx(2.0));
  CHECK_THROWS_AS(frechet_function(D, std::vector<PersistenceDiagram>{}), ArityError);
}

TEST_CASE("turner on a single diagram") {
  const PersistenceDiagram D{{0, 2}, {3, 7}};
  const auto r = turner_mean(std::vector{D});
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.mean == D);
  CHECK(r.variance == 0.0);
  CHECK(r.init_descriptor == "diagram 1");
}

TEST_CASE("turner on the two-cluster instance") {
  const auto ds = two_clusters();
  const auto bf = brute_force_optimal_grouping(ds);
  CHECK(bf.optima_count == 1);
  const auto cert = certify_unique_mean(ds);
  REQUIRE(cert);
  for (std::size_t init = 0; init < ds.size(); ++init) {
    const auto r = turner_mean(ds, init);
    CHECK(r.converged);
    CHECK(r.unique_certified);
    CHECK(r.mean == cert->mean);
    CHECK(std::abs(r.variance - bf.variance) <= 1e-9);
    CHECK(std::abs(r.variance - variance_definitional(cert->grouping)) <= 1e-12);
  }
}

TEST_CASE("turner on the square") {
  const auto ds = square();
  for (std::size_t init = 0; init < 2; ++init) {
    const auto r = turner_mean(ds, init);
    CHECK(r.converged);
    CHECK_FALSE(r.unique_certified);
    CHECK(r.variance == doctest::Approx(2.0));
    CHECK(r.tie_detected);
  }
  CHECK_FALSE(certify_unique_mean(ds).has_value());
}

TEST_CASE("turner result invariants and monotone trace") {
  StreamRng rng(31337);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<PersistenceDiagram> ds;
    const std::size_t L = 1 + rng.below(3);
    std::size_t total = 0;
    for (std::size_t j = 0; j < L; ++j) {
      ds.push_back(testkit::random_diagram(rng, 3));
      total += ds.back().size();
    }
    const auto r = turner_mean(ds, rng.below(L));
    CHECK(std::abs(r.variance - variance_definitional(r.grouping)) <= 1e-12);
    CHECK(r.mean == mean_diagram(r.grouping));
    if (r.unique_certified) CHECK(check_flatness(r.grouping).flat);
    for (std::size_t i = 1; i < r.variance_trace.size(); ++i)
      CHECK(r.variance_trace[i] <= r.variance_trace[i - 1] + 1e-9);
    // The Fréchet function at the returned mean never exceeds the grouping variance.
    CHECK(frechet_function(r.mean, ds) <= r.variance + 1e-9);

    if (total <= kDefaultGroupingCap) {
      const auto bf = brute_force_optimal_grouping(ds);
      CHECK(r.variance >= bf.variance - 1e-9);
    }
  }
}

TEST_CASE("turner at a fixed point matches its own matchings") {
  StreamRng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<PersistenceDiagram> ds;
    for (int j = 0; j < 3; ++j) ds.push_back(testkit::random_diagram(rng, 3));
    const auto r = turner_mean(ds);
    if (!r.converged) continue;
    // Re-solving from the returned mean reproduces the grouping-induced cost.
    double induced = 0.0;
    for (std::size_t i = 0; i < r.grouping.row_count(); ++i) {
      const auto m = mean_point(r.grouping.row_entries(i), ds.size());
      for (std::size_t j = 0; j < ds.size(); ++j) induced += distance_squared(r.grouping.entry(i, j), m);
    }
    double solved = 0.0;
    for (const auto& d : ds) solved += w2_squared(r.mean, d);
    CHECK(std::abs(induced - solved) <= 1e-9);
  }
}

TEST_CASE("custom init and options") {
  const auto ds = two_clusters();
  const auto r = turner_mean(ds, PersistenceDiagram{{5, 25}});
  CHECK(r.init_descriptor == "custom diagram");
  CHECK_THROWS_AS(turner_mean(ds, std::size_t{3}), RangeError);
  CHECK_THROWS_AS(turner_mean(std::vector<PersistenceDiagram>{}), ArityError);

  TurnerOptions o;
  o.max_iters = 0;
  const auto capped = turner_mean(ds, PersistenceDiagram{{5, 25}}, o);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 0);
}

TEST_CASE("brute force optimal grouping") {
  const auto sq = brute_force_optimal_grouping(square());
  CHECK(sq.optima_count == 2);
  CHECK(std::abs(sq.variance - 2.0) <= 1e-12);

  const std::vector<PersistenceDiagram> near{PersistenceDiagram{{1, 2}, {4, 5}}, PersistenceDiagram{{2, 3}, {5, 6}}};
  const auto r = brute_force_optimal_grouping(near);
  CHECK(r.optima_count == 1);
  CHECK(r.variance == doctest::Approx(0.5));
  for (std::size_t i = 0; i < r.grouping.nontrivial_row_count(); ++i) CHECK(r.grouping.off_diagonal_count(i) == 1);

  std::vector<PersistenceDiagram> many(3, PersistenceDiagram{{0, 1}, {2, 5}, {3, 9}, {4, 6}});
  CHECK_THROWS_AS(brute_force_optimal_grouping(many), CapExceededError);
  std::vector<PersistenceDiagram> wide(4, PersistenceDiagram{{0, 1}});
  CHECK_THROWS_AS(brute_force_optimal_grouping(wide), CapExceededError);
}

TEST_CASE("certificate") {
  const auto one = certify_unique_mean(std::vector{PersistenceDiagram{{0, 2}}});
  REQUIRE(one);
  CHECK(one->mean == PersistenceDiagram{{0, 2}});

  const auto c = certify_unique_mean(two_clusters());
  REQUIRE(c);
  CHECK(c->report.flat);
  REQUIRE(c->report.feasible_interval);
  CHECK(c->report.feasible_interval->lo < c->report.feasible_interval->hi);
}
