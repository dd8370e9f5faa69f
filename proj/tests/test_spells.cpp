#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "monsoon/spells.hpp"
#include "support.hpp"

using namespace monsoon;

TEST_CASE("find_runs respects seasons and min_run") {
  const auto cal = CalendarIndex::seasons(2000, 2, 4);
  const std::vector<unsigned char> mask{0, 1, 1, 1, 1, 1, 0, 1};
  const auto all = find_runs(mask, cal, 1);
  CHECK(all == std::vector<Run>{{1, 3}, {4, 5}, {7, 7}});
  CHECK(find_runs(mask, cal, 3) == std::vector<Run>{{1, 3}});
}

TEST_CASE("threshold definition on a hand example") {
  // mean 4, population sd sqrt(15): active needs Y >= 7.87, break Y < 0.13.
  const std::vector<double> y{1, 1, 9, 9, 9, 1, 1, 1};
  const auto cal = CalendarIndex::seasons(2000, 1, 8);
  const auto ab = act_brk_threshold(y, cal, 3);
  CHECK(ab.thresholds.mean == doctest::Approx(4.0));
  CHECK(ab.thresholds.sd == doctest::Approx(std::sqrt(15.0)));
  CHECK(ab.active.spells == std::vector<Run>{{2, 4}});
  CHECK(ab.active.days == std::vector<int>{2, 3, 4});
  CHECK(ab.brk.spells.empty());
  CHECK(std::string(to_string(ab.brk.kind)) == "break");
}

TEST_CASE("active days shorter than min_run are not spells") {
  const std::vector<double> y{0, 0, 0, 10, 10, 0, 0, 0, 0, 0};
  const auto cal = CalendarIndex::seasons(2000, 1, 10);
  const auto ab = act_brk_threshold(y, cal, 3);
  CHECK(ab.active.spells.empty());
  CHECK(ab.active.days == std::vector<int>{3, 4});
}

TEST_CASE("constant aggregate is degenerate") {
  const std::vector<double> y(6, 5.0);
  const auto ab = act_brk_threshold(y, CalendarIndex::seasons(2000, 1, 6), 1);
  CHECK(ab.thresholds.degenerate);
  CHECK(ab.active.days.empty());
  CHECK(ab.brk.days.empty());
}

TEST_CASE("cluster definition") {
  AggregateThresholds th{10.0, 2.0, false};
  const std::map<int, double> mu{{0, 13.0}, {1, 12.0}, {2, 8.0}, {3, 9.0}};
  const auto cls = classify_clusters(mu, th);
  CHECK(cls.active == std::vector<int>{0, 1});
  CHECK(cls.brk == std::vector<int>{2});

  const auto cal = CalendarIndex::seasons(2000, 1, 8);
  const std::vector<int> u{0, 1, 0, 3, 2, 2, 2, 5};
  const std::vector<double> y{20, 20, 20, 10, 0, 0, 0, 10};
  // mean 10, sd sqrt(75): active needs mu_k >= 18.66, break mu_k <= 1.34.
  const std::map<int, double> mu_y{{0, 20.0}, {1, 19.0}, {2, 0.0}, {3, 9.0}};
  const auto ab = act_brk_cluster(u, mu_y, y, cal, 3);
  CHECK(ab.active.spells == std::vector<Run>{{0, 2}});
  CHECK(ab.brk.spells == std::vector<Run>{{4, 6}});
}

TEST_CASE("local spells per location") {
  BinaryMatrix z(2, 6, 0);
  for (std::size_t t : {0u, 1u, 4u}) z(0, t) = 1;
  const auto cal = CalendarIndex::seasons(2000, 2, 3);
  const auto ls = local_spells(z, cal, 1);
  CHECK(ls.wet[0].spells == std::vector<Run>{{0, 1}, {4, 4}});
  CHECK(ls.dry[0].spells == std::vector<Run>{{2, 2}, {3, 3}, {5, 5}});
  CHECK(ls.mean_wet_length[0] == doctest::Approx(1.5));
  CHECK(ls.mean_wet_length[1] == 0.0);
  CHECK(ls.mean_dry_length[1] == doctest::Approx(3.0));
  CHECK(ls.wet[1].scale_id == 1);
}

TEST_CASE("regional spells use the canonical series") {
  const auto cal = CalendarIndex::seasons(2000, 1, 5);
  std::map<int, std::vector<unsigned char>> cds{{2, {1, 1, 0, 0, 0}}};
  const auto r = regional_spells(cds, cal, 2);
  REQUIRE(r.size() == 1);
  CHECK(r[0].region == 2);
  CHECK(r[0].wet.spells == std::vector<Run>{{0, 1}});
  CHECK(r[0].dry.spells == std::vector<Run>{{2, 4}});
}

TEST_CASE("spell comparison statistics") {
  RainfallField f{GridGeometry::lattice(1, 2), CalendarIndex::seasons(2000, 1, 4), Matrix<double>(2, 4)};
  const double vals[2][4] = {{4, 0, 2, 2}, {0, 0, 2, 6}};
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t t = 0; t < 4; ++t) f.x(s, t) = vals[s][t];
  SpellSet a{SpellKind::active, SpellScale::all_india, 0, {0, 3}, {}};
  SpellSet b{SpellKind::active, SpellScale::all_india, 0, {3}, {}};
  const auto cmp = compare_spells(a, b, f);
  CHECK(cmp.intersection == 1);
  CHECK(cmp.a.mean_rain_per_grid == doctest::Approx((2.0 + 4.0) / 2));
  // Location means: 2 and 2. Day 0 has one location above, day 3 has one.
  CHECK(cmp.a.mean_above_mean_locations == doctest::Approx(1.0));
  SpellSet c{SpellKind::active, SpellScale::grid, 0, {}, {}};
  CHECK_THROWS(compare_spells(a, c, f));
}

TEST_CASE("coherence fractions") {
  // 1x2 lattice over one 3-day season.
  BinaryMatrix z(2, 3, 0);
  z(0, 0) = z(0, 1) = z(1, 0) = 1;
  const auto c = coherence_stats(z, GridGeometry::lattice(1, 2), CalendarIndex::seasons(2000, 1, 3));
  CHECK(c.neighbor_agreement == doctest::Approx(2.0 / 3));
  CHECK(c.day_persistence == doctest::Approx(2.0 / 4));
  const auto none = coherence_stats(BinaryMatrix(1, 1, 0), GridGeometry::lattice(1, 1),
                                    CalendarIndex::seasons(2000, 1, 1));
  CHECK(std::isnan(none.neighbor_agreement));
  CHECK(std::isnan(none.day_persistence));
}

TEST_CASE("threshold discretisation modes") {
  RainfallField f{GridGeometry::lattice(1, 1), CalendarIndex::seasons(2000, 1, 3), Matrix<double>(1, 3)};
  f.x(0, 0) = 1;
  f.x(0, 1) = 6;
  f.x(0, 2) = 5;
  const auto local = threshold_discretize(f, ThresholdMode::local());
  CHECK(local(0, 0) == 0);
  CHECK(local(0, 1) == 1);
  CHECK(local(0, 2) == 1);
  const auto fixed = threshold_discretize(f, ThresholdMode::fixed(5.0));
  CHECK(fixed(0, 1) == 1);
  CHECK(fixed(0, 2) == 0);
}
