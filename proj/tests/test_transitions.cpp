#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "monsoon/rng.hpp"
#include "monsoon/transitions.hpp"
#include "support.hpp"

using namespace monsoon;

TEST_CASE("collapse_runs") {
  const std::vector<int> seq{1, 3, 3, 4, 4, 4, 5};
  CHECK(collapse_runs(seq) == std::vector<int>{1, 3, 4, 5});
  CHECK(collapse_runs(std::vector<int>{}).empty());
  SplitMix64 g(3);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<int> s(g.below(30));
    for (auto& x : s) x = static_cast<int>(g.below(3));
    const auto once = collapse_runs(s);
    CHECK(collapse_runs(once) == once);
    for (std::size_t i = 1; i < once.size(); ++i) CHECK(once[i] != once[i - 1]);
  }
}

TEST_CASE("transition estimate from a hand-counted sequence") {
  const auto cal = CalendarIndex::seasons(2000, 2, 4);
  // Season 1: 0 0 1 1, season 2: 1 0 0 9 (9 is not a listed label).
  const std::vector<int> u{0, 0, 1, 1, 1, 0, 0, 9};
  const auto m = estimate_transitions(u, cal, {0, 1});
  // Pairs: 0->0, 0->1, 1->1, 1->0, 0->0; 0->9 is dropped.
  CHECK(m.counts(0, 0) == 2);
  CHECK(m.counts(0, 1) == 1);
  CHECK(m.counts(1, 0) == 1);
  CHECK(m.counts(1, 1) == 1);
  CHECK(m.matrix(0, 0) == doctest::Approx(2.0 / 3));
  CHECK(m.matrix(1, 1) == doctest::Approx(0.5));
  const auto cross = estimate_transitions(u, cal, {0, 1}, true);
  CHECK(cross.counts(1, 1) == 2);
  CHECK(m.index_of(1) == 1);
  CHECK(m.index_of(9) == -1);
}

TEST_CASE("rows without data become uniform and are flagged") {
  const auto cal = CalendarIndex::seasons(2000, 1, 3);
  const std::vector<int> u{0, 0, 1};
  const auto m = estimate_transitions(u, cal, {0, 1, 2});
  CHECK(m.empty_rows == std::vector<bool>{false, true, true});
  CHECK(m.matrix(2, 0) == doctest::Approx(1.0 / 3));
  CHECK_THROWS(estimate_transitions(u, cal, {}));
}

TEST_CASE("zero diagonal, family order and permutations") {
  Matrix<double> m(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = static_cast<double>(i * 3 + j);
  const auto zd = zero_diagonal(m);
  CHECK(zd(1, 1) == 0.0);
  CHECK(zd(1, 2) == 5.0);
  const auto order = family_order({7, 8, 9}, {{7, 3}, {8, 1}, {9, 3}});
  CHECK(order == std::vector<std::size_t>{1, 0, 2});
  const auto p = permute(m, order);
  CHECK(p(0, 0) == m(1, 1));
  CHECK(p(0, 1) == m(1, 0));
  const auto inv = inverse_permutation(order);
  CHECK(permute(p, inv) == m);
}

TEST_CASE("frequent subsequences against naive enumeration") {
  SplitMix64 g(8);
  for (int rep = 0; rep < 50; ++rep) {
    const int seasons = 1 + static_cast<int>(g.below(3));
    const int len = 1 + static_cast<int>(g.below(15));
    const auto cal = CalendarIndex::seasons(2000, seasons, len);
    std::vector<int> u(cal.size());
    for (auto& x : u) x = static_cast<int>(g.below(4)) - 1;  // -1 is the sink
    std::map<std::vector<int>, long> naive;
    for (int s = 0; s < seasons; ++s) {
      std::vector<std::vector<int>> segments(1);
      for (int t = 0; t < len; ++t) {
        const int l = u[static_cast<std::size_t>(s * len + t)];
        if (l < 0) {
          segments.emplace_back();
          continue;
        }
        auto& seg = segments.back();
        if (seg.empty() || seg.back() != l) seg.push_back(l);
      }
      for (const auto& seg : segments)
        for (std::size_t i = 0; i + 3 <= seg.size(); ++i)
          ++naive[{seg.begin() + static_cast<long>(i), seg.begin() + static_cast<long>(i) + 3}];
    }
    const auto got = frequent_ksubseq(u, cal, 3, 0);
    std::map<std::vector<int>, long> as_map;
    for (const auto& sc : got) as_map[sc.window] = sc.count;
    CHECK(as_map == naive);
    for (std::size_t i = 1; i < got.size(); ++i) {
      CHECK(got[i - 1].count >= got[i].count);
      if (got[i - 1].count == got[i].count) CHECK(got[i - 1].window < got[i].window);
    }
  }
  const auto cal = CalendarIndex::seasons(2000, 1, 8);
  const std::vector<int> u{1, 2, 3, 1, 2, 3, 1, 2};
  CHECK(frequent_ksubseq(u, cal, 3, 2).size() == 2);
  CHECK(frequent_ksubseq(u, cal, 3, 1)[0].window == std::vector<int>{1, 2, 3});
}

TEST_CASE("pattern spells") {
  const auto cal = CalendarIndex::seasons(2000, 2, 4);
  const std::vector<int> u{0, 0, 1, 0, 0, 1, 1, 1};
  const auto st = pattern_spell_stats(u, cal, {0, 1});
  CHECK(st.spell_count.at(0) == 3);
  CHECK(st.mean_length.at(0) == doctest::Approx(4.0 / 3));
  CHECK(st.spells_per_season.at(0) == doctest::Approx(1.5));
  CHECK(st.days.at(1) == 4);
  CHECK(st.mean_length.at(1) == doctest::Approx(2.0));
}

TEST_CASE("stationary distribution of a two-state chain") {
  Matrix<double> m(2, 2);
  m(0, 0) = 0.9;
  m(0, 1) = 0.1;
  m(1, 0) = 0.2;
  m(1, 1) = 0.8;
  const auto pi = stationary_distribution(m);
  CHECK(pi[0] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(pi[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("simulated season emits CRPs and is seeded") {
  TransitionModel model;
  model.labels = {4, 6};
  model.matrix = Matrix<double>(2, 2, 0.5);
  Matrix<double> crp(2, 3);
  crp(0, 0) = 1;
  crp(1, 2) = 7;
  const std::vector<double> init{1.0, 0.0};
  const auto a = simulate_season(model, crp, init, 50, 9);
  const auto b = simulate_season(model, crp, init, 50, 9);
  CHECK(a.labels == b.labels);
  CHECK(a.labels[0] == 4);
  for (std::size_t t = 0; t < 50; ++t) {
    const std::size_t row = a.labels[t] == 4 ? 0 : 1;
    for (std::size_t s = 0; s < 3; ++s) CHECK(a.rain(s, t) == crp(row, s));
  }
}

TEST_CASE("transition csv round trip and validation") {
  testing::TempDir dir("transitions");
  Matrix<double> m(2, 2);
  m(0, 0) = 0.25;
  m(0, 1) = 0.75;
  m(1, 0) = 1.0 / 3;
  m(1, 1) = 2.0 / 3;
  write_transition_csv(dir.path / "t.csv", {3, 5}, m, "stamp");
  const auto back = read_transition_csv(dir.path / "t.csv");
  CHECK(back.labels == std::vector<int>{3, 5});
  CHECK(back.matrix == m);
  write_transition_csv(dir.path / "bad.csv", {3, 5}, zero_diagonal(m), "stamp");
  CHECK_THROWS_AS(read_transition_csv(dir.path / "bad.csv"), DataError);
}
