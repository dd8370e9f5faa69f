#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "monsoon/synth.hpp"

using namespace monsoon;

TEST_CASE("banded spec is valid and disjoint") {
  const auto spec = banded_synth_spec(8, 8, 4, 2);
  CHECK_NOTHROW(spec.validate());
  for (std::size_t s = 0; s < 64; ++s) {
    int dominant = 0;
    for (std::size_t k = 0; k < 4; ++k) dominant += spec.pattern_wet_probs(k, s) > 0.5;
    CHECK(dominant == 1);
    CHECK(spec.pattern_wet_probs(s / 16, s) == 0.9);
  }
}

TEST_CASE("synth_generate shapes and determinism") {
  const auto spec = banded_synth_spec(4, 4, 2, 3);
  const auto a = synth_generate(spec);
  const auto b = synth_generate(spec);
  CHECK(a.field.n_locations() == 16);
  CHECK(a.field.n_days() == 366);
  CHECK(a.field.x == b.field.x);
  CHECK(a.u == b.u);
  CHECK(a.v == std::vector<int>{0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1});
  for (std::size_t s = 0; s < 16; ++s)
    for (std::size_t t = 0; t < 366; ++t) CHECK(a.field.x(s, t) >= 0);
}

TEST_CASE("wet days are rainier than dry days") {
  auto spec = banded_synth_spec(8, 8, 4, 2);
  spec.seed = 9;
  const auto r = synth_generate(spec);
  double wet = 0, dry = 0;
  long nw = 0, nd = 0;
  long agree = 0;
  for (std::size_t s = 0; s < 64; ++s)
    for (std::size_t t = 0; t < r.field.n_days(); ++t) {
      (r.z(s, t) ? wet : dry) += r.field.x(s, t);
      (r.z(s, t) ? nw : nd) += 1;
      const bool planted = spec.pattern_wet_probs(static_cast<std::size_t>(r.u[t]), s) > 0.5;
      agree += (r.z(s, t) != 0) == planted;
    }
  CHECK(wet / nw == doctest::Approx(12.0).epsilon(0.05));
  CHECK(dry / nd == doctest::Approx(1.0).epsilon(0.05));
  // 0.9 band probability and 10% flips: about 0.9*0.9+0.1*0.1 = 0.82 agreement
  // on the band, 0.95*0.9+0.05*0.1 = 0.86 elsewhere.
  const double frac = static_cast<double>(agree) / (64.0 * static_cast<double>(r.field.n_days()));
  CHECK(frac == doctest::Approx(0.25 * 0.82 + 0.75 * 0.86).epsilon(0.02));
}

TEST_CASE("invalid specs are rejected") {
  auto spec = banded_synth_spec(4, 4, 2, 1);
  spec.flip_noise = 0.5;
  CHECK_THROWS(spec.validate());
  spec = banded_synth_spec(4, 4, 2, 1);
  spec.transition(0, 0) = 0.5;
  CHECK_THROWS(spec.validate());
}
