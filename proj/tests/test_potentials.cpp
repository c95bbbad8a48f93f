#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fracxy/potentials.hpp"

using namespace fracxy;
using std::numbers::pi;

TEST_CASE("base profile values") {
  const PotentialSpec spec;
  CHECK(eval_base(spec, 0.0) == 0.0);
  CHECK(eval_base(spec, pi) == doctest::Approx(2.0));
  CHECK(eval_base(spec, 2 * pi + 1e-9) == doctest::Approx(5e-19).epsilon(1e-6));
  CHECK(eval_base(BaseProfile::stiffened, pi) == doctest::Approx(3.0));
  CHECK(base_profile_from_string("1-cos") == BaseProfile::one_minus_cos);
  CHECK(base_profile_from_string(to_string(BaseProfile::stiffened)) == BaseProfile::stiffened);
  CHECK_THROWS_AS(base_profile_from_string("quartic"), Error);
}

TEST_CASE("truncated multi-well potential") {
  const PotentialSpec two{2, 0.01};
  CHECK(eval_fn_eps(two, pi) == doctest::Approx(0.01));
  CHECK(eval_fn_eps(two, pi / 2) == doctest::Approx(2.0));
  const PotentialSpec three{3, 0.05};
  CHECK(eval_fn_eps(three, 2 * pi / 3) == doctest::Approx(0.05));
  CHECK(eval_fn_eps(three, 0.1) == doctest::Approx(1 - std::cos(0.3)).epsilon(1e-12));
  CHECK(std::abs(eval_fn_eps(three, 0.1) - 0.0446635) < 1e-6);
}

TEST_CASE("subgradient examples") {
  CHECK(subgradient_fn_eps(PotentialSpec{}, 0.0) == 0.0);
  CHECK(subgradient_fn_eps(PotentialSpec{2, 0.01}, pi) == 0.0);
  CHECK(subgradient_fn_eps(PotentialSpec{1, 0.01}, 0.3) == doctest::Approx(std::sin(0.3)));
  CHECK(std::abs(std::sin(0.3) - 0.295520) < 1e-6);
}

TEST_CASE("single well: the plateau is empty") {
  // for n = 1 the secondary band |t| > pi is empty after reduction
  const PotentialSpec one{1, 0.5};
  for (double t = -10.0; t <= 10.0; t += 0.01) {
    CHECK(eval_fn_eps(one, t) == doctest::Approx(eval_base(one, t)).epsilon(1e-12));
    CHECK_FALSE(on_plateau(one, t));
  }
}

TEST_CASE("chain inequality and periodicity on random angles") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-100.0, 100.0), level(1e-3, 1.9);
  std::uniform_int_distribution<int> wells(1, 6);
  for (int k = 0; k < 100000; ++k) {
    const double t = angle(rng);
    const PotentialSpec spec{wells(rng), level(rng), k % 2 ? BaseProfile::stiffened : BaseProfile::one_minus_cos};
    const double fn = eval_fn_eps(spec, t);
    const double base = eval_base(spec.base, spec.n * t);
    REQUIRE(fn >= base - 1e-12);
    REQUIRE(base >= 1 - std::cos(spec.n * t) - 1e-12);
    REQUIRE(std::abs(fn - eval_fn_eps(spec, t + 2 * pi)) < 1e-12);
  }
}

TEST_CASE("plateau width for n = 2") {
  const double eps = 0.05;
  const PotentialSpec spec{2, eps};
  const double a = std::acos(1 - eps) / 2;
  for (int k = 0; k <= 1000; ++k) {
    const double t = pi - a * 0.999 + 2 * a * 0.999 * k / 1000.0;
    REQUIRE(eval_fn_eps(spec, t) == eps);
  }
  CHECK(eval_fn_eps(spec, pi - 1.01 * a) > eps);
}

TEST_CASE("subgradient matches finite differences away from kinks") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-7.0, 7.0);
  const double h = 1e-6;
  for (int n = 1; n <= 4; ++n) {
    for (auto base : {BaseProfile::one_minus_cos, BaseProfile::stiffened}) {
      const PotentialSpec spec{n, 0.02, base};
      for (int k = 0; k < 2000; ++k) {
        const double t = angle(rng);
        // skip points within 1e-4 of the plateau edge or the band edge
        if (on_plateau(spec, t - 1e-4) != on_plateau(spec, t + 1e-4)) continue;
        const double r = std::remainder(t, 2 * pi);
        if (std::abs(std::abs(r) - pi / n) < 1e-4) continue;
        const double fd = (eval_fn_eps(spec, t + h) - eval_fn_eps(spec, t - h)) / (2 * h);
        const double g = subgradient_fn_eps(spec, t);
        REQUIRE(std::abs(fd - g) <= 1e-6 * std::max(1.0, std::abs(g)));
        double slope = 0.0;
        REQUIRE(eval_fn_eps_slope(spec, t, slope) == doctest::Approx(eval_fn_eps(spec, t)).epsilon(1e-14));
        REQUIRE(slope == doctest::Approx(g).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("spec validation") {
  CHECK_NOTHROW(validate(PotentialSpec{2, 1.5}));
  CHECK_THROWS_AS(validate(PotentialSpec{0, 0.1}), Error);
  CHECK_THROWS_AS(validate(PotentialSpec{2, 0.0}), Error);
  CHECK_THROWS_AS(validate(PotentialSpec{2, 2.0}), Error);
  CHECK_NOTHROW(validate(PotentialSpec{2, 2.5, BaseProfile::stiffened}));
  CHECK_THROWS_AS(validate(PotentialSpec{2, 3.0, BaseProfile::stiffened}), Error);
}
