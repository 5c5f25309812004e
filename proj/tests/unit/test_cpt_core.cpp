#include "cptdp/cpt_value.hpp"
#include "cptdp/utility.hpp"
#include "cptdp/weighting.hpp"
#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

using namespace cptdp;
using Catch::Approx;

namespace {

CptSpec tk_power_spec() {
  CptSpec spec;
  spec.u_plus = UtilityFunction::power(0.88);
  spec.u_minus = UtilityFunction::power(0.88);
  spec.w_plus = WeightingFunction::tversky_kahneman(0.61);
  spec.w_minus = WeightingFunction::tversky_kahneman(0.69);
  return spec;
}

DiscreteDistribution four_atoms() {
  return DiscreteDistribution::proper({{-2.0, 0.25}, {-1.0, 0.25}, {1.0, 0.25}, {3.0, 0.25}});
}

// 50-digit evaluations done ahead of time.
constexpr double kTk065Half = 0.4387705074846802246;
constexpr double kPowerDerivAt2 = 0.80976513254989006898;
constexpr double kFourAtomValue = 0.19374028504803095005;

}  // namespace

TEST_CASE("weighting endpoints are exact", "[weighting]") {
  const std::vector<WeightingFunction> ws{
      WeightingFunction::identity(), WeightingFunction::tversky_kahneman(0.61),
      WeightingFunction::tversky_kahneman(1.7),
      WeightingFunction::tabulated({{0.0, 0.0}, {0.4, 0.6}, {1.0, 1.0}})};
  for (const auto& w : ws) {
    CHECK(w(0.0) == 0.0);
    CHECK(w(1.0) == 1.0);
  }
}

TEST_CASE("Tversky-Kahneman values", "[weighting]") {
  CHECK(WeightingFunction::tversky_kahneman(1.0)(0.3) == Approx(0.3).margin(1e-15));
  CHECK(weight_eval(WeightingFunction::tversky_kahneman(0.65), 0.5) == Approx(kTk065Half).margin(1e-15));
}

TEST_CASE("TK with delta 1 is the identity on a fine grid", "[weighting][property]") {
  const auto w = WeightingFunction::tversky_kahneman(1.0);
  CHECK(w.is_identity());
  for (int i = 0; i <= 10000; ++i) {
    const double p = i / 10000.0;
    REQUIRE(std::abs(w(p) - p) <= 1e-12);
  }
}

TEST_CASE("weighting functions are monotone", "[weighting][property]") {
  Rng rng(derive_seed(11, 0));
  for (int t = 0; t < 200; ++t) {
    const auto w = testing::random_weighting(rng);
    double prev = 0.0;
    for (int i = 0; i <= 500; ++i) {
      const double v = w(i / 500.0);
      REQUIRE(v >= prev - 1e-15);
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
      prev = v;
    }
  }
}

TEST_CASE("weighting rejects bad input", "[weighting][errors]") {
  const auto w = WeightingFunction::identity();
  CHECK_THROWS_AS(w(-0.1), std::domain_error);
  CHECK_THROWS_AS(w(1.5), std::domain_error);
  CHECK_THROWS_AS(w(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
  CHECK_THROWS(WeightingFunction::tversky_kahneman(0.0));
  CHECK_THROWS(WeightingFunction::tversky_kahneman(-1.0));
  CHECK_THROWS(WeightingFunction::tversky_kahneman(0.2));  // not monotone
  CHECK_THROWS(WeightingFunction::tabulated({{0.0, 0.0}, {0.5, 0.7}, {0.6, 0.3}, {1.0, 1.0}}));
  CHECK_THROWS(WeightingFunction::tabulated({{0.1, 0.0}, {1.0, 1.0}}));
  CHECK_THROWS(WeightingFunction::tabulated({{0.0, 0.0}, {0.5, 0.5}, {0.5, 0.6}, {1.0, 1.0}}));
  CHECK_NOTHROW(WeightingFunction::tabulated_unchecked({{0.0, 0.0}, {0.3, 0.8}, {0.6, 0.3}, {1.0, 1.0}}));
}

TEST_CASE("tabulated weighting interpolates linearly", "[weighting]") {
  const auto w = WeightingFunction::tabulated({{0.0, 0.0}, {0.5, 0.8}, {1.0, 1.0}});
  CHECK(w(0.25) == Approx(0.4));
  CHECK(w(0.75) == Approx(0.9));
  CHECK(*w.linear_bound() == Approx(1.6));
}

TEST_CASE("linear bound of weightings", "[weighting]") {
  CHECK(*WeightingFunction::identity().linear_bound() == 1.0);
  CHECK_FALSE(WeightingFunction::tversky_kahneman(0.61).linear_bound().has_value());
  const auto xi = WeightingFunction::tversky_kahneman(1.5).linear_bound();
  REQUIRE(xi.has_value());
  const auto w = WeightingFunction::tversky_kahneman(1.5);
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    REQUIRE(w(p) <= *xi * p + 1e-12);
  }
}

TEST_CASE("utility derivative and inverse", "[utility]") {
  const auto id = UtilityFunction::identity();
  CHECK(utility_derivative(id, 5.0) == 1.0);
  CHECK(utility_inverse(id, 5.0) == 5.0);
  CHECK(utility_inverse(UtilityFunction::power(0.5), 3.0) == Approx(9.0).margin(1e-12));
  CHECK(utility_derivative(UtilityFunction::power(0.88), 2.0) == Approx(kPowerDerivAt2).margin(1e-15));
  CHECK(std::isinf(UtilityFunction::power(0.88).derivative(0.0)));
  CHECK_FALSE(UtilityFunction::power(0.88).has_bounded_derivative());
  CHECK(UtilityFunction::scaled(UtilityFunction::identity(), 2.25).has_bounded_derivative());
  CHECK(UtilityFunction::scaled(UtilityFunction::power(0.5), 2.0)(4.0) == Approx(4.0));
}

TEST_CASE("utility invariants", "[utility][property]") {
  Rng rng(derive_seed(11, 1));
  for (int t = 0; t < 200; ++t) {
    const auto u = testing::random_utility(rng);
    REQUIRE(u(0.0) == 0.0);
    double prev_u = 0.0;
    double prev_d = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 100; ++i) {
      const double x = i * 0.1;
      const double v = u(x);
      const double d = u.derivative(x);
      REQUIRE(v >= prev_u);
      REQUIRE(d <= prev_d + 1e-12);
      REQUIRE(utility_inverse(u, v) == Approx(x).epsilon(1e-10));
      prev_u = v;
      prev_d = d;
    }
  }
}

TEST_CASE("utility rejects bad input", "[utility][errors]") {
  CHECK_THROWS(UtilityFunction::power(0.0));
  CHECK_THROWS(UtilityFunction::power(1.2));
  CHECK_THROWS(UtilityFunction::scaled(UtilityFunction::identity(), -1.0));
  CHECK_THROWS_AS(UtilityFunction::identity()(-1.0), std::domain_error);
}

TEST_CASE("distribution construction", "[distribution]") {
  CHECK_THROWS(DiscreteDistribution::proper({{0.0, 0.5}, {1.0, 0.4}}));
  CHECK_THROWS(DiscreteDistribution::proper({{0.0, -0.1}, {1.0, 1.1}}));
  CHECK_THROWS(DiscreteDistribution::sub_normalized({{0.0, 0.7}, {1.0, 0.4}}));
  const auto sub = DiscreteDistribution::sub_normalized({{0.0, 0.3}, {1.0, 0.4}});
  CHECK(sub.is_sub_normalized());
  CHECK(sub.total_mass() == Approx(0.7));
  const auto m = DiscreteDistribution::proper({{2.0, 0.25}, {1.0, 0.0}, {2.0, 0.25}, {0.5, 0.5}}).merged();
  REQUIRE(m.size() == 2);
  CHECK(m.atoms()[0].value == 0.5);
  CHECK(m.atoms()[1].mass == 0.5);
}

TEST_CASE("cpt value examples", "[cpt]") {
  const auto coin = DiscreteDistribution::proper({{0.0, 0.5}, {1.0, 0.5}});
  CHECK(cpt_value_exact(coin, CptSpec::risk_neutral()) == Approx(0.5).margin(1e-15));
  CHECK(cpt_value_quadrature(coin, CptSpec::risk_neutral(), 1e-10) == Approx(0.5).margin(1e-10));

  CHECK(cpt_value_exact(four_atoms(), tk_power_spec()) == Approx(kFourAtomValue).margin(1e-13));
  CHECK(cpt_value_quadrature(four_atoms(), tk_power_spec(), 1e-10) == Approx(kFourAtomValue).margin(1e-10));

  const auto w = WeightingFunction::tversky_kahneman(0.61);
  CptSpec spec;
  spec.w_plus = w;
  for (double p : {0.01, 0.3, 0.77}) {
    const auto bern = DiscreteDistribution::proper({{1.0, p}, {0.0, 1.0 - p}});
    CHECK(cpt_value_exact(bern, spec) == Approx(w(p)).margin(1e-12));
  }
}

TEST_CASE("point mass at the reference has zero value", "[cpt][property]") {
  Rng rng(derive_seed(11, 2));
  for (int t = 0; t < 200; ++t) {
    const CptSpec spec = testing::random_spec(rng);
    const auto pm = DiscreteDistribution::point_mass(spec.reference_point);
    REQUIRE(cpt_value_exact(pm, spec) == 0.0);
    REQUIRE(cpt_value_quadrature(pm, spec, 1e-10) == 0.0);
  }
}

TEST_CASE("risk-neutral spec gives the mean minus b", "[cpt][property]") {
  Rng rng(derive_seed(11, 3));
  for (int t = 0; t < 1000; ++t) {
    const auto d = testing::random_distribution(rng);
    const double b = rng.uniform(-3.0, 3.0);
    REQUIRE(std::abs(cpt_value_exact(d, CptSpec::risk_neutral(b)) - (d.mean() - b)) <= 1e-12);
  }
}

TEST_CASE("staircase and quadrature agree", "[cpt][property]") {
  Rng rng(derive_seed(11, 4));
  for (int t = 0; t < 300; ++t) {
    const auto d = testing::random_distribution(rng);
    const auto spec = testing::random_spec(rng);
    REQUIRE(std::abs(cpt_value_exact(d, spec) - cpt_value_quadrature(d, spec, 1e-10)) <= 1e-9);
  }
}

TEST_CASE("merging duplicate atoms leaves the value unchanged", "[cpt][property]") {
  Rng rng(derive_seed(11, 5));
  for (int t = 0; t < 500; ++t) {
    const auto d = testing::random_distribution(rng, 10, -3.0, 3.0);
    const auto spec = testing::random_spec(rng);
    // Split every atom in two so there is always something to merge.
    std::vector<Atom> split;
    for (const Atom& a : d.atoms()) {
      const double f = rng.uniform();
      split.push_back({a.value, a.mass * f});
      split.push_back({a.value, a.mass - a.mass * f});
    }
    const auto dup = DiscreteDistribution::proper(split);
    REQUIRE(std::abs(cpt_value_exact(dup, spec) - cpt_value_exact(dup.merged(), spec)) <= 1e-12);
    REQUIRE(std::abs(cpt_value_exact(d, spec) - cpt_value_exact(d.merged(), spec)) <= 1e-12);
  }
}

TEST_CASE("raising an atom does not lower the value", "[cpt][property]") {
  Rng rng(derive_seed(11, 6));
  for (int t = 0; t < 500; ++t) {
    const auto d = testing::random_distribution(rng);
    const auto spec = testing::random_spec(rng);
    std::vector<Atom> atoms(d.atoms().begin(), d.atoms().end());
    atoms[rng.index(atoms.size())].value += rng.uniform(0.0, 3.0);
    const auto up = DiscreteDistribution::proper(atoms);
    REQUIRE(cpt_value_exact(up, spec) >= cpt_value_exact(d, spec) - 1e-12);
  }
}

TEST_CASE("sub-normalized laws are rejected by the proper-law entry points", "[cpt][errors]") {
  const auto sub = DiscreteDistribution::sub_normalized({{1.0, 0.5}});
  CHECK_THROWS_AS(cpt_value_exact(sub, CptSpec::risk_neutral()), std::invalid_argument);
  CHECK_THROWS_AS(cpt_value_quadrature(sub, CptSpec::risk_neutral(), 1e-10), std::invalid_argument);
  CHECK(cpt_value_subnormalized(sub, CptSpec::risk_neutral()) == Approx(0.5));
  CHECK_THROWS(cpt_value_quadrature(DiscreteDistribution::point_mass(1.0), CptSpec::risk_neutral(), 0.0));
}
