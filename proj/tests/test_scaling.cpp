#include "doctest.h"

#include <stdexcept>

#include "starkdisk/scaling.hpp"

using namespace starkdisk;

namespace {

PhysicalParams units(double m, double k, double f, double e, double hbar, double r0) {
  return PhysicalParams{m, k, f, e, hbar, r0};
}

}  // namespace

TEST_CASE("lambda_from_physical examples") {
  CHECK(lambda_from_physical(units(1, 1, 1, 1, 1, 1)) == 1.0);
  CHECK(lambda_from_physical(units(3.5, 0.2, 0.0, 7, 2, 1)) == 0.0);
  // f e hbar^4 / (m^2 K^3) = 2 / 8.
  CHECK(lambda_from_physical(units(1, 2, 2, 1, 1, 1)) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("beta_from_physical examples") {
  CHECK(beta_from_physical(units(1, 1, 0, 1, 1, 0.75)) == 0.75);
  CHECK(beta_from_physical(units(2, 1, 0, 1, 1, 1)) == 2.0);
  double previous = 1.0;
  for (double r0 : {1e-2, 1e-4, 1e-8}) {
    const double beta = beta_from_physical(units(1.3, 0.7, 0, 1, 1.1, r0));
    CHECK(beta < previous);
    previous = beta;
  }
  CHECK(previous < 1e-7);
}

TEST_CASE("dimensionless_r0 examples") {
  CHECK(dimensionless_r0(units(1, 1, 0, 1, 1, 3)) == 3.0);
  CHECK(dimensionless_r0(units(1, 2, 0, 1, 1, 1)) == 2.0);
  const auto p = units(2, 1, 0, 1, 1, 1);
  CHECK(dimensionless_r0(p) == beta_from_physical(p));
}

TEST_CASE("scaling functions reject invalid physical parameters") {
  CHECK_THROWS_AS(lambda_from_physical(units(0, 1, 1, 1, 1, 1)), std::domain_error);
  CHECK_THROWS_AS(lambda_from_physical(units(1, -1, 1, 1, 1, 1)), std::domain_error);
  CHECK_THROWS_AS(lambda_from_physical(units(1, 1, 1, 0, 1, 1)), std::domain_error);
  CHECK_THROWS_AS(beta_from_physical(units(1, 1, 0, 1, 1, 0)), std::domain_error);
  CHECK_THROWS_AS(dimensionless_r0(units(1, 1, 0, 1, 1, -2)), std::domain_error);
  CHECK_THROWS_AS(beta_from_physical(units(1, 1, 0, 1, 0, 1)), std::domain_error);
  CHECK_NOTHROW(lambda_from_physical(units(1, 1, -4, 1, 1, 1)));
  CHECK_THROWS_AS(validate(ModelParams{0.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(validate(BetaParams{-0.1}), std::domain_error);
  CHECK_NOTHROW(validate(BetaParams{0.0}));
}

TEST_CASE("property: lambda is odd in the field") {
  for (double f : {0.1, 1.0, 3.7, 1e-5, 250.0}) {
    for (double k : {0.5, 1.0, 2.3}) {
      const double plus = lambda_from_physical(units(1.7, k, f, 0.9, 1.3, 2));
      const double minus = lambda_from_physical(units(1.7, k, -f, 0.9, 1.3, 2));
      CHECK(minus == -plus);
    }
  }
}

TEST_CASE("property: dimensionless_r0 and beta are bit-identical") {
  for (double m : {0.3, 1.0, 9.1}) {
    for (double k : {0.2, 1.0, 14.4}) {
      for (double hbar : {0.5, 1.0, 1.05}) {
        for (double r0 : {1e-3, 0.75, 42.0}) {
          const auto p = units(m, k, 0.3, 1, hbar, r0);
          CHECK(dimensionless_r0(p) == beta_from_physical(p));
        }
      }
    }
  }
}

TEST_CASE("property: K -> cK scales lambda by c^-3 and beta by c") {
  const auto base = units(1.3, 0.8, 0.6, 1.1, 0.9, 2.5);
  const double lambda = lambda_from_physical(base);
  const double beta = beta_from_physical(base);
  for (double c : {0.25, 0.5, 2.0, 10.0}) {
    auto scaled = base;
    scaled.coulomb_strength *= c;
    CHECK(lambda_from_physical(scaled) == doctest::Approx(lambda / (c * c * c)).epsilon(1e-14));
    CHECK(beta_from_physical(scaled) == doctest::Approx(beta * c).epsilon(1e-14));
  }
}

TEST_CASE("model_from_physical combines both couplings") {
  const auto p = units(1, 2, 2, 1, 1, 1.5);
  const auto m = model_from_physical(p);
  CHECK(m.r0 == dimensionless_r0(p));
  CHECK(m.lambda == lambda_from_physical(p));
}
