#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "kltest/exponent.hpp"
#include "test_support.hpp"

using namespace kltest;
using test_support::random_distribution;

TEST_CASE("stein_exponent is kl") {
  const Distribution p = make_distribution({0.9, 0.1});
  const Distribution q = make_distribution({0.5, 0.5});
  CHECK(stein_exponent(p, p).bits() == doctest::Approx(0.0));
  CHECK(stein_exponent(p, q).bits() ==
        doctest::Approx(0.5310044064107189).epsilon(1e-12));
  CHECK_FALSE(stein_exponent(make_distribution({1.0, 0.0}),
                             make_distribution({0.0, 1.0})).is_finite());
}

TEST_CASE("geometric_mixture closed form") {
  const Distribution p = make_distribution({0.8, 0.2});
  const Distribution q = make_distribution({0.2, 0.8});

  const Distribution same = geometric_mixture(p, p);
  CHECK(same[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(same[1] == doctest::Approx(0.2).epsilon(1e-12));

  const Distribution mid = geometric_mixture(p, q);
  CHECK(mid[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mid[1] == doctest::Approx(0.5).epsilon(1e-12));

  // sqrt(0.49), sqrt(0.01) -> 0.7/0.8, 0.1/0.8
  const Distribution skew =
      geometric_mixture(make_distribution({0.5, 0.5}), make_distribution({0.98, 0.02}));
  CHECK(skew[0] == doctest::Approx(0.875).epsilon(1e-12));
  CHECK(skew[1] == doctest::Approx(0.125).epsilon(1e-12));

  CHECK_THROWS_AS(geometric_mixture(make_distribution({1.0, 0.0}),
                                    make_distribution({0.0, 1.0})),
                  std::domain_error);
}

TEST_CASE("mixture support is the support intersection") {
  const Distribution p = make_distribution({0.5, 0.5, 0.0});
  const Distribution q = make_distribution({0.0, 0.5, 0.5});
  const Distribution m = geometric_mixture(p, q);
  CHECK(m[0] == 0.0);
  CHECK(m[1] == doctest::Approx(1.0));
  CHECK(m[2] == 0.0);
}

TEST_CASE("sanov_upper_bound plug-in values") {
  CHECK(sanov_upper_bound(50, 2, 0.0) == doctest::Approx(51.0 * 51.0));
  CHECK(sanov_upper_bound(50, 2, 0.2) == doctest::Approx(2.5400390625).epsilon(1e-12));
  CHECK(sanov_upper_bound(200, 2, 0.2) ==
        doctest::Approx(3.6744495446328074e-08).epsilon(1e-10));
  CHECK_THROWS_AS(sanov_upper_bound(0, 2, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(sanov_upper_bound(10, 2, -0.1), std::invalid_argument);
}

TEST_CASE("grid minimizer finds the identity optimum") {
  const Distribution p = make_distribution({0.3, 0.7});
  const GridMinimum g = minimize_kl_sum_grid(p, p, 1e-2);
  CHECK(g.value_bits <= 1e-4);
  CHECK(std::abs(g.argmin[0] - 0.3) <= 1e-2);
}

TEST_CASE("grid minimizer brackets the closed form") {
  const Distribution p = make_distribution({0.8, 0.2});
  const Distribution q = make_distribution({0.2, 0.8});
  const GridMinimum g = minimize_kl_sum_grid(p, q, 1e-3);
  CHECK(std::abs(g.value_bits - 0.6438561897747246) <= 1e-5);

  const Distribution a = make_distribution({0.5, 0.5});
  const Distribution b = make_distribution({0.98, 0.02});
  const GridMinimum h = minimize_kl_sum_grid(a, b, 1e-3);
  const double l1 =
      std::abs(h.argmin[0] - 0.875) + std::abs(h.argmin[1] - 0.125);
  CHECK(l1 <= 2e-3);
}

TEST_CASE("grid minimizer guards") {
  const Distribution p = make_distribution({0.2, 0.2, 0.2, 0.2, 0.2});
  CHECK_THROWS_AS(minimize_kl_sum_grid(p, p, 1e-2), std::invalid_argument);
  const Distribution u = make_distribution({0.5, 0.5});
  CHECK_THROWS_AS(minimize_kl_sum_grid(u, u, 0.7), std::invalid_argument);
  CHECK_THROWS_AS(minimize_kl_sum_grid(u, u, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(minimize_kl_sum_grid(make_distribution({1.0, 0.0}),
                                       make_distribution({0.0, 1.0}), 1e-2),
                  std::domain_error);
}

TEST_CASE("two_sample_exponent agreement between all three routes") {
  const Distribution p = make_distribution({0.8, 0.2});
  const Distribution q = make_distribution({0.2, 0.8});
  const ExponentReport r = two_sample_exponent(p, q, 1e-3);
  REQUIRE(r.mixture.has_value());
  REQUIRE(r.grid.has_value());
  CHECK(r.closed_form.bits() == doctest::Approx(0.6438561897747246).epsilon(1e-12));
  CHECK(std::abs(r.closed_form.bits() - r.renyi_half.bits()) <= 1e-9);
  CHECK(std::abs(r.closed_form.bits() - r.grid->value_bits) <= 1e-4);

  const ExponentReport same = two_sample_exponent(p, p, 1e-2);
  CHECK(same.closed_form.bits() == doctest::Approx(0.0));
  CHECK((*same.mixture)[0] == doctest::Approx(0.8).epsilon(1e-12));

  const ExponentReport disjoint = two_sample_exponent(
      make_distribution({1.0, 0.0}), make_distribution({0.0, 1.0}));
  CHECK_FALSE(disjoint.closed_form.is_finite());
  CHECK_FALSE(disjoint.renyi_half.is_finite());
  CHECK_FALSE(disjoint.mixture.has_value());
  CHECK_FALSE(disjoint.grid.has_value());
}

TEST_CASE("exponent symmetry and the identity of formulas on random pairs") {
  SplitMix64 rng(9001);
  for (int rep = 0; rep < 300; ++rep) {
    const int d = 2 + static_cast<int>(rng.next() % 4);
    const Distribution p = random_distribution(rng, d, 0.01);
    const Distribution q = random_distribution(rng, d, 0.01);
    const ExponentReport pq = two_sample_exponent(p, q, 1e-2);
    const ExponentReport qp = two_sample_exponent(q, p, 1e-2);
    CHECK(std::abs(pq.closed_form.bits() - qp.closed_form.bits()) <= 1e-12);
    CHECK(std::abs(pq.closed_form.bits() - pq.renyi_half.bits()) <= 1e-9);
    REQUIRE(pq.mixture.has_value());
    for (int i = 0; i < d; ++i) {
      CHECK((*pq.mixture)[i] == doctest::Approx((*qp.mixture)[i]).epsilon(1e-12));
    }
    // Zero iff equal at desk scale.
    CHECK((pq.closed_form.bits() <= 1e-9) == (total_variation(p, q) <= 1e-6));
  }
}

TEST_CASE("numeric argmin lands on the geometric mixture") {
  SplitMix64 rng(9002);
  for (int rep = 0; rep < 30; ++rep) {
    const int d = 2 + static_cast<int>(rng.next() % 2);
    const Distribution p = random_distribution(rng, d, 0.05);
    const Distribution q = random_distribution(rng, d, 0.05);
    const Distribution m = geometric_mixture(p, q);
    const GridMinimum g = minimize_kl_sum_grid(p, q, 1e-3);
    double l1 = 0.0;
    for (int i = 0; i < d; ++i) l1 += std::abs(g.argmin[i] - m[i]);
    CHECK(l1 <= 2e-3);
  }
}
