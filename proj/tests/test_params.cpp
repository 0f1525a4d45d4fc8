#include "doctest.h"

#include "capwiener/params.hpp"

using namespace capwiener;

TEST_CASE("derived exponents for N=1, q=3") {
  Params p = make_params(1, 3.0);
  CHECK(p.dimension == 1);
  CHECK(p.q == 3.0);
  CHECK(p.q_crit == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(p.q_conj == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(p.cap_order == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(p.cap_power == p.q_conj);
  CHECK(p.supercritical);
}

TEST_CASE("criticality threshold per dimension") {
  CHECK(make_params(2, 2.0).q_crit == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(make_params(2, 2.0).supercritical);
  CHECK_FALSE(make_params(1, 2.0).supercritical);
  CHECK(make_params(1, 2.0).q_crit == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("conjugate identity and index product") {
  for (int N = 1; N <= 4; ++N) {
    for (double q : {1.1, 1.5, 2.0, 2.5, 3.0, 3.5, 5.0}) {
      Params p = make_params(N, q);
      CHECK(std::abs(1.0 / p.q + 1.0 / p.q_conj - 1.0) < 1e-14);
      CHECK(std::abs(p.cap_order * p.cap_power - 2.0 / (q - 1.0)) < 1e-14);
      const bool super = q >= (N + 2.0) / N;
      CHECK(p.supercritical == super);
      // The capacity indices see the same threshold: 2/(q-1) <= N iff q >= q_c.
      CHECK((p.cap_order * p.cap_power <= N + 1e-14) == super);
    }
  }
}

TEST_CASE("invalid parameters rejected") {
  CHECK_THROWS_AS(make_params(1, 1.0), InvalidParameterError);
  CHECK_THROWS_AS(make_params(1, 0.5), InvalidParameterError);
  CHECK_THROWS_AS(make_params(0, 2.0), InvalidParameterError);
  CHECK_THROWS_AS(make_params(-1, 2.0), InvalidParameterError);
}
