#include "doctest.h"

#include <cmath>

#include "capwiener/vss.hpp"

using namespace capwiener;

TEST_CASE("subcritical shooting finds the positive decaying profile") {
  Params prm = make_params(1, 2.0);
  VssProfile p = vss_profile(prm);
  REQUIRE(p.exists);
  CHECK(p.flat_value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.f0 == doctest::Approx(0.6898436109).epsilon(1e-8));
  CHECK(p.f0 > 0.0);
  CHECK(p.f0 < p.flat_value);  // strictly below the flat equilibrium
  CHECK(p.bracket_lo <= p.f0);
  CHECK(p.f0 <= p.bracket_hi);
  CHECK((p.bracket_hi - p.bracket_lo) / p.f0 < 1e-10);
  CHECK(p.bisections > 0);
  CHECK(p.bisections <= 80);

  // Plug-back residual and far-field decay diagnostics.
  CHECK(p.residual_sup < 1e-4);
  CHECK(p.decay_sup < 1e-2);

  // Dense profile invariants: starts at f0 with zero slope, nonnegative,
  // nonincreasing, dead by the end of the radial window.
  REQUIRE(p.r.size() == p.f.size());
  CHECK(p.r[0] == 0.0);
  CHECK(p.r[p.r.size() - 1] == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(p.f[0] == doctest::Approx(p.f0).epsilon(1e-12));
  CHECK(std::abs(p.f[1] - p.f[0]) < 1e-4);
  CHECK(p.f.minCoeff() >= 0.0);
  for (long i = 1; i < p.f.size(); ++i) CHECK(p.f[i] <= p.f[i - 1] + 1e-12);
  CHECK(p.f[p.f.size() - 1] < 1e-8);
}

TEST_CASE("shooting parameter is stable under solver resolution") {
  Params prm = make_params(1, 2.0);
  VssProfile fine = vss_profile(prm);
  VssControls coarse;
  coarse.rtol = 1e-7;
  coarse.atol = 1e-9;
  coarse.r0 = 1e-3;
  coarse.dense_dr = 0.005;
  VssProfile rough = vss_profile(prm, coarse);
  REQUIRE(rough.exists);
  CHECK(std::abs(rough.f0 - fine.f0) / fine.f0 < 5e-3);
}

TEST_CASE("bracket collapses at and above the critical exponent") {
  VssProfile s = vss_profile(make_params(1, 3.5));
  CHECK_FALSE(s.exists);
  CHECK(s.f0 == 0.0);

  // Same collapse seen from another dimension: q_c(3) = 5/3 < 2.
  VssProfile s3 = vss_profile(make_params(3, 2.0));
  CHECK_FALSE(s3.exists);
  CHECK(s3.f0 == 0.0);
}

TEST_CASE("profile evaluation scales parabolically and dies off-grid") {
  Params prm = make_params(1, 2.0);
  VssProfile p = vss_profile(prm);
  REQUIRE(p.exists);
  // t^{-1/(q-1)} f(d / sqrt(t)) with q = 2: quartering t at half the
  // distance multiplies the value by exactly 4.
  CHECK(vss_value(p, 0.3, 0.25, prm) ==
        doctest::Approx(4.0 * vss_value(p, 0.6, 1.0, prm)).epsilon(1e-12));
  CHECK(vss_value(p, 0.0, 1.0, prm) ==
        doctest::Approx(p.f0).epsilon(1e-12));
  CHECK(vss_value(p, 25.0, 1.0, prm) == 0.0);
}
