#include "doctest.h"

#include <cmath>

#include "capwiener/potential.hpp"

using namespace capwiener;

namespace {

Vec point1(double v) {
  Vec x(1);
  x << v;
  return x;
}

}  // namespace

TEST_CASE("empty set has zero potential") {
  Params prm = make_params(1, 3.0);
  auto ker = shared_kernel(1, prm.cap_order);
  PotentialTerms W = w_potential(CompactSet::empty(1), point1(0.0), 1.0, prm, *ker);
  CHECK(W.total == 0.0);
  CHECK(W.terms.empty());
}

TEST_CASE("interval at the origin: term structure and frozen values") {
  Params prm = make_params(1, 3.0);
  auto ker = shared_kernel(1, prm.cap_order);
  CompactSet F = CompactSet::intervals({{-1.0, 1.0}});

  // t = 1: the body of the set fills the first annulus and the endpoints sit
  // exactly on the next slicing sphere, giving two nonzero terms.
  PotentialTerms w1 = w_potential(F, point1(0.0), 1.0, prm, *ker);
  CHECK(w1.prefactor == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w1.n_bound == 2);
  REQUIRE(w1.terms.size() == 2);
  CHECK_FALSE(w1.terms[0].empty);
  CHECK_FALSE(w1.terms[1].empty);
  CHECK(w1.terms[0].capacity == doctest::Approx(2.98520).epsilon(0.01));
  CHECK(w1.terms[1].capacity == doctest::Approx(1.79500).epsilon(0.01));
  CHECK(w1.total == doctest::Approx(4.38317).epsilon(0.01));

  // t = 0.25: four annuli cut the interval and the endpoints land on the
  // fifth; frozen slice capacities.
  PotentialTerms w4 = w_potential(F, point1(0.0), 0.25, prm, *ker);
  CHECK(w4.prefactor == doctest::Approx(2.0).epsilon(1e-14));
  REQUIRE(w4.terms.size() == 5);
  const double caps[5] = {2.985197, 2.506055, 1.999910, 2.154052, 1.840488};
  for (int n = 0; n < 5; ++n) {
    CHECK(w4.terms[n].n == n);
    CHECK(w4.terms[n].weight ==
          doctest::Approx(std::exp(-0.25 * n)).epsilon(1e-12));
    CHECK(w4.terms[n].capacity == doctest::Approx(caps[n]).epsilon(0.01));
  }
  CHECK(w4.total == doctest::Approx(15.6890).epsilon(0.01));
}

TEST_CASE("total equals the prefactor times the recomputed series") {
  Params prm = make_params(1, 3.0);
  auto ker = shared_kernel(1, prm.cap_order);
  CompactSet F = CompactSet::intervals({{-1.0, 1.0}});
  PotentialTerms W = w_potential(F, point1(0.3), 0.25, prm, *ker);
  const double gamma = 0.5 * prm.dimension - 1.0 / (prm.q - 1.0);
  double s = 0.0;
  CapacityControls cap;
  cap.h = 1.0 / 32.0;  // the shared one-dimensional slice resolution
  int prev_n = -1;
  for (const auto& term : W.terms) {
    CHECK(term.n > prev_n);
    prev_n = term.n;
    CHECK(term.n < W.n_bound);
    CHECK(term.weight ==
          doctest::Approx(std::pow(term.n + 1.0, gamma) *
                          std::exp(-0.25 * term.n))
              .epsilon(1e-12));
    CHECK(term.capacity >= 0.0);
    if (term.empty || term.skipped) {
      CHECK(term.capacity == 0.0);
      continue;
    }
    // Independent recomputation of every solved term.
    CapacityResult r = bessel_capacity(term.scaled, prm, *ker, cap);
    CHECK(r.value == doctest::Approx(term.capacity).epsilon(1e-10));
    s += term.weight * r.value;
  }
  CHECK(W.total == doctest::Approx(W.prefactor * s).epsilon(1e-10));
}

TEST_CASE("similarity transformation law") {
  Params prm = make_params(1, 3.0);
  auto ker = shared_kernel(1, prm.cap_order);
  CompactSet F = CompactSet::intervals({{-1.0, 1.0}});
  const Vec x0 = point1(0.0);

  auto [l1, r1] = similarity_pair(F, x0, 1.0, 1.0, prm, *ker);
  CHECK(l1 == r1);

  for (double k : {4.0, 0.25}) {
    auto [lhs, rhs] = similarity_pair(F, x0, 1.0, k, prm, *ker);
    CHECK(std::abs(lhs - rhs) / rhs < 0.05);
  }
  // Non-dyadic scale exercises the same law away from exact arithmetic.
  auto [ln, rn] = similarity_pair(F, point1(0.4), 0.7, 2.7, prm, *ker);
  CHECK(std::abs(ln - rn) / rn < 0.01);

  CHECK_THROWS_AS(similarity_pair(F, x0, 1.0, 0.0, prm, *ker),
                  InvalidParameterError);
}

TEST_CASE("potential is monotone in the set") {
  Params prm = make_params(1, 3.0);
  auto ker = shared_kernel(1, prm.cap_order);
  CompactSet F1 = CompactSet::intervals({{-0.5, 0.5}});
  CompactSet F2 = CompactSet::intervals({{-1.0, 1.0}});
  for (auto [xv, t] : {std::pair{0.0, 1.0}, {0.5, 0.5}, {2.0, 0.3}}) {
    const double w1 = w_potential(F1, point1(xv), t, prm, *ker).total;
    const double w2 = w_potential(F2, point1(xv), t, prm, *ker).total;
    CHECK(w1 <= w2 * (1.0 + 1e-2) + 1e-12);
  }
}

TEST_CASE("potential decays with distance at the series rate") {
  Params prm = make_params(1, 3.0);
  auto ker = shared_kernel(1, prm.cap_order);
  CompactSet F = CompactSet::intervals({{-1.0, 1.0}});
  const double t = 1.0;
  const double w2 = w_potential(F, point1(2.0), t, prm, *ker).total;
  const double w4 = w_potential(F, point1(4.0), t, prm, *ker).total;
  const double w8 = w_potential(F, point1(8.0), t, prm, *ker).total;
  // Doubling the distance d pushes the leading index up by about 3 d^2 / t;
  // the cushion absorbs the discrete annulus boundaries.
  const double d2 = 1.0, d4 = 3.0;
  CHECK(w4 <= w2 * std::exp(-(3.0 * d2 * d2 / t - 2.0) / 4.0));
  CHECK(w8 <= w4 * std::exp(-(3.0 * d4 * d4 / t - 2.0) / 4.0));
  CHECK(w8 > 0.0);
}

TEST_CASE("potential is translation equivariant") {
  Params prm = make_params(1, 3.0);
  auto ker = shared_kernel(1, prm.cap_order);
  CompactSet F = CompactSet::intervals({{-1.0, 1.0}});
  const double z = 0.3;
  const double base = w_potential(F, point1(0.4), 0.7, prm, *ker).total;
  const double moved =
      w_potential(F.translated(point1(z)), point1(0.4 + z), 0.7, prm, *ker)
          .total;
  CHECK(moved == doctest::Approx(base).epsilon(0.01));
}

TEST_CASE("point-set potential vanishes under refinement") {
  Params prm = make_params(1, 3.5);
  auto ker = shared_kernel(1, prm.cap_order);
  Eigen::MatrixXd P(1, 1);
  P << 0.3;
  CompactSet pt = CompactSet::points(P);
  double first = 0.0, prev = std::numeric_limits<double>::infinity();
  for (double h : {0.2, 0.1, 0.05}) {
    PotentialControls pc;
    pc.h = h;
    const double w = w_potential(pt, point1(0.0), 1.0, prm, *ker, pc).total;
    CHECK(w < prev);
    if (first == 0.0) first = w;
    prev = w;
  }
  CHECK(prev < 0.5 * first);
}

TEST_CASE("weight cutoff truncates the series tail") {
  Params prm = make_params(1, 3.0);
  auto ker = shared_kernel(1, prm.cap_order);
  CompactSet F = CompactSet::intervals({{-1.0, 1.0}});
  PotentialControls pc;
  pc.weight_cutoff = 0.5;  // e^{-3/4} < 1/2: the series stops at the fourth
  PotentialTerms W = w_potential(F, point1(0.0), 0.25, prm, *ker, pc);
  CHECK(W.terms.size() == 3);
  CHECK(W.solves == 3);
  PotentialTerms full = w_potential(F, point1(0.0), 0.25, prm, *ker);
  CHECK(W.total < full.total);
  CHECK(W.total > 0.75 * full.total);
}

TEST_CASE("early-out returns a cheap upper bound without solving") {
  Params prm = make_params(1, 3.0);
  auto ker = shared_kernel(1, prm.cap_order);
  CompactSet F = CompactSet::intervals({{-1.0, 1.0}});
  PotentialTerms full = w_potential(F, point1(4.0), 1.0, prm, *ker);
  PotentialControls pc;
  pc.skip_below = 10.0;
  PotentialTerms cheap = w_potential(F, point1(4.0), 1.0, prm, *ker, pc);
  CHECK(cheap.below_threshold);
  CHECK(cheap.solves == 0);
  CHECK(cheap.total >= full.total);
  CHECK(cheap.total < pc.skip_below);
}

TEST_CASE("potential rejects bad inputs") {
  Params prm = make_params(1, 3.0);
  auto ker = shared_kernel(1, prm.cap_order);
  CompactSet F = CompactSet::intervals({{-1.0, 1.0}});
  CHECK_THROWS_AS(w_potential(F, point1(0.0), 0.0, prm, *ker),
                  InvalidParameterError);
  CHECK_THROWS_AS(w_potential(F, point1(0.0), -1.0, prm, *ker),
                  InvalidParameterError);
  CHECK_THROWS_AS(w_potential(F, Vec::Zero(2), 1.0, prm, *ker),
                  InvalidParameterError);
  // Below the critical exponent the series is the wrong object.
  Params sub = make_params(1, 2.0);
  CHECK_THROWS_AS(
      w_potential(F, point1(0.0), 1.0, sub, *shared_kernel(1, sub.cap_order)),
      UnsupportedError);
}
