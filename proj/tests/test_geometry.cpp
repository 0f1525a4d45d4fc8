#include "doctest.h"

#include <random>

#include "capwiener/geometry.hpp"

using namespace capwiener;

namespace {

Vec pt1(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

Vec pt2(double x, double y) {
  Vec v(2);
  v[0] = x;
  v[1] = y;
  return v;
}

}  // namespace

TEST_CASE("interval slices at the unit scale") {
  CompactSet F = CompactSet::intervals({{-1.0, 1.0}});
  CompactSet S0 = slice(F, Vec::Zero(1), 1.0, 0);
  REQUIRE(S0.components().size() == 1);
  CHECK(S0.components()[0][0] == doctest::Approx(-1.0));
  CHECK(S0.components()[0][1] == doctest::Approx(1.0));

  // Annulus n=2 at t=0.25: radii sqrt(0.5), sqrt(0.75), two mirror pieces.
  CompactSet S2 = slice(F, Vec::Zero(1), 0.25, 2);
  REQUIRE(S2.components().size() == 2);
  CHECK(S2.components()[0][0] == doctest::Approx(-std::sqrt(0.75)));
  CHECK(S2.components()[0][1] == doctest::Approx(-std::sqrt(0.5)));
  CHECK(S2.components()[1][0] == doctest::Approx(std::sqrt(0.5)));
  CHECK(S2.components()[1][1] == doctest::Approx(std::sqrt(0.75)));
}

TEST_CASE("point set slices pick exactly one index") {
  PointMat p(1, 1);
  p(0, 0) = 5.0;
  CompactSet F = CompactSet::points(p);
  // dist^2 = 25 sits on a slicing sphere; the half-open convention puts the
  // point in slice 25 = [sqrt(25), sqrt(26)), matching floor(dist^2 / t).
  for (int n = 0; n <= 30; ++n) {
    CompactSet S = slice(F, Vec::Zero(1), 1.0, n);
    if (n == 25) {
      CHECK_FALSE(S.is_empty());
      CHECK(S.contains(pt1(5.0)));
    } else {
      CHECK(S.is_empty());
    }
  }
  CHECK(slice_range(F, Vec::Zero(1), 1.0) == 26);
}

TEST_CASE("slice_range on basic shapes") {
  CompactSet I = CompactSet::intervals({{-1.0, 1.0}});
  CHECK(slice_range(I, Vec::Zero(1), 4.0) == 1);
  PointMat c(2, 1);
  c.setZero();
  CompactSet B = CompactSet::balls(c, Vec::Constant(1, 2.0));
  CHECK(slice_range(B, pt2(3.0, 0.0), 1.0) == 26);
}

TEST_CASE("slices tile space") {
  CompactSet F = CompactSet::intervals({{-2.0, 2.0}});
  const Vec x = pt1(0.3);
  const double t = 0.21;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  int skipped = 0;
  for (int it = 0; it < 1000; ++it) {
    const double y = U(rng);
    const double r2 = (y - x[0]) * (y - x[0]);
    // Skip points within rounding distance of a slicing sphere.
    const double frac = r2 / t - std::floor(r2 / t);
    if (frac < 1e-9 || frac > 1.0 - 1e-9) {
      ++skipped;
      continue;
    }
    int hits = 0;
    for (int n = 0; n <= slice_range(F, x, t); ++n)
      if (slice(F, x, t, n).contains(pt1(y))) ++hits;
    CHECK(hits == 1);
  }
  CHECK(skipped < 10);
}

TEST_CASE("slice_range is exact at the top index") {
  CompactSet F = CompactSet::intervals({{0.5, 1.75}});
  const Vec x = pt1(-0.25);  // max dist = 2.0
  // The largest nonempty index is always slice_range - 1, also when
  // dist^2 / t is an exact integer and the far endpoint lies on a slicing
  // sphere (the half-open shell at that integer owns it as a zero-length
  // piece).
  for (double t : {0.37, 0.81, 0.25, 1.0}) {
    const int top = slice_range(F, x, t) - 1;
    CHECK_FALSE(slice(F, x, t, top).is_empty());
    CHECK(slice(F, x, t, top + 1).is_empty());
  }
  for (double t : {0.25, 1.0}) {
    const int m = int(std::lround(4.0 / t));
    CHECK(slice_range(F, x, t) == m + 1);
  }
}

TEST_CASE("cantor iterates are unions of 2^m intervals") {
  for (int depth = 1; depth <= 4; ++depth) {
    CompactSet C = CompactSet::cantor(-1.0, 1.0, 1.0 / 3.0, depth);
    CHECK(int(C.components().size()) == (1 << depth));
    const double piece = 2.0 * std::pow(1.0 / 3.0, depth);
    for (const auto& iv : C.components())
      CHECK(iv[1] - iv[0] == doctest::Approx(piece).epsilon(1e-12));
  }
  // Depth 2 on [0,1], ratio 1/3: the four classic middle-thirds pieces.
  CompactSet C2 = CompactSet::cantor(0.0, 1.0, 1.0 / 3.0, 2);
  REQUIRE(C2.components().size() == 4);
  CHECK(C2.components()[0][1] == doctest::Approx(1.0 / 9.0));
  CHECK(C2.components()[1][0] == doctest::Approx(2.0 / 9.0));
  CHECK(C2.components()[2][0] == doctest::Approx(2.0 / 3.0));
  CHECK(C2.components()[3][0] == doctest::Approx(8.0 / 9.0));
}

TEST_CASE("discretize endpoints and pitch") {
  CompactSet I = CompactSet::intervals({{0.0, 1.0}});
  PointMat g = I.discretize(0.5);
  REQUIRE(g.cols() == 3);
  CHECK(g(0, 0) == doctest::Approx(0.0));
  CHECK(g(0, 1) == doctest::Approx(0.5));
  CHECK(g(0, 2) == doctest::Approx(1.0));

  CHECK(CompactSet::empty(1).discretize(0.5).cols() == 0);

  CompactSet C2 = CompactSet::cantor(0.0, 1.0, 1.0 / 3.0, 2);
  CHECK(C2.discretize(1.0 / 9.0).cols() == 12);
}

TEST_CASE("scale_set is the parabolic rescaling") {
  CompactSet I = CompactSet::intervals({{-1.0, 1.0}});
  CompactSet S = scale_set(I, 4.0);
  CHECK(S.components()[0][0] == doctest::Approx(-0.5));
  CHECK(S.components()[0][1] == doctest::Approx(0.5));

  PointMat c(2, 1);
  c.col(0) = pt2(1.0, -2.0);
  CompactSet B = scale_set(CompactSet::balls(c, Vec::Constant(1, 0.8)), 4.0);
  CHECK(B.ball_centers()(0, 0) == doctest::Approx(0.5));
  CHECK(B.ball_centers()(1, 0) == doctest::Approx(-1.0));
  CHECK(B.ball_radii()[0] == doctest::Approx(0.4));

  CompactSet C = scale_set(CompactSet::cantor(0.0, 1.0, 0.25, 3), 4.0);
  CHECK(C.cantor_gen().ratio == doctest::Approx(0.25));
  CHECK(C.cantor_gen().depth == 3);
  CHECK(C.cantor_gen().b == doctest::Approx(0.5));

  // Composition: (F/sqrt(k))/sqrt(m) = F/sqrt(km).
  CompactSet left = scale_set(scale_set(I, 2.0), 3.0);
  CompactSet right = scale_set(I, 6.0);
  CHECK(left.components()[0][0] ==
        doctest::Approx(right.components()[0][0]).epsilon(1e-12));
  CHECK(left.components()[0][1] ==
        doctest::Approx(right.components()[0][1]).epsilon(1e-12));
}

TEST_CASE("membership and distance agree across variants") {
  CompactSet I = CompactSet::intervals({{-1.0, -0.25}, {0.5, 2.0}});
  CHECK(I.contains(pt1(-0.5)));
  CHECK_FALSE(I.contains(pt1(0.0)));
  CHECK(I.distance(pt1(0.0)) == doctest::Approx(0.25));
  CHECK(I.distance(pt1(3.0)) == doctest::Approx(1.0));

  PointMat c(2, 2);
  c.col(0) = pt2(0.0, 0.0);
  c.col(1) = pt2(3.0, 0.0);
  Vec r(2);
  r << 1.0, 0.5;
  CompactSet B = CompactSet::balls(c, r);
  CHECK(B.contains(pt2(0.9, 0.0)));
  CHECK_FALSE(B.contains(pt2(1.5, 0.0)));
  CHECK(B.distance(pt2(1.5, 0.0)) == doctest::Approx(0.5));
  CHECK(B.distance(pt2(3.0, 1.0)) == doctest::Approx(0.5));
}

TEST_CASE("bounding radius dominates the discretization") {
  for (const CompactSet& F :
       {CompactSet::intervals({{-1.5, 0.25}, {1.0, 1.75}}),
        CompactSet::cantor(-1.0, 2.0, 0.3, 3)}) {
    const double R = F.bounding_radius();
    PointMat g = F.discretize(0.05);
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      CHECK(g.col(j).norm() <= R + 1e-12);
  }
}

TEST_CASE("with_ball and with_shell intersections") {
  CompactSet I = CompactSet::intervals({{-2.0, 2.0}});
  CompactSet cut = I.with_ball(pt1(1.0), 0.5);
  REQUIRE(cut.components().size() == 1);
  CHECK(cut.components()[0][0] == doctest::Approx(0.5));
  CHECK(cut.components()[0][1] == doctest::Approx(1.5));

  CompactSet ring = I.with_shell(pt1(0.0), 1.0, 1.5);
  REQUIRE(ring.components().size() == 2);
  CHECK(ring.components()[0][0] == doctest::Approx(-1.5));
  CHECK(ring.components()[0][1] == doctest::Approx(-1.0));
  CHECK(ring.components()[1][0] == doctest::Approx(1.0));
  CHECK(ring.components()[1][1] == doctest::Approx(1.5));
  CHECK(ring.contains(pt1(1.25)));
  CHECK_FALSE(ring.contains(pt1(0.0)));
}

TEST_CASE("annulus slice bounds") {
  AnnulusSlice T;
  T.center = Vec::Zero(2);
  T.t = 0.5;
  T.n = 0;
  CHECK(T.inner() == doctest::Approx(0.0));
  CHECK(T.outer() == doctest::Approx(std::sqrt(0.5)));
  T.n = 3;
  CHECK(T.inner() == doctest::Approx(std::sqrt(1.5)));
  CHECK(T.outer() == doctest::Approx(std::sqrt(2.0)));
  CHECK(T.inner() < T.outer());
}

TEST_CASE("sphere cover spacing, count, and coverage") {
  std::mt19937_64 rng(11);
  for (int n : {0, 1, 3, 6}) {
    SphereCover cov = sphere_cover(Vec::Zero(2), 1.0, n, 2);
    const long J = cov.centers.cols();
    REQUIRE(J >= 1);
    // Packing count is capped by circumference over spacing.
    CHECK(double(J) <=
          2.0 * M_PI * cov.mid_radius / cov.min_spacing + 1.0);
    if (n == 1) CHECK(J <= 16);
    const double spacing = std::sqrt(1.0) / std::sqrt(2.0 * (n + 1));
    for (long a = 0; a < J; ++a)
      for (long b = a + 1; b < J; ++b)
        CHECK((cov.centers.col(a) - cov.centers.col(b)).norm() >=
              spacing - 1e-12);
    CHECK(cov.min_spacing == doctest::Approx(spacing));
    CHECK(cov.mid_radius ==
          doctest::Approx(0.5 * (std::sqrt(n + 1.0) + std::sqrt(double(n)))));

    // Monte-Carlo coverage of the annular slice by the cover balls.
    AnnulusSlice T;
    T.center = Vec::Zero(2);
    T.t = 1.0;
    T.n = n;
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> rad(T.inner(), T.outer());
    for (int it = 0; it < 2000; ++it) {
      const double a = ang(rng), r = rad(rng);
      Vec y = pt2(r * std::cos(a), r * std::sin(a));
      bool covered = false;
      for (long jb = 0; jb < J && !covered; ++jb)
        covered = (y - cov.centers.col(jb)).norm() <= cov.ball_radius + 1e-12;
      CHECK(covered);
    }
  }

  // N = 1 degenerates to the two annulus endpoints; mid_radius is absolute.
  SphereCover one = sphere_cover(pt1(0.5), 0.25, 2, 1);
  REQUIRE(one.centers.cols() == 2);
  CHECK(one.mid_radius ==
        doctest::Approx(0.5 * (std::sqrt(3.0) + std::sqrt(2.0)) *
                        std::sqrt(0.25)));
  CHECK(std::abs(one.centers(0, 0) - 0.5) == doctest::Approx(one.mid_radius));
}

TEST_CASE("translated shifts every variant") {
  CompactSet I = CompactSet::intervals({{-1.0, 1.0}}).translated(pt1(2.0));
  CHECK(I.components()[0][0] == doctest::Approx(1.0));
  CHECK(I.components()[0][1] == doctest::Approx(3.0));
}
