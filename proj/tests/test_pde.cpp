#include "doctest.h"

#include <cmath>

#include "capwiener/pde.hpp"

using namespace capwiener;

namespace {

Vec point1(double v) {
  Vec x(1);
  x << v;
  return x;
}

long node_count(const SpaceTimeGrid& g) {
  return 2 * std::lround(g.L / g.h) + 1;
}

Vec indicator_data(const CompactSet& F, const SpaceTimeGrid& g, double k) {
  Vec u0 = Vec::Zero(node_count(g));
  for (long j = 0; j < u0.size(); ++j) {
    if (F.distance(point1(-g.L + j * g.h)) <= g.h + 1e-12) u0[j] = k;
  }
  return u0;
}

DiscreteMeasure lebesgue_on_interval(double a, double b, double step) {
  DiscreteMeasure mu;
  const long m = std::lround((b - a) / step) + 1;
  mu.atoms.resize(1, m);
  mu.weights = Vec::Constant(m, step);
  for (long j = 0; j < m; ++j) mu.atoms(0, j) = a + step * j;
  return mu;
}

}  // namespace

TEST_CASE("flat data follows the absorption ODE at the center") {
  Params prm = make_params(1, 3.0);
  SpaceTimeGrid g;  // L=8, h=0.02, dt=h^2
  const Vec flat = Vec::Constant(node_count(g), 1.0);
  const double exact = std::pow(1.0 + 2.0 * 0.5, -0.5);

  PdeOptions opt;
  Field f = solve_semilinear(flat, prm, g, opt);
  const double err_implicit = std::abs(f.value(0.5, 0.0) - exact) / exact;
  CHECK(err_implicit < 1e-6);
  CHECK(f.q == doctest::Approx(3.0));
  CHECK(f.dimension == 1);
  CHECK(f.absorption);
  CHECK(f.spatial_integral(0) == doctest::Approx(16.0).epsilon(1e-12));

  opt.scheme = AbsorptionScheme::explicit_euler;
  Field fe = solve_semilinear(flat, prm, g, opt);
  CHECK(std::abs(fe.value(0.5, 0.0) - exact) / exact < 1e-3);

  opt.scheme = AbsorptionScheme::exact_flow;
  Field fx = solve_semilinear(flat, prm, g, opt);
  CHECK(std::abs(fx.value(0.5, 0.0) - exact) / exact < 1e-10);

  // Huge data forgets its size: the closed-form stiff branch keeps the step
  // stable and lands on the large-k ODE limit (1 + 2t)^{-1/2} -> 1 at k big.
  Field fs = solve_semilinear(Vec::Constant(node_count(g), 1e6), prm, g, {});
  CHECK(std::abs(fs.value(0.5, 0.0) - 1.0) < 1e-3);

  // Refining (h, dt) -> (h/2, dt/4) should cut the ODE error by far more
  // than the second-order target of 3x.
  SpaceTimeGrid gc;
  gc.h = 0.04;
  Field coarse = solve_semilinear(Vec::Constant(node_count(gc), 1.0), prm,
                                  gc, {});
  const double err_coarse =
      std::abs(coarse.value(0.5, 0.0) - exact) / exact;
  CHECK(err_coarse / err_implicit >= 3.0);

  // Interpolation reproduces stored entries exactly.
  const long i = f.times.size() / 2, j = f.xs.size() / 2;
  CHECK(f.value(f.times[i], f.xs[j]) == doctest::Approx(f.u(i, j)));
  CHECK(f.row_at(f.times[i]) == i);
}

TEST_CASE("absorption-free runs reproduce the heat kernel and conserve mass") {
  Params prm = make_params(1, 3.0);
  SpaceTimeGrid g;  // L=8, h=0.02
  DiscreteMeasure atom;
  atom.atoms.resize(1, 1);
  atom.atoms << 0.0;
  atom.weights = Vec::Constant(1, 1.0);

  MeasureRunControls mc;
  mc.eps0 = 0.01;
  PdeOptions opt;
  opt.absorption = false;
  MeasureRunResult r = solve_with_measure(atom, prm, g, mc, opt);
  CHECK_FALSE(r.field.absorption);
  CHECK(r.sens_delta < 6e-3);
  for (double x : {0.0, 0.3, 1.0}) {
    const double gk = heat_kernel(point1(x), 0.5 + r.eps0, 1);
    CHECK(r.field.value(0.5, x) == doctest::Approx(gk).epsilon(1e-3));
  }

  // Without absorption the only mass loss is boundary leakage, and the
  // Gaussian tail at |x| = L is far below everything.
  CHECK(mass_balance_residual(r.field, g.t_min(), 0.5) < 1e-6);
  CHECK(r.field.absorbed.maxCoeff() == 0.0);
}

TEST_CASE("mass balance closes on compactly supported runs and refines") {
  Params prm = make_params(1, 3.0);
  CompactSet F = CompactSet::intervals({{-1.0, 1.0}});

  double res[2];
  int i = 0;
  for (double h : {0.04, 0.02}) {
    SpaceTimeGrid g;
    g.h = h;
    g.store_every = 1;  // quadrature stride must follow dt to see the order
    Field f = solve_semilinear(indicator_data(F, g, 1e3), prm, g, {});
    res[i] = mass_balance_residual(f, 0.05, 0.5);
    CHECK(res[i] < 1e-2);
    ++i;
  }
  CHECK(res[0] / res[1] >= 3.0);  // measured ~16x: O(dt^2) quadrature
  CHECK(res[1] < 1e-5);

  SpaceTimeGrid g;
  Field f = solve_semilinear(indicator_data(F, g, 1e3), prm, g, {});
  CHECK_THROWS_AS(mass_balance_residual(f, 0.3, 0.3), InvalidParameterError);
  CHECK_THROWS_AS(mass_balance_residual(f, 0.4, 0.2), InvalidParameterError);
}

TEST_CASE("absorbed-mass tally accounts for a leaky boxed run") {
  // Flat data to the walls: the Dirichlet boundary takes a real outflow.
  // The per-step tally plus the integral drop must expose exactly that flux,
  // and the stored-row quadrature must agree with the tally.
  Params prm = make_params(1, 3.0);
  SpaceTimeGrid g;  // L=8, h=0.02
  Field f = solve_semilinear(Vec::Constant(node_count(g), 1.0), prm, g, {});
  const long r1 = f.row_at(g.t_min()), r2 = f.row_at(0.5);
  const double I1 = f.spatial_integral(r1);
  const double I2 = f.spatial_integral(r2);
  const double tally = f.absorbed[r2] - f.absorbed[r1];
  const double outflow = I1 - I2 - tally;
  CHECK(outflow > 0.0);
  CHECK(outflow < 0.12 * I1);

  double quad = 0.0;
  for (long i = r1; i < r2; ++i) {
    quad += 0.5 * (f.times[i + 1] - f.times[i]) *
            (f.spatial_integral_pow(i, 3.0) +
             f.spatial_integral_pow(i + 1, 3.0));
  }
  CHECK(quad == doctest::Approx(tally).epsilon(1e-2));
}

TEST_CASE("maximal solution saturates under the flat barrier") {
  Params prm = make_params(1, 3.0);
  SpaceTimeGrid g;
  g.L = 6.0;
  g.h = 0.05;
  g.T = 0.5;
  CompactSet F = CompactSet::intervals({{-1.0, 1.0}});
  MaximalResult mx = maximal_solution(F, prm, g);
  CHECK(mx.doublings <= 20);
  CHECK(mx.last_change <= 1e-3);
  CHECK(mx.k_final >= 10.0);

  // Barrier ((q-1)t)^{-1/(q-1)} caps every row past the resolution floor.
  for (long i = 0; i < mx.field.times.size(); ++i) {
    const double t = mx.field.times[i];
    if (t < g.t_min()) continue;
    CHECK(mx.field.u.row(i).maxCoeff() <=
          std::pow(2.0 * t, -0.5) * (1.0 + 1e-3));
  }
  const double bar = std::pow(2.0 * 0.5, -0.5);
  CHECK(mx.field.value(0.5, 0.0) > 0.8 * bar);
  CHECK(mx.field.value(0.5, 0.0) < bar);

  // Discrete comparison: bigger data, bigger solution, everywhere.
  Field lo = solve_semilinear(indicator_data(F, g, 10.0), prm, g, {});
  Field hi = solve_semilinear(indicator_data(F, g, 20.0), prm, g, {});
  CHECK((lo.u - hi.u).maxCoeff() <= 1e-12);

  // Monotone in the set as well.
  MaximalResult small =
      maximal_solution(CompactSet::intervals({{-0.4, 0.4}}), prm, g);
  CHECK((small.field.u - mx.field.u).maxCoeff() <= 1e-9);

  // Nothing to saturate: the empty set yields the zero field.
  MaximalResult none = maximal_solution(CompactSet::empty(1), prm, g);
  CHECK(none.k_final == 0.0);
  CHECK(none.doublings == 0);
  CHECK(none.field.u.maxCoeff() == 0.0);
  CHECK(mass_balance_residual(none.field, g.t_min(), 0.4) == 0.0);

  // A set beyond the grid is a configuration error, not a silent zero.
  CHECK_THROWS_AS(
      maximal_solution(CompactSet::intervals({{40.0, 41.0}}), prm, g),
      InvalidParameterError);
}

TEST_CASE("maximal solution is parabolically self-similar") {
  Params prm = make_params(1, 3.0);
  SpaceTimeGrid g1;
  g1.L = 6.0;
  g1.h = 0.05;
  g1.T = 0.5;
  MaximalResult m1 =
      maximal_solution(CompactSet::intervals({{-1.0, 1.0}}), prm, g1);

  // Shrinking the set by sqrt(k) with grid, box and horizon shrunk to match
  // conjugates the whole discrete flow, so k^{1/(q-1)} u(sqrt(k) x, k t)
  // lands on the small-set solution almost exactly (both ladders saturate).
  SpaceTimeGrid g2;
  g2.L = 3.0;
  g2.h = 0.025;
  g2.T = 0.13;
  MaximalResult m2 =
      maximal_solution(CompactSet::intervals({{-0.5, 0.5}}), prm, g2);
  for (double tp : {0.05, 0.1}) {
    for (double x : {0.0, 0.3}) {
      const double lhs = 2.0 * m1.field.value(4.0 * tp, 2.0 * x);
      const double rhs = m2.field.value(tp, x);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
  }
}

TEST_CASE("measure runs: mollified start, sensitivity guard, domination") {
  Params prm = make_params(1, 3.0);
  SpaceTimeGrid g;
  g.L = 6.0;
  g.h = 0.05;
  g.T = 0.5;
  DiscreteMeasure mu = lebesgue_on_interval(-1.0, 1.0, 0.05);

  MeasureRunControls mc;
  mc.eps0 = 0.005;
  MeasureRunResult r = solve_with_measure(mu, prm, g, mc);
  CHECK(r.eps0 == doctest::Approx(0.005));
  CHECK(r.sens_delta < 5e-3);

  // Row zero is the mollified layer on the interior nodes.
  CHECK(r.field.times[0] == 0.0);
  for (double x : {0.0, 0.4, 1.3}) {
    CHECK(r.field.value(0.0, x) ==
          doctest::Approx(heat_of_measure(mu, point1(x), mc.eps0))
              .epsilon(1e-12));
  }

  // Absorption only removes: the run sits under the pure heat extension.
  for (double t : {0.05, 0.2, 0.45}) {
    for (double x : {-1.0, 0.0, 0.5}) {
      CHECK(r.field.value(t, x) <=
            heat_of_measure(mu, point1(x), t + r.eps0) + 1e-9);
    }
  }

  MeasureRunControls strict = mc;
  strict.sens_tol = 1e-9;
  CHECK_THROWS_AS(solve_with_measure(mu, prm, g, strict), NonConvergedError);

  MeasureRunControls bad;
  bad.eps0 = 0.0;
  CHECK_THROWS_AS(solve_with_measure(mu, prm, g, bad), InvalidParameterError);

  MeasureRunControls mc2 = mc;
  mc2.sensitivity = false;
  MeasureRunResult z = solve_with_measure(DiscreteMeasure{}, prm, g, mc2);
  CHECK(z.field.u.maxCoeff() == 0.0);
}

TEST_CASE("measure sequence climbs toward the maximal solution") {
  Params prm = make_params(1, 3.0);
  SpaceTimeGrid g;
  g.L = 6.0;
  g.h = 0.05;
  g.T = 0.5;
  MaximalResult mx =
      maximal_solution(CompactSet::intervals({{-1.0, 1.0}}), prm, g);
  DiscreteMeasure mu = lebesgue_on_interval(-1.0, 1.0, 0.05);

  MeasureRunControls mc;
  mc.eps0 = g.h * g.h;
  MonotoneSequenceResult ms = monotone_measure_sequence(
      mu, {1.0, 4.0, 16.0, 64.0}, mx.field, prm, g, mc);
  REQUIRE(ms.steps.size() == 4);
  CHECK(ms.monotone);
  CHECK(ms.max_violation <= 1e-9);
  for (std::size_t i = 1; i < ms.steps.size(); ++i) {
    CHECK(ms.steps[i].ratio_to_reference >=
          ms.steps[i - 1].ratio_to_reference);
    CHECK(ms.steps[i].center_value >= ms.steps[i - 1].center_value);
  }
  CHECK(ms.final_ratio >= 0.5);  // saturation evidence at the center
  CHECK(ms.final_ratio <= 1.02);

  CHECK_THROWS_AS(
      monotone_measure_sequence(mu, {1.0, 1.0}, mx.field, prm, g, mc),
      InvalidParameterError);
  CHECK_THROWS_AS(monotone_measure_sequence(mu, {}, mx.field, prm, g, mc),
                  InvalidParameterError);
}
