#include "capwiener/verify.hpp"

#include <algorithm>
#include <cmath>

namespace capwiener {

namespace {

// A point inside F to anchor the sample grid: midpoint of the component
// nearest to the bounding-box center (intervals), or the nearest generator.
Vec representative_point(const CompactSet& F) {
  Vec lo, hi;
  F.bounding_box(lo, hi);
  const Vec center = 0.5 * (lo + hi);
  switch (F.variant()) {
    case CompactSet::Variant::Intervals:
    case CompactSet::Variant::Cantor: {
      const auto& comp = F.components();
      Vec best(1);
      double bestd = std::numeric_limits<double>::infinity();
      for (const auto& ab : comp) {
        const double mid = 0.5 * (ab[0] + ab[1]);
        if (std::abs(mid - center[0]) < bestd) {
          bestd = std::abs(mid - center[0]);
          best[0] = mid;
        }
      }
      return best;
    }
    case CompactSet::Variant::Balls: {
      long best = 0;
      double bestd = std::numeric_limits<double>::infinity();
      for (long j = 0; j < F.ball_centers().cols(); ++j) {
        const double d = (F.ball_centers().col(j) - center).norm();
        if (d < bestd) {
          bestd = d;
          best = j;
        }
      }
      Vec c = F.ball_centers().col(best);
      if (F.contains(c)) return c;
      // Shell-restricted ball: step to the inner shell radius.
      Vec probe = c;
      probe[0] += F.shells().empty() ? 0.0 : F.shells()[0].rmin;
      return F.contains(probe) ? probe : c;
    }
    case CompactSet::Variant::Points:
      return F.point_list().col(0);
  }
  return center;
}

double auto_domain(const CompactSet& F, double T) {
  return F.is_empty() ? 6.0 : F.bounding_radius() + 6.0 * std::sqrt(T) + 1.0;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> v;
  if (count <= 1) {
    v.push_back(hi);
    return v;
  }
  for (int i = 0; i < count; ++i)
    v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  return v;
}

// Worst relative duality gap among the solved series terms.
double series_gap_rel(const PotentialTerms& series) {
  double worst = 0.0;
  for (const auto& term : series.terms)
    if (!term.empty && !term.skipped && term.capacity > 0.0)
      worst = std::max(worst, term.gap / term.capacity);
  return worst;
}

}  // namespace

RatioReport bilateral_ratio(const CompactSet& F, const std::string& name,
                            const Params& prm,
                            const BilateralControls& controls) {
  RatioReport rep;
  rep.fixture = name;
  rep.dimension = prm.dimension;
  rep.q = prm.q;
  if (F.is_empty()) return rep;  // vacuous: no samples at all

  SpaceTimeGrid grid = controls.grid;
  grid.dimension = prm.dimension;
  grid.radial = prm.dimension >= 2;
  if (grid.L <= 0.0) grid.L = auto_domain(F, controls.T);
  grid.T = controls.T;

  MaximalResult mx =
      maximal_solution(F, prm, grid, controls.maximal, controls.pde);
  rep.k_final = mx.k_final;
  rep.doublings = mx.doublings;

  auto kernel = shared_kernel(prm.dimension, prm.cap_order);
  const double sqT = std::sqrt(controls.T);
  const std::vector<double> ts =
      log_spaced(std::max(grid.t_min(), controls.T / 64.0), controls.T,
                 controls.t_count);
  // Distances: 0 (a point of F), then log-spaced out to 4 sqrt(T).
  std::vector<double> dists = {0.0};
  for (double d : log_spaced(0.25 * sqT, 4.0 * sqT, controls.x_count - 1))
    dists.push_back(d);
  const Vec x0 = representative_point(F);
  Vec blo, bhi;
  F.bounding_box(blo, bhi);

  PotentialControls pot = controls.pot;
  pot.skip_below = controls.denom_floor * 0.1;
  pot.cap_upper = 1.0;

  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  for (double d : dists) {
    Vec x = x0;
    if (d > 0.0) {
      x = Vec::Zero(prm.dimension);
      x[0] = bhi[0] + d;  // walk outward along the first axis
    }
    const double coord = prm.dimension >= 2 ? x.norm() : x[0];
    for (double t : ts) {
      RatioSample s;
      s.t = t;
      s.dist = F.distance(x);
      s.coord = coord;
      s.u = mx.field.value(t, coord);
      PotentialTerms wt = w_potential(F, x, t, prm, *kernel, pot);
      s.w = wt.total;
      rep.max_cap_gap_rel = std::max(rep.max_cap_gap_rel, series_gap_rel(wt));
      if (!wt.below_threshold && s.w > controls.denom_floor &&
          s.u > controls.denom_floor) {
        s.included = true;
        s.ratio = s.u / s.w;
        rep.min_ratio = std::min(rep.min_ratio, s.ratio);
        rep.max_ratio = std::max(rep.max_ratio, s.ratio);
        ++rep.included;
      } else {
        ++rep.excluded;
      }
      rep.samples.push_back(s);
    }
  }
  if (rep.included == 0) rep.min_ratio = 0.0;
  rep.scheme_change = mx.last_change;
  std::vector<double> ratios;
  for (const auto& s : rep.samples)
    if (s.included) ratios.push_back(s.ratio);
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    rep.median_ratio = ratios[ratios.size() / 2];
  }
  return rep;
}

LowerBoundReport lower_bound_experiment(const CompactSet& F, const Vec& x,
                                        double t, const Params& prm,
                                        const LowerBoundControls& controls) {
  LowerBoundReport rep;
  rep.t = t;
  rep.x = x;
  if (F.is_empty()) return rep;  // vacuous: everything stays zero

  auto kernel = shared_kernel(prm.dimension, prm.cap_order);
  PotentialTerms series = w_potential(F, x, t, prm, *kernel, controls.pot);
  rep.w_total = series.total;
  rep.max_cap_gap_rel = series_gap_rel(series);

  SlicedMeasure mu = build_capacitary_mu(series, prm);
  Est4Result est4 = est4_check(series, mu, prm);
  rep.est4_lhs = est4.lhs;
  rep.est4_rhs = est4.rhs;
  rep.est4_ok = est4.lhs >= (1.0 - controls.est4_tol) * est4.rhs;

  EpsDoublingResult eps =
      eps_doubling_search(mu, prm, controls.duhamel);
  rep.heat = eps.heat_mu;
  rep.nl = eps.nl_mu;
  rep.eps_star = eps.eps;
  rep.halvings = eps.halvings;
  rep.lower_at_eps = eps.lower_at_eps;
  rep.refine_delta = eps.duhamel.refine_delta;

  SpaceTimeGrid grid = controls.grid;
  grid.dimension = prm.dimension;
  grid.radial = prm.dimension >= 2;
  if (grid.L <= 0.0) grid.L = auto_domain(F, t);
  grid.T = t;

  MeasureRunControls mr;
  mr.eps0 = controls.duhamel.eps0_rel * t;
  MeasureRunResult run = solve_with_measure(
      mu.total.scaled_by(eps.eps), prm, grid, mr, controls.pde);
  rep.sens_delta = run.sens_delta;
  rep.u_pde =
      run.field.value(t, prm.dimension >= 2 ? x.norm() : x[0]);
  rep.chain_ok = rep.u_pde >= (1.0 - controls.chain_tol) * rep.lower_at_eps &&
                 rep.lower_at_eps > 0.0;
  return rep;
}

UplemReport uplem_experiment(const CompactSet& F, const Params& prm, double r,
                             double rho, const std::vector<double>& times,
                             const std::vector<double>& xs,
                             const UplemControls& controls) {
  if (!(r > 0.0) || !(rho > 0.0))
    throw InvalidParameterError("uplem: r and rho must be positive");
  UplemReport rep;
  rep.r = r;
  rep.rho = rho;
  if (F.is_empty()) return rep;
  if (F.bounding_radius() > r + 1e-9)
    throw InvalidParameterError("uplem: set must sit inside the r-ball");

  auto kernel = shared_kernel(prm.dimension, prm.cap_order);
  CapacityResult rel = relative_capacity(F, Vec::Zero(prm.dimension), r + rho,
                                         prm, *kernel, controls.cap);
  rep.relative_cap = rel.value;
  rep.cap_gap_rel = rel.value > 0.0 ? rel.gap / rel.value : 0.0;

  const double t_lo = (r + 3.0 * rho) * (r + 3.0 * rho);
  double t_max = t_lo;
  for (double t : times) t_max = std::max(t_max, t);
  double x_max = 0.0;
  for (double xv : xs) x_max = std::max(x_max, std::abs(xv));

  SpaceTimeGrid grid = controls.grid;
  grid.dimension = prm.dimension;
  grid.radial = prm.dimension >= 2;
  if (grid.L <= 0.0)
    grid.L = std::max(auto_domain(F, t_max), x_max + 2.0);
  grid.T = t_max;

  MaximalResult mx =
      maximal_solution(F, prm, grid, controls.maximal, controls.pde);

  const double shape_fac = std::pow(1.0 + r / rho, 0.5 * prm.dimension);
  for (double t : times) {
    for (double xv : xs) {
      UplemSample s;
      s.t = t;
      s.x = xv;
      if (t < t_lo - 1e-12) {
        rep.samples.push_back(s);  // outside the lemma's time range
        continue;
      }
      s.u = mx.field.value(t, prm.dimension >= 2 ? std::abs(xv) : xv);
      const double shift = std::abs(xv) - r - 3.0 * rho;
      s.bound = shape_fac * std::pow(t, -0.5 * prm.dimension) *
                std::exp(-shift * shift / (4.0 * t)) * rep.relative_cap;
      if (s.bound > controls.denom_floor) {
        s.included = true;
        s.ratio = s.u / s.bound;
        rep.c_max = std::max(rep.c_max, s.ratio);
        ++rep.included;
      }
      rep.samples.push_back(s);
    }
  }
  rep.scheme_change = mx.last_change;
  return rep;
}

std::pair<double, double> capacity_equivalence_check(
    const CompactSet& F_nj, const Vec& a, int n, const Params& prm,
    const BesselKernel& kernel, CapacityControls controls) {
  if (n < 0)
    throw InvalidParameterError("equivalence: slice index must be >= 0");
  if (F_nj.is_empty()) return {0.0, 0.0};
  const double root = std::sqrt(static_cast<double>(n + 1));
  for (long j = 0; j < 1; ++j) {  // containment precondition
    PointMat pts = F_nj.discretize(std::max(controls.h, 1e-3));
    for (long i = 0; i < pts.cols(); ++i)
      if ((pts.col(i) - a).norm() > 1.0 / root + 1e-6)
        throw InvalidParameterError(
            "equivalence: piece must sit inside the 1/sqrt(n+1) ball");
  }
  const double lhs =
      relative_capacity(F_nj, a, 2.0 / root, prm, kernel, controls).value;
  // sqrt(n+1) * F_nj realized through the parabolic scaling map.
  const double rhs_cap =
      bessel_capacity(scale_set(F_nj, 1.0 / (n + 1.0)), prm, kernel, controls)
          .value;
  const double rhs = std::pow(n + 1.0, 0.5 * prm.dimension -
                                           1.0 / (prm.q - 1.0)) *
                     rhs_cap;
  return {lhs, rhs};
}

EquivalenceReport equivalence_sweep(const CompactSet& F, const Vec& x,
                                    double t, const Params& prm,
                                    const std::vector<int>& n_list,
                                    const EquivalenceControls& controls) {
  EquivalenceReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  auto kernel = shared_kernel(prm.dimension, prm.cap_order);
  const double rt = std::sqrt(t);

  for (int n : n_list) {
    CompactSet Fn = slice(F, x, t, n);
    SliceAdditivity add;
    add.n = n;
    if (Fn.is_empty()) {
      rep.slices.push_back(add);
      continue;
    }
    CapacityResult whole = bessel_capacity(Fn, prm, *kernel, controls.cap);
    add.whole = whole.value;
    if (whole.value > 0.0)
      rep.max_cap_gap_rel =
          std::max(rep.max_cap_gap_rel, whole.gap / whole.value);

    SphereCover cover = sphere_cover(x, t, n, prm.dimension);
    // Normalized instance: G = F / sqrt(t) seen from x / sqrt(t) at time 1.
    CompactSet Gn = slice(scale_set(F, t), x / rt, 1.0, n);
    for (long j = 0; j < cover.centers.cols(); ++j) {
      const Vec aj = cover.centers.col(j);
      CompactSet piece = Fn.with_ball(aj, cover.ball_radius);
      if (!piece.is_empty()) {
        CapacityResult part = bessel_capacity(piece, prm, *kernel, controls.cap);
        add.sum_parts += part.value;
        if (part.value > 0.0)
          rep.max_cap_gap_rel =
              std::max(rep.max_cap_gap_rel, part.gap / part.value);
        ++add.pieces;
      }
      // Unit-scale piece for the two-sided check.
      const Vec aj_unit = aj / rt;
      CompactSet piece_unit = Gn.with_ball(aj_unit, cover.ball_radius / rt);
      if (piece_unit.is_empty()) continue;
      auto [lhs, rhs] = capacity_equivalence_check(piece_unit, aj_unit, n, prm,
                                                   *kernel, controls.cap);
      if (lhs < controls.piece_floor && rhs < controls.piece_floor) continue;
      EquivalencePiece ep;
      ep.n = n;
      ep.j = static_cast<int>(j);
      ep.lhs = lhs;
      ep.rhs = rhs;
      ep.ratio = lhs / std::max(rhs, 1e-300);
      rep.min_ratio = std::min(rep.min_ratio, ep.ratio);
      rep.max_ratio = std::max(rep.max_ratio, ep.ratio);
      rep.pieces.push_back(ep);
    }
    add.ratio = add.sum_parts / std::max(add.whole, 1e-300);
    rep.slices.push_back(add);
  }
  if (rep.pieces.empty()) rep.min_ratio = 0.0;
  return rep;
}

Est5Report est5_experiment(const CompactSet& F, const Vec& x, double t,
                           const Params& prm, const std::vector<double>& scales,
                           const std::vector<double>& alphas,
                           const Est5Controls& controls) {
  Est5Report rep;
  auto kernel = shared_kernel(prm.dimension, prm.cap_order);
  rep.ratio_spread = 0.0;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (std::size_t si = 0; si < scales.size(); ++si) {
    const double k = scales[si];
    if (!(k > 0.0))
      throw InvalidParameterError("est5: scales must be positive");
    // Similarity-scaled family: set, point, and time transform together, so
    // the ratio below is scale-free up to discretization.
    const CompactSet Fk = scale_set(F, 1.0 / k);  // sqrt(k) * F
    const Vec xk = std::sqrt(k) * x;
    const double tk = k * t;
    PotentialTerms series =
        w_potential(Fk, xk, tk, prm, *kernel, controls.pot);
    rep.max_cap_gap_rel = std::max(rep.max_cap_gap_rel, series_gap_rel(series));
    SlicedMeasure mu = build_capacitary_mu(series, prm);
    DuhamelControls dc = controls.duhamel;
    const bool base_scale = std::abs(k - 1.0) < 1e-12;
    if (base_scale) {
      // The ratio rows must share one split convention across scales, so the
      // base row keeps dc.alpha; the requested ratios ride along as extra
      // splits of the same integral.
      for (double a : alphas)
        if (std::abs(a - dc.alpha) > 1e-12) dc.extra_alphas.push_back(a);
    }
    DuhamelResult duh = nonlinear_term(mu, prm, dc);
    Est5Scale sc;
    sc.k = k;
    sc.j1 = duh.j1;
    sc.j2 = duh.j2;
    sc.total = duh.j1 + duh.j2;
    sc.s_value = std::exp(-0.25) * series.total;
    sc.ratio = sc.total / std::max(sc.s_value, 1e-300);
    if (sc.s_value > 0.0) {
      rmin = std::min(rmin, sc.ratio);
      rmax = std::max(rmax, sc.ratio);
    }
    if (base_scale) {
      rep.alpha_splits = duh.splits;
      rep.refine_delta = duh.refine_delta;
    }
    rep.scales.push_back(sc);
  }
  if (std::isfinite(rmin) && rmin > 0.0) rep.ratio_spread = rmax / rmin;
  return rep;
}

SandwichReport subcritical_sandwich(const Params& prm,
                                    const SandwichControls& controls) {
  if (prm.supercritical)
    throw InvalidParameterError(
        "sandwich: requires a subcritical exponent q < (N+2)/N");
  SandwichReport rep;
  VssProfile profile = vss_profile(prm, controls.vss);
  if (!profile.exists)
    throw NonConvergedError("sandwich: no positive profile found",
                            profile.bracket_lo, profile.bracket_hi);
  rep.profile_f0 = profile.f0;
  rep.residual_sup = profile.residual_sup;

  CompactSet point = CompactSet::points(PointMat::Zero(prm.dimension, 1));
  SpaceTimeGrid grid = controls.grid;
  grid.dimension = prm.dimension;
  grid.radial = prm.dimension >= 2;
  if (grid.L <= 0.0) grid.L = auto_domain(point, grid.T);
  MaximalResult mx =
      maximal_solution(point, prm, grid, controls.maximal, controls.pde);
  rep.scheme_change = mx.last_change;

  const double flat_pref = std::pow(prm.q - 1.0, -1.0 / (prm.q - 1.0));
  const std::vector<double> ts =
      log_spaced(std::max(grid.t_min(), grid.T / 16.0), grid.T,
                 controls.t_count);
  rep.min_lower_margin = std::numeric_limits<double>::infinity();
  rep.min_upper_margin = std::numeric_limits<double>::infinity();
  for (double t : ts) {
    for (int i = 0; i < controls.x_count; ++i) {
      const double xv =
          (i * 2.0 * std::sqrt(t)) / std::max(1, controls.x_count - 1);
      SandwichSample s;
      s.x = xv;
      s.t = t;
      s.lower = vss_value(profile, xv, t, prm);
      s.mid = mx.field.value(t, xv);
      s.upper = flat_pref * std::pow(t, -1.0 / (prm.q - 1.0));
      rep.min_lower_margin =
          std::min(rep.min_lower_margin, (s.mid - s.lower) / s.upper);
      rep.min_upper_margin =
          std::min(rep.min_upper_margin, (s.upper - s.mid) / s.upper);
      rep.samples.push_back(s);
    }
  }
  return rep;
}

}  // namespace capwiener
