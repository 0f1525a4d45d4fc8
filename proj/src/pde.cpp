#include "capwiener/pde.hpp"

#include <algorithm>
#include <cmath>

namespace capwiener {

namespace {

double sphere_area(int dim) {  // |S^{N-1}|
  return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

// Solve v + c v^q = r, v >= 0; monotone convex, Newton from the right.
double absorption_root(double r, double c, double q) {
  if (r <= 0.0) return 0.0;
  double v = std::min(r, std::pow(r / c, 1.0 / q));
  for (int it = 0; it < 60; ++it) {
    const double vq = std::pow(v, q - 1.0);
    const double g = v + c * vq * v - r;
    const double dg = 1.0 + c * q * vq;
    const double step = g / dg;
    v -= step;
    if (std::abs(step) < 1e-15 * (1.0 + v)) break;
  }
  return std::max(v, 0.0);
}

struct Tridiag {
  Vec sub, diag, sup;   // matrix of the implicit solve
  Vec w, dfac;          // Thomas factorization
  void factor() {
    const long n = diag.size();
    w.resize(n);
    dfac.resize(n);
    dfac[0] = diag[0];
    for (long i = 1; i < n; ++i) {
      w[i] = sub[i] / dfac[i - 1];
      dfac[i] = diag[i] - w[i] * sup[i - 1];
    }
  }
  void solve(Vec& rhs) const {
    const long n = diag.size();
    for (long i = 1; i < n; ++i) rhs[i] -= w[i] * rhs[i - 1];
    rhs[n - 1] /= dfac[n - 1];
    for (long i = n - 2; i >= 0; --i)
      rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / dfac[i];
  }
};

}  // namespace

double Field::value(double t, double x) const {
  const long nt = times.size(), nx = xs.size();
  t = std::clamp(t, times[0], times[nt - 1]);
  x = std::clamp(x, xs[0], xs[nx - 1]);
  const long i =
      std::clamp<long>(std::upper_bound(times.data(), times.data() + nt, t) -
                           times.data() - 1,
                       0, nt - 2);
  const long j = std::clamp<long>(
      std::upper_bound(xs.data(), xs.data() + nx, x) - xs.data() - 1, 0,
      nx - 2);
  const double wt = (t - times[i]) / std::max(times[i + 1] - times[i], 1e-300);
  const double wx = (x - xs[j]) / std::max(xs[j + 1] - xs[j], 1e-300);
  return (1 - wt) * ((1 - wx) * u(i, j) + wx * u(i, j + 1)) +
         wt * ((1 - wx) * u(i + 1, j) + wx * u(i + 1, j + 1));
}

long Field::row_at(double t) const {
  long best = 0;
  for (long i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
  return best;
}

double Field::spatial_integral_pow(long row, double p) const {
  const long nx = xs.size();
  const double h = xs[1] - xs[0];
  double s = 0.0;
  if (!radial) {
    for (long j = 0; j < nx; ++j) {
      const double w = (j == 0 || j == nx - 1) ? 0.5 : 1.0;
      s += w * std::pow(u(row, j), p);
    }
    return s * h;
  }
  const double area = sphere_area(dimension);
  for (long j = 0; j < nx; ++j) {
    const double w = (j == 0 || j == nx - 1) ? 0.5 : 1.0;
    s += w * std::pow(u(row, j), p) * std::pow(xs[j], dimension - 1);
  }
  return s * h * area;
}

double Field::spatial_integral(long row) const {
  return spatial_integral_pow(row, 1.0);
}

Field solve_semilinear(const Vec& u0, const Params& prm,
                       const SpaceTimeGrid& grid, PdeOptions opt) {
  if (!(grid.h > 0.0) || !(grid.L > 0.0) || !(grid.T > 0.0))
    throw InvalidParameterError("pde grid: L, h, T must be positive");
  if (grid.radial && grid.dimension < 2)
    throw InvalidParameterError("pde grid: radial form needs dimension >= 2");
  if (!grid.radial && grid.dimension != 1)
    throw InvalidParameterError("pde grid: dimension >= 2 must be radial");
  const long M = std::lround(grid.L / grid.h);
  const long n = grid.radial ? M + 1 : 2 * M + 1;
  if (u0.size() != n)
    throw InvalidParameterError("pde: initial data does not match the grid");
  if (u0.minCoeff() < 0.0)
    throw InvalidParameterError("pde: initial data must be nonnegative");

  const double h = grid.h, q = prm.q;
  double dt = grid.dt > 0.0 ? grid.dt : h * h;
  const long steps = std::max<long>(1, std::lround(std::ceil(grid.T / dt)));
  dt = grid.T / static_cast<double>(steps);
  if (opt.scheme == AbsorptionScheme::explicit_euler && dt > h)
    throw InvalidParameterError("pde: explicit absorption needs dt <= h");
  const long store_every =
      grid.store_every > 0 ? grid.store_every
                           : std::max<long>(1, steps / 400);

  Field f;
  f.dimension = grid.dimension;
  f.radial = grid.radial;
  f.absorption = opt.absorption;
  f.q = q;
  f.xs.resize(n);
  for (long j = 0; j < n; ++j)
    f.xs[j] = grid.radial ? j * h : -grid.L + j * h;

  // I - (dt/2) Lap, Dirichlet at the outer boundary rows.
  Tridiag A;
  A.sub = Vec::Zero(n);
  A.diag = Vec::Ones(n);
  A.sup = Vec::Zero(n);
  Vec lo = Vec::Zero(n), di = Vec::Zero(n), up = Vec::Zero(n);  // Lap rows
  for (long j = 0; j < n; ++j) {
    const bool boundary =
        (j == n - 1) || (!grid.radial && j == 0);
    if (boundary) continue;
    if (grid.radial && j == 0) {
      di[j] = -2.0 * grid.dimension / (h * h);
      up[j] = 2.0 * grid.dimension / (h * h);
    } else {
      const double r = f.xs[j];
      const double drift =
          grid.radial ? (grid.dimension - 1) / (2.0 * h * r) : 0.0;
      lo[j] = 1.0 / (h * h) - drift;
      di[j] = -2.0 / (h * h);
      up[j] = 1.0 / (h * h) + drift;
    }
    A.sub[j] = -0.5 * dt * lo[j];
    A.diag[j] = 1.0 - 0.5 * dt * di[j];
    A.sup[j] = -0.5 * dt * up[j];
  }
  A.factor();

  // Quadrature weights matching spatial_integral, for the absorbed-mass tally.
  Vec iw(n);
  {
    const double area = grid.radial ? sphere_area(grid.dimension) : 1.0;
    for (long j = 0; j < n; ++j) {
      const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      const double geom =
          grid.radial ? std::pow(f.xs[j], grid.dimension - 1) : 1.0;
      iw[j] = w * h * area * geom;
    }
  }
  double absorbed_total = 0.0;

  const double tau = 0.5 * dt;  // absorption half-step
  const double u_star =
      std::pow(1.0 / (q * tau), 1.0 / (q - 1.0));  // stiffness switch
  const auto absorb = [&](Vec& u) {
    if (!opt.absorption) return;
    const double before = iw.dot(u);
    for (long j = 0; j < n; ++j) {
      const double v = u[j];
      if (v <= 0.0) continue;
      switch (opt.scheme) {
        case AbsorptionScheme::implicit_newton:
          if (v <= u_star) {
            const double rhs = v - 0.5 * tau * std::pow(v, q);
            u[j] = absorption_root(rhs, 0.5 * tau, q);
          } else {
            // Stiff branch: the closed-form flow stays bounded as v grows,
            // which keeps the k-doubling limit of maximal data well defined.
            u[j] = std::pow(std::pow(v, 1.0 - q) + (q - 1.0) * tau,
                            -1.0 / (q - 1.0));
          }
          break;
        case AbsorptionScheme::explicit_euler:
          u[j] = std::max(0.0, v - tau * std::pow(v, q));
          break;
        case AbsorptionScheme::exact_flow:
          u[j] = std::pow(std::pow(v, 1.0 - q) + (q - 1.0) * tau,
                          -1.0 / (q - 1.0));
          break;
      }
    }
    absorbed_total += before - iw.dot(u);
  };

  std::vector<long> stored_steps;
  for (long sidx = 0; sidx <= steps; ++sidx)
    if (sidx % store_every == 0 || sidx == steps) stored_steps.push_back(sidx);
  f.times.resize(static_cast<long>(stored_steps.size()));
  f.u.resize(static_cast<long>(stored_steps.size()), n);
  f.absorbed.resize(static_cast<long>(stored_steps.size()));

  Vec u = u0;
  long out = 0;
  f.times[out] = 0.0;
  f.absorbed[out] = 0.0;
  f.u.row(out++) = u.transpose();
  Vec rhs(n);
  for (long sidx = 1; sidx <= steps; ++sidx) {
    absorb(u);
    for (long j = 0; j < n; ++j) {
      const bool boundary = (j == n - 1) || (!grid.radial && j == 0);
      if (boundary) {
        rhs[j] = 0.0;
        continue;
      }
      const double um = j > 0 ? u[j - 1] : 0.0;
      const double up1 = u[j + 1];
      rhs[j] = u[j] + 0.5 * dt *
                          (lo[j] * um + di[j] * u[j] + up[j] * up1);
    }
    A.solve(rhs);
    u = rhs.cwiseMax(0.0);
    absorb(u);
    if (!u.allFinite() || u.maxCoeff() > 1e200)
      throw NonConvergedError("pde: solution lost finiteness", 0.0,
                              u.allFinite() ? u.maxCoeff() : 0.0);
    if (out < f.times.size() && sidx == stored_steps[out]) {
      f.times[out] = sidx * dt;
      f.absorbed[out] = absorbed_total;
      f.u.row(out++) = u.transpose();
    }
  }
  return f;
}

MaximalResult maximal_solution(const CompactSet& F, const Params& prm,
                               const SpaceTimeGrid& grid,
                               MaximalControls controls, PdeOptions opt) {
  if (F.dim() != prm.dimension)
    throw InvalidParameterError("maximal solution: dimension mismatch");
  const long M = std::lround(grid.L / grid.h);
  const long n = grid.radial ? M + 1 : 2 * M + 1;
  Vec mask = Vec::Zero(n);
  for (long j = 0; j < n; ++j) {
    Vec pt = Vec::Zero(prm.dimension);
    pt[0] = grid.radial ? j * grid.h : -grid.L + j * grid.h;
    if (F.distance(pt) <= grid.h + 1e-12) mask[j] = 1.0;
  }
  if (mask.sum() == 0.0) {
    if (!F.is_empty())
      throw InvalidParameterError(
          "maximal solution: the set misses every grid node");
    MaximalResult zero;  // nothing to saturate: the limit is u == 0
    zero.field = solve_semilinear(mask, prm, grid, opt);
    return zero;
  }

  MaximalResult res;
  double k = controls.k0;
  Field prev = solve_semilinear(k * mask, prm, grid, opt);
  const double tmin = grid.t_min();
  for (int d = 1; d <= controls.max_doublings; ++d) {
    k *= 2.0;
    Field cur = solve_semilinear(k * mask, prm, grid, opt);
    double change = 0.0;  // sup-norm change per row, relative to the row peak
    for (long i = 0; i < cur.times.size(); ++i) {
      if (cur.times[i] < tmin) continue;
      change = std::max(
          change, (cur.u.row(i) - prev.u.row(i)).cwiseAbs().maxCoeff() /
                      (cur.u.row(i).cwiseAbs().maxCoeff() + 1e-300));
    }
    res.doublings = d;
    res.last_change = change;
    if (change <= controls.sat_tol) {
      res.field = std::move(cur);
      res.k_final = k;
      return res;
    }
    prev = std::move(cur);
  }
  throw NonConvergedError(
      "maximal solution: no saturation within the doubling budget", 0.0,
      res.last_change);
}

MeasureRunResult solve_with_measure(const DiscreteMeasure& mu,
                                    const Params& prm,
                                    const SpaceTimeGrid& grid,
                                    MeasureRunControls controls,
                                    PdeOptions opt) {
  if (!(controls.eps0 > 0.0))
    throw InvalidParameterError("measure run: eps0 must be > 0");
  const long M = std::lround(grid.L / grid.h);
  const long n = grid.radial ? M + 1 : 2 * M + 1;
  const auto initial = [&](double eps) {
    Vec u0(n);
    for (long j = 0; j < n; ++j) {
      Vec pt = Vec::Zero(prm.dimension);
      pt[0] = grid.radial ? j * grid.h : -grid.L + j * grid.h;
      u0[j] = mu.size() ? heat_of_measure(mu, pt, eps) : 0.0;
    }
    const bool boundary_1d = !grid.radial;
    if (boundary_1d) u0[0] = 0.0;
    u0[n - 1] = 0.0;
    return u0;
  };
  MeasureRunResult out;
  out.eps0 = controls.eps0;
  out.field = solve_semilinear(initial(controls.eps0), prm, grid, opt);
  if (controls.sensitivity) {
    Field half = solve_semilinear(initial(0.5 * controls.eps0), prm, grid, opt);
    const long last = out.field.times.size() - 1;
    const double scale = out.field.u.row(last).maxCoeff() + 1e-300;
    out.sens_delta =
        (out.field.u.row(last) - half.u.row(last)).cwiseAbs().maxCoeff() /
        scale;
    if (out.sens_delta > controls.sens_tol)
      throw NonConvergedError(
          "measure run: halving the mollification scale moved the final row "
          "beyond the sensitivity tolerance",
          0.0, out.sens_delta);
  }
  return out;
}

double mass_balance_residual(const Field& f, double t1, double t2) {
  const long r1 = f.row_at(t1), r2 = f.row_at(t2);
  if (r2 <= r1)
    throw InvalidParameterError("mass balance: need t1 < t2 within the run");
  const double I1 = f.spatial_integral(r1);
  const double I2 = f.spatial_integral(r2);
  double absorbed = 0.0;
  if (f.absorption) {
    for (long i = r1; i < r2; ++i) {
      const double p1 = f.spatial_integral_pow(i, f.q);
      const double p2 = f.spatial_integral_pow(i + 1, f.q);
      absorbed += 0.5 * (f.times[i + 1] - f.times[i]) * (p1 + p2);
    }
  }
  return std::abs(I2 + absorbed - I1) / std::max(I1, 1e-300);
}

MonotoneSequenceResult monotone_measure_sequence(
    const DiscreteMeasure& mu, const std::vector<double>& multipliers,
    const Field& reference, const Params& prm, const SpaceTimeGrid& grid,
    MeasureRunControls controls) {
  if (multipliers.empty())
    throw InvalidParameterError("measure sequence: no multipliers");
  for (std::size_t i = 1; i < multipliers.size(); ++i)
    if (multipliers[i] <= multipliers[i - 1])
      throw InvalidParameterError(
          "measure sequence: multipliers must increase");
  MeasureRunControls ctl = controls;
  ctl.sensitivity = false;

  MonotoneSequenceResult out;
  const double tmin = grid.t_min();
  long center = 0;
  for (long j = 1; j < reference.xs.size(); ++j)
    if (std::abs(reference.xs[j]) < std::abs(reference.xs[center])) center = j;

  Mat prev;
  for (double m : multipliers) {
    Field f = solve_with_measure(mu.scaled_by(m), prm, grid, ctl).field;
    MonotoneStep step;
    step.multiplier = m;
    double cv = 0.0, ratio = 0.0;
    for (long i = 0; i < f.times.size(); ++i) {
      if (f.times[i] < tmin) continue;
      cv = std::max(cv, f.u(i, center));
      const double ref = reference.u(i, center);
      if (ref > 0.0) ratio = std::max(ratio, f.u(i, center) / ref);
    }
    step.center_value = cv;
    step.ratio_to_reference = ratio;
    if (prev.size()) {
      const double scale = f.u.maxCoeff() + 1e-300;
      const double viol = ((prev - f.u).maxCoeff()) / scale;
      out.max_violation = std::max(out.max_violation, viol);
      if (viol > 1e-6) out.monotone = false;
    }
    prev = f.u;
    out.steps.push_back(step);
  }
  out.final_ratio = out.steps.back().ratio_to_reference;
  return out;
}

}  // namespace capwiener
