#include "capwiener/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace capwiener {

DiscreteMeasure DiscreteMeasure::scaled_by(double factor) const {
  return {atoms, weights * factor};
}

DiscreteMeasure DiscreteMeasure::pushforward(double space_scale) const {
  return {atoms * space_scale, weights};
}

namespace {

constexpr double kTiny = 1e-300;

double auto_h(const CompactSet& F) {
  static constexpr double divisor[3] = {64.0, 40.0, 16.0};
  const double ext = std::max(F.extent(), 1.0);
  return std::clamp(ext / divisor[F.dim() - 1], 5e-4, 0.5);
}

double auto_margin(int dim) {
  static constexpr double m[3] = {6.0, 3.5, 2.2};
  return m[dim - 1];
}

// Axis-aligned lattice nodes anchored at integer multiples of `pitch`,
// restricted to [lo, hi] per axis; `skip` drops nodes inside the fine box.
void append_lattice(const Vec& lo, const Vec& hi, double pitch,
                    const Vec* skip_lo, const Vec* skip_hi,
                    std::vector<Vec>& out) {
  const int dim = static_cast<int>(lo.size());
  std::vector<long> i0(dim), i1(dim);
  long total = 1;
  for (int d = 0; d < dim; ++d) {
    i0[d] = static_cast<long>(std::ceil(lo[d] / pitch - 1e-9));
    i1[d] = static_cast<long>(std::floor(hi[d] / pitch + 1e-9));
    if (i1[d] < i0[d]) return;
    total *= i1[d] - i0[d] + 1;
    if (total > 8000000)
      throw InvalidParameterError(
          "capacity: density grid exceeds 8e6 candidate nodes; coarsen h");
  }
  std::vector<long> idx(i0);
  Vec pt(dim);
  while (true) {
    for (int d = 0; d < dim; ++d) pt[d] = idx[d] * pitch;
    bool inside_skip = skip_lo != nullptr;
    if (skip_lo) {
      for (int d = 0; d < dim; ++d)
        if (pt[d] < (*skip_lo)[d] - 1e-9 || pt[d] > (*skip_hi)[d] + 1e-9) {
          inside_skip = false;
          break;
        }
    }
    if (!inside_skip) out.push_back(pt);
    int d = 0;
    while (d < dim && ++idx[d] > i1[d]) idx[d] = i0[d], ++d;
    if (d == dim) break;
  }
}

DensityGrid build_grid(const CompactSet& F, double h, double margin,
                       const Vec* ball_center, double ball_radius) {
  const int dim = F.dim();
  Vec blo, bhi;
  F.bounding_box(blo, bhi);
  Vec dlo = blo.array() - margin, dhi = bhi.array() + margin;
  if (ball_center) {
    dlo = dlo.cwiseMax((ball_center->array() - ball_radius - 1e-9).matrix());
    dhi = dhi.cwiseMin((ball_center->array() + ball_radius + 1e-9).matrix());
  }
  std::vector<Vec> fine, coarse;
  if (dim == 1) {
    append_lattice(dlo, dhi, h, nullptr, nullptr, fine);
  } else {
    const double pad = std::min({1.5, 12.0 * h, margin});
    Vec flo = (blo.array() - pad).matrix().cwiseMax(dlo);
    Vec fhi = (bhi.array() + pad).matrix().cwiseMin(dhi);
    append_lattice(flo, fhi, h, nullptr, nullptr, fine);
    append_lattice(dlo, dhi, 3.0 * h, &flo, &fhi, coarse);
  }
  DensityGrid grid;
  grid.h = h;
  const long nf = static_cast<long>(fine.size());
  const long nc = static_cast<long>(coarse.size());
  std::vector<Vec> all;
  all.reserve(nf + nc);
  for (auto& p : fine) all.push_back(std::move(p));
  for (auto& p : coarse) all.push_back(std::move(p));
  // Keep only nodes inside the support ball, if any.
  std::vector<long> keep;
  keep.reserve(all.size());
  for (long j = 0; j < nf + nc; ++j) {
    if (ball_center && (all[j] - *ball_center).norm() > ball_radius + 1e-9)
      continue;
    keep.push_back(j);
  }
  grid.nodes.resize(dim, static_cast<long>(keep.size()));
  grid.volumes.resize(static_cast<long>(keep.size()));
  const double vf = std::pow(h, dim), vc = std::pow(3.0 * h, dim);
  for (long k = 0; k < static_cast<long>(keep.size()); ++k) {
    grid.nodes.col(k) = all[keep[k]];
    grid.volumes[k] = keep[k] < nf ? vf : vc;
  }
  if (grid.size() == 0)
    throw InvalidParameterError("capacity: empty density grid");
  return grid;
}

// Proximal map of f -> tau * sum_j vol_j f_j^p over f >= 0, i.e. per node
// solve u + c u^{p-1} = w with c = tau * p * vol; w <= 0 gives u = 0.
void prox_power(Vec& f, const Vec& w, const Vec& c, double p) {
  const long n = f.size();
  if (std::abs(p - 2.0) < 1e-12) {
    f = (w.array() / (1.0 + c.array())).cwiseMax(0.0);
    return;
  }
  if (std::abs(p - 1.5) < 1e-12) {
    // u + c sqrt(u) = w  =>  sqrt(u) = (-c + sqrt(c^2 + 4 w)) / 2.
    for (long j = 0; j < n; ++j) {
      if (w[j] <= 0.0) {
        f[j] = 0.0;
        continue;
      }
      const double v =
          0.5 * (-c[j] + std::sqrt(c[j] * c[j] + 4.0 * w[j]));
      f[j] = v * v;
    }
    return;
  }
  // General exponent: bisection on [0, w]; the map is monotone in u.
  for (long j = 0; j < n; ++j) {
    if (w[j] <= 0.0) {
      f[j] = 0.0;
      continue;
    }
    double lo = 0.0, hi = w[j];
    for (int it = 0; it < 60; ++it) {
      const double u = 0.5 * (lo + hi);
      const double phi = u + c[j] * std::pow(u, p - 1.0) - w[j];
      (phi > 0.0 ? hi : lo) = u;
    }
    f[j] = 0.5 * (lo + hi);
  }
}

}  // namespace

CapacityResult bessel_capacity_impl(const CompactSet& F, const Params& prm,
                                    const BesselKernel& kernel,
                                    CapacityControls c, const Vec* ball_center,
                                    double ball_radius) {
  if (F.dim() != prm.dimension)
    throw InvalidParameterError("capacity: set and params dimension mismatch");
  if (kernel.dimension() != prm.dimension ||
      std::abs(kernel.alpha() - prm.cap_order) > 1e-12)
    throw InvalidParameterError("capacity: kernel does not match params");
  const double p = prm.cap_power;

  CapacityResult res;
  if (F.is_empty()) {
    res.measure.atoms.resize(prm.dimension, 0);
    res.measure.weights.resize(0);
    return res;
  }

  const double h = c.h > 0.0 ? c.h : auto_h(F);
  const double margin = c.margin > 0.0 ? c.margin : auto_margin(F.dim());
  const double ch =
      c.constraint_h > 0.0 ? c.constraint_h : (F.dim() == 1 ? h : 3.0 * h);

  PointMat cons = F.discretize(ch);
  const long m = cons.cols();
  if (ball_center) {
    for (long i = 0; i < m; ++i)
      if ((cons.col(i) - *ball_center).norm() > ball_radius + 1e-9)
        throw InvalidParameterError(
            "relative capacity: set is not contained in the support ball");
  }
  DensityGrid grid = build_grid(F, h, margin, ball_center, ball_radius);
  const long n = grid.size();

  // A(i,j) = vol_j * G(max(|y_i - x_j|, h/10)).
  const double rcap = 0.1 * h;
  Mat A(m, n);
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j < n; ++j) {
      const double r = std::max((grid.nodes.col(j) - cons.col(i)).norm(), rcap);
      A(i, j) = grid.volumes[j] * kernel.value(r);
    }
  }

  // Operator norm by power iteration on A^T A.
  Vec v = Vec::Ones(n);
  double lam = 1.0;
  for (unsigned it = 0; it < c.power_iters; ++it) {
    Vec w = A * v;
    Vec bv = A.transpose() * w;
    lam = std::sqrt(bv.norm());
    if (lam < kTiny) break;
    v = bv / bv.norm();
  }
  const double L = std::max(lam, kTiny) * 1.02;
  const double tau = 0.95 / L, sigma = 0.95 / L;

  Vec f = Vec::Zero(n), fbar = f, lambda = Vec::Zero(m);
  const Vec cvec = tau * p * grid.volumes;
  Vec w(n);

  double best_P = std::numeric_limits<double>::infinity();
  double best_D = 0.0;
  Vec best_f, best_m;

  const auto checkpoint = [&](int iter) -> bool {
    Vec Af = A * f;
    const double s = Af.minCoeff();
    double P = std::numeric_limits<double>::infinity();
    if (s > 1e-12)
      P = (grid.volumes.array() * (f.array() / s).pow(p)).sum();
    // Inner minimization in closed form: the conjugate exponent of p is q.
    Vec md = (-lambda).cwiseMax(0.0);
    Vec z = ((A.transpose() * md).array() / grid.volumes.array()).matrix();
    const double D =
        md.sum() -
        (grid.volumes.array() * (p - 1.0) * (z.array() / p).pow(prm.q)).sum();
    if (P < best_P) {
      best_P = P;
      best_f = f / std::max(s, 1e-12);
    }
    if (D > best_D || best_m.size() == 0) {
      best_D = D;
      best_m = md;
    }
    if (!std::isfinite(P)) return false;
    const double denom = std::max(P, 1e-100);
    const bool gap_ok = (P - D) / denom <= c.gap_tol;
    const bool mass_ok =
        std::abs(md.sum() / p - P) / denom <= 3.0 * c.gap_tol;
    if (gap_ok && mass_ok) {
      res.value = P;
      res.dual_bound = D;
      res.gap = P - D;
      res.iterations = iter;
      res.converged = true;
      res.density = f / std::max(s, 1e-12);
      res.measure.atoms = cons;
      res.measure.weights = md / p;
      return true;
    }
    return false;
  };

  bool done = false;
  int iter = 0;
  for (; iter < c.max_iters && !done; ++iter) {
    lambda = (lambda + sigma * (A * fbar - Vec::Ones(m))).cwiseMin(0.0);
    Vec fold = f;
    w = fold - tau * (A.transpose() * lambda);
    prox_power(f, w, cvec, p);
    fbar = 2.0 * f - fold;
    if ((iter + 1) % c.check_every == 0) done = checkpoint(iter + 1);
  }
  if (!done) {
    throw NonConvergedError("capacity: duality gap above tolerance after max "
                            "iterations",
                            best_D, best_P);
  }
  res.grid = std::move(grid);
  res.constraint_count = m;
  return res;
}

CapacityResult bessel_capacity(const CompactSet& F, const Params& prm,
                               const BesselKernel& kernel,
                               CapacityControls controls) {
  return bessel_capacity_impl(F, prm, kernel, controls, nullptr, 0.0);
}

CapacityResult relative_capacity(const CompactSet& F, const Vec& ball_center,
                                 double ball_radius, const Params& prm,
                                 const BesselKernel& kernel,
                                 CapacityControls controls) {
  if (ball_center.size() != F.dim())
    throw InvalidParameterError("relative capacity: ball dimension mismatch");
  if (!(ball_radius > 0.0))
    throw InvalidParameterError("relative capacity: radius must be > 0");
  return bessel_capacity_impl(F, prm, kernel, controls, &ball_center,
                              ball_radius);
}

QuasiAdditivityResult quasi_additivity_ratio(
    const std::vector<CompactSet>& parts, const CompactSet& whole,
    const Params& prm, const BesselKernel& kernel, CapacityControls controls) {
  QuasiAdditivityResult out;
  out.parts.resize(static_cast<long>(parts.size()));
  for (std::size_t j = 0; j < parts.size(); ++j)
    out.parts[static_cast<long>(j)] =
        bessel_capacity(parts[j], prm, kernel, controls).value;
  out.whole = bessel_capacity(whole, prm, kernel, controls).value;
  out.ratio = out.parts.sum() / std::max(out.whole, kTiny);
  return out;
}

}  // namespace capwiener
