#include "capwiener/potential.hpp"

#include <cmath>

namespace capwiener {

namespace {

double series_weight(long n, double gamma) {
  return std::pow(static_cast<double>(n + 1), gamma) * std::exp(-0.25 * n);
}

}  // namespace

PotentialTerms w_potential(const CompactSet& F, const Vec& x, double t,
                           const Params& prm, const BesselKernel& kernel,
                           PotentialControls controls) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw InvalidParameterError("potential: t must be positive and finite");
  if (x.size() != prm.dimension || F.dim() != prm.dimension)
    throw InvalidParameterError("potential: dimension mismatch");
  if (!prm.supercritical)
    throw UnsupportedError(
        "potential: the capacitary series needs q >= (N+2)/N; below the "
        "threshold singular data are admissible, use the vss module instead");

  PotentialTerms out;
  out.t = t;
  out.x = x;
  out.prefactor = std::pow(t, -1.0 / (prm.q - 1.0));
  if (F.is_empty()) return out;

  const double gamma = 0.5 * prm.dimension - 1.0 / (prm.q - 1.0);
  const long n_bound = slice_range(F, x, t);
  out.n_bound = n_bound;
  const double dist = F.distance(x);
  const long n_lo =
      std::max<long>(0, static_cast<long>(std::floor(dist * dist / t)));

  // The weights peak at n ~ 4 gamma - 1 and then decay like e^{-n/4}; track
  // the running maximum and stop once weights are negligible relative to it.
  double wmax = 0.0;
  const long n_peak = std::max<long>(n_lo, static_cast<long>(
                                               std::ceil(4.0 * gamma)));
  for (long n = n_lo; n <= std::min(n_peak, n_bound - 1); ++n)
    wmax = std::max(wmax, series_weight(n, gamma));

  std::vector<long> solve_idx;
  for (long n = n_lo; n < n_bound; ++n) {
    const double w = series_weight(n, gamma);
    wmax = std::max(wmax, w);
    if (n > n_peak && w < controls.weight_cutoff * wmax) break;
    CompactSet sn = slice(F, x, t, static_cast<int>(n));
    SliceTerm term;
    term.n = static_cast<int>(n);
    term.weight = w;
    if (!sn.is_empty()) {
      term.empty = false;
      term.scaled = sn.scaled((n + 1) * t);
      if (w < controls.weight_cutoff * wmax)
        term.skipped = true;
      else
        solve_idx.push_back(static_cast<long>(out.terms.size()));
    }
    out.terms.push_back(std::move(term));
  }

  if (controls.skip_below > 0.0) {
    double ub = 0.0;
    for (const auto& term : out.terms)
      if (!term.empty) ub += term.weight * controls.cap_upper;
    ub *= out.prefactor;
    if (ub < controls.skip_below) {
      out.below_threshold = true;
      out.total = ub;
      return out;
    }
  }

  // Every slice solve shares one resolution so the series terms are
  // mutually consistent.
  static constexpr double shared_h[3] = {1.0 / 32, 0.05, 0.125};
  CapacityControls cap = controls.cap;
  cap.h = controls.h > 0.0 ? controls.h : shared_h[prm.dimension - 1];
  parallel_for(solve_idx.size(), controls.jobs, [&](std::size_t k) {
    SliceTerm& term = out.terms[solve_idx[k]];
    CapacityResult r = bessel_capacity(term.scaled, prm, kernel, cap);
    term.capacity = r.value;
    term.gap = r.gap;
    term.nu = std::move(r.measure);
  });
  out.solves = static_cast<long>(solve_idx.size());

  double s = 0.0;
  for (const auto& term : out.terms) s += term.weight * term.capacity;
  out.total = out.prefactor * s;
  return out;
}

std::pair<double, double> similarity_pair(const CompactSet& F, const Vec& x,
                                          double t, double k,
                                          const Params& prm,
                                          const BesselKernel& kernel,
                                          PotentialControls controls) {
  if (!(k > 0.0))
    throw InvalidParameterError("similarity: scale must be > 0");
  const double lhs =
      std::pow(k, 1.0 / (prm.q - 1.0)) *
      w_potential(F, std::sqrt(k) * x, k * t, prm, kernel, controls).total;
  const double rhs =
      w_potential(scale_set(F, k), x, t, prm, kernel, controls).total;
  return {lhs, rhs};
}

}  // namespace capwiener
