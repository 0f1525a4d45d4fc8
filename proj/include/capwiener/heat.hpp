#pragma once

#include "capwiener/potential.hpp"

namespace capwiener {

// Gauss-Weierstrass kernel (4 pi tau)^{-N/2} exp(-|xi|^2 / (4 tau)), tau > 0.
double heat_kernel(const Vec& xi, double tau, int dim);

// e^{t Delta} mu at x for an atomic measure.
double heat_of_measure(const DiscreteMeasure& mu, const Vec& x, double t);

// Measure assembled from the capacitary measures of the rescaled slices of a
// series: atoms of nu_n pushed forward by sqrt((n+1) t), weights multiplied
// by ((n+1) t)^{N/2 - 1/(q-1)}. Atoms remember which slice they came from.
struct SlicedMeasure {
  DiscreteMeasure total;
  std::vector<int> slice_of_atom;  // per atom column: slice index n
  std::vector<int> slice_ids;      // distinct slice indices, ascending
  Vec x;
  double t = 0.0;

  DiscreteMeasure slice_part(int n) const;
};

SlicedMeasure build_capacitary_mu(const PotentialTerms& series,
                                  const Params& prm);

// Lower bound of the heat extension by the weighted slice capacities:
//   e^{t Delta} mu (x) >= (4 pi t)^{-N/2} sum_n (sqrt((n+1) t))^{N - 2/(q-1)}
//                          e^{-(n+1)/4} C_n.
// Per-atom proof: every slice-n atom sits within sqrt((n+1) t) of x.
struct Est4Result {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin() const { return lhs - rhs; }
};

Est4Result est4_check(const PotentialTerms& series, const SlicedMeasure& mu,
                      const Params& prm);

// Space-time partition of rho^2 = |x-y|^2 + (t-s): index floor(rho^2/t) >= 1
// outward, geometric cells t*[alpha^{-p}, alpha^{-p-1}) with p <= -1 inward.
int partition_cell(double rho2, double t, double alpha);

struct DuhamelControls {
  double eps0_rel = 1e-3;  // atoms mollified by e^{eps0 Delta}, eps0 = rel * t
  double alpha = 0.5;      // geometric ratio of the near-diagonal cells
  int gl = 8;              // Gauss nodes per quadrature panel
  double refine = 1.5;     // reserved knob; refinement halves every panel
  double delta_tol = 0.05; // refinement delta above which evaluation fails
  double trunc = 8.0;      // spatial window: trunc * sqrt(t) + atom diameter
  int max_axis_panels = 0; // cap on per-axis hull panels; 0 = auto
  std::vector<double> extra_alphas;  // extra split ratios evaluated for free
};

struct DuhamelSplit {
  double alpha = 0.0;
  double j1 = 0.0;  // cells whose slices satisfy n <= p + 2
  double j2 = 0.0;  // remaining slices
};

struct DuhamelResult {
  double value = 0.0;  // int_0^t int G(x-y, t-s) (e^{(s+eps0) Delta} mu)^q
  double j1 = 0.0;
  double j2 = 0.0;
  std::vector<DuhamelSplit> splits;
  double refine_delta = 0.0;
  long nodes = 0;
  double eps0 = 0.0;
};

// Absorption term of the Duhamel formula for the mollified measure, with the
// near/far decomposition along the space-time partition. Evaluated twice
// (base and refined panels); fails if the two disagree beyond delta_tol.
DuhamelResult nonlinear_term(const SlicedMeasure& mu, const Params& prm,
                             DuhamelControls controls = {});

struct LowerSolutionResult {
  double heat = 0.0;   // e^{(t+eps0) Delta} mu (x)
  double nl = 0.0;
  double value = 0.0;  // heat - nl
  DuhamelResult duhamel;
};

LowerSolutionResult lower_solution(const SlicedMeasure& mu, const Params& prm,
                                   DuhamelControls controls = {});

// Largest eps = 2^{-k} with  eps H - NL(eps mu) >= eps H / 2, using the exact
// homogeneity NL(eps mu) = eps^q NL(mu); H is the mollified heat extension.
struct EpsDoublingResult {
  double eps = 1.0;
  int halvings = 0;
  double heat_mu = 0.0;
  double nl_mu = 0.0;
  double lower_at_eps = 0.0;  // eps H - eps^q NL
  DuhamelResult duhamel;      // the single evaluation behind nl_mu
};

EpsDoublingResult eps_doubling_search(const SlicedMeasure& mu,
                                      const Params& prm,
                                      DuhamelControls controls = {},
                                      int max_halvings = 60);

}  // namespace capwiener
