#pragma once

#include "capwiener/pde.hpp"
#include "capwiener/vss.hpp"

#include <string>

namespace capwiener {

// ---------------------------------------------------------------------------
// Bilateral comparison: maximal solution against the capacitary series.

struct BilateralControls {
  double T = 0.5;
  int t_count = 4;
  int x_count = 4;            // one point inside F plus x_count-1 distances
  double denom_floor = 1e-7;  // samples with u or W below this are excluded
  SpaceTimeGrid grid;         // grid.L == 0 -> auto sized from F and T
  PotentialControls pot;
  MaximalControls maximal;
  PdeOptions pde;
};

struct RatioSample {
  double t = 0.0;
  double dist = 0.0;  // dist(x, F)
  double coord = 0.0; // evaluation coordinate along the first axis / radius
  double u = 0.0;
  double w = 0.0;
  double ratio = 0.0;
  bool included = false;
};

struct RatioReport {
  std::string fixture;
  int dimension = 0;
  double q = 0.0;
  std::vector<RatioSample> samples;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  long included = 0;
  long excluded = 0;
  double k_final = 0.0;
  int doublings = 0;
  double max_cap_gap_rel = 0.0;  // worst relative duality gap in the series
  double scheme_change = 0.0;    // saturation change of the last doubling
  double envelope() const { return max_ratio / std::max(min_ratio, 1e-300); }
};

RatioReport bilateral_ratio(const CompactSet& F, const std::string& name,
                            const Params& prm,
                            const BilateralControls& controls = {});

// ---------------------------------------------------------------------------
// Lower bound chain: series, measure, heat bound, absorption, PDE solve.

struct LowerBoundControls {
  double chain_tol = 0.10;     // relative slack between PDE and lower value
  double est4_tol = 0.02;      // relative slack of the heat-side inequality
  PotentialControls pot;
  DuhamelControls duhamel;
  SpaceTimeGrid grid;          // grid.L == 0 -> auto
  PdeOptions pde;
};

struct LowerBoundReport {
  double t = 0.0;
  Vec x;
  double w_total = 0.0;
  double est4_lhs = 0.0;
  double est4_rhs = 0.0;
  bool est4_ok = false;
  double heat = 0.0;       // mollified heat extension of mu at (x, t)
  double nl = 0.0;
  double refine_delta = 0.0;
  double eps_star = 1.0;
  int halvings = 0;
  double lower_at_eps = 0.0;
  double u_pde = 0.0;      // solution from eps_star * mu evaluated at (x, t)
  double sens_delta = 0.0;
  bool chain_ok = false;
  double max_cap_gap_rel = 0.0;
};

LowerBoundReport lower_bound_experiment(const CompactSet& F, const Vec& x,
                                        double t, const Params& prm,
                                        const LowerBoundControls& controls = {});

// ---------------------------------------------------------------------------
// Localized upper estimate for F inside the ball of radius r: ratio of the
// maximal solution to the kernel-shaped bound
//   (1 + r/rho)^{N/2} t^{-N/2} e^{-(|x|-r-3 rho)^2/(4t)} * C^{B_{r+rho}}(F),
// over samples with t >= (r + 3 rho)^2.

struct UplemControls {
  double denom_floor = 1e-12;
  SpaceTimeGrid grid;  // grid.L == 0 -> auto
  CapacityControls cap;
  MaximalControls maximal;
  PdeOptions pde;
};

struct UplemSample {
  double t = 0.0;
  double x = 0.0;  // coordinate along the first axis
  double u = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  bool included = false;
};

struct UplemReport {
  double r = 0.0;
  double rho = 0.0;
  double relative_cap = 0.0;
  std::vector<UplemSample> samples;
  double c_max = 0.0;  // empirical constant of the localized bound
  long included = 0;
  double cap_gap_rel = 0.0;
  double scheme_change = 0.0;
};

UplemReport uplem_experiment(const CompactSet& F, const Params& prm, double r,
                             double rho, const std::vector<double>& times,
                             const std::vector<double>& xs,
                             const UplemControls& controls = {});

// ---------------------------------------------------------------------------
// Two-sided capacity equivalence for a covered piece living at unit scale:
// compares C^{B_{2/sqrt(n+1)}(a)}(F_nj) with
// (n+1)^{N/2 - 1/(q-1)} * C(sqrt(n+1) * F_nj). Requires F_nj inside
// B_{1/sqrt(n+1)}(a).

std::pair<double, double> capacity_equivalence_check(
    const CompactSet& F_nj, const Vec& a, int n, const Params& prm,
    const BesselKernel& kernel, CapacityControls controls = {});

// Sweep over the slices of F at (x, t): covers each normalized slice by
// spheres, runs the equivalence check per piece, and aggregates the
// quasi-additivity ratio sum_j C(F_nj) / C(F_n) per slice (at the original
// scale, as the capacity-side counterpart of the cover construction).

struct EquivalenceControls {
  CapacityControls cap;
  double piece_floor = 1e-10;  // pieces with both sides below are skipped
};

struct EquivalencePiece {
  int n = 0;
  int j = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs
};

struct SliceAdditivity {
  int n = 0;
  long pieces = 0;
  double whole = 0.0;      // C(F_n)
  double sum_parts = 0.0;  // sum_j C(F_nj)
  double ratio = 0.0;      // sum_parts / whole
};

struct EquivalenceReport {
  std::vector<EquivalencePiece> pieces;
  std::vector<SliceAdditivity> slices;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double max_cap_gap_rel = 0.0;
};

EquivalenceReport equivalence_sweep(const CompactSet& F, const Vec& x,
                                    double t, const Params& prm,
                                    const std::vector<int>& n_list,
                                    const EquivalenceControls& controls = {});

// ---------------------------------------------------------------------------
// Near/far decomposition against the series: stability across parabolic
// rescalings and split ratios.

struct Est5Controls {
  PotentialControls pot;
  DuhamelControls duhamel;
};

struct Est5Scale {
  double k = 1.0;
  double j1 = 0.0;
  double j2 = 0.0;
  double total = 0.0;   // j1 + j2 at the base split ratio
  double s_value = 0.0; // e^{-1/4} * series total
  double ratio = 0.0;   // total / s_value
};

struct Est5Report {
  std::vector<Est5Scale> scales;
  // Base-scale splits: the configured ratio first, then the requested ones
  // (a request equal to the configured ratio is not repeated).
  std::vector<DuhamelSplit> alpha_splits;
  double ratio_spread = 0.0;               // max/min of ratio across scales
  double refine_delta = 0.0;               // base-scale quadrature delta
  double max_cap_gap_rel = 0.0;
};

Est5Report est5_experiment(const CompactSet& F, const Vec& x, double t,
                           const Params& prm, const std::vector<double>& scales,
                           const std::vector<double>& alphas,
                           const Est5Controls& controls = {});

// ---------------------------------------------------------------------------
// Subcritical sandwich: profile solution below the maximal solution of the
// point fixture, both below the flat supersolution.

struct SandwichControls {
  VssControls vss;
  SpaceTimeGrid grid;   // grid.L == 0 -> auto
  MaximalControls maximal;
  PdeOptions pde;
  int x_count = 5;
  int t_count = 4;
};

struct SandwichSample {
  double x = 0.0;
  double t = 0.0;
  double lower = 0.0;  // profile value
  double mid = 0.0;    // maximal solution
  double upper = 0.0;  // flat supersolution
};

struct SandwichReport {
  std::vector<SandwichSample> samples;
  double min_lower_margin = 0.0;  // min (mid - lower) / upper
  double min_upper_margin = 0.0;  // min (upper - mid) / upper
  double profile_f0 = 0.0;
  double residual_sup = 0.0;
  double scheme_change = 0.0;
};

SandwichReport subcritical_sandwich(const Params& prm,
                                    const SandwichControls& controls = {});

}  // namespace capwiener
