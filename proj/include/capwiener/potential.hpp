#pragma once

#include "capwiener/capacity.hpp"

namespace capwiener {

// One term of the capacitary series at (x, t): the n-th annulus slice of F,
// rescaled to unit size, with its capacity and capacitary measure.
struct SliceTerm {
  int n = 0;
  double weight = 0.0;  // (n+1)^{N/2 - 1/(q-1)} e^{-n/4}
  bool empty = true;
  bool skipped = false;  // weight negligible; capacity deliberately not solved
  double capacity = 0.0;
  double gap = 0.0;
  CompactSet scaled = CompactSet::empty(1);  // S_n / sqrt((n+1) t)
  DiscreteMeasure nu;                        // capacitary measure of `scaled`
};

struct PotentialControls {
  double h = 0.0;               // shared grid resolution for every slice
                                // solve; 0 = auto per dimension (1/32 in 1D)
  double weight_cutoff = 1e-13; // relative cutoff on the series weights
  double skip_below = 0.0;      // early-out when a crude upper bound is below
  double cap_upper = 1.0;       // capacity bound per unit-scale slice, used
                                // only by skip_below
  unsigned jobs = 0;
  CapacityControls cap = {};
};

struct PotentialTerms {
  double t = 0.0;
  Vec x;
  double prefactor = 0.0;  // t^{-1/(q-1)}
  double total = 0.0;      // prefactor * sum weight_n * capacity_n
  bool below_threshold = false;  // early-out fired; `total` is an upper bound
  std::vector<SliceTerm> terms;  // ascending n; leading empty slices omitted
  long n_bound = 0;              // slices are empty for n >= n_bound
  long solves = 0;
};

// Capacitary series of the set F seen from (x, t): each annulus slice
// S_n = {y in F : n t <= |y-x|^2 < (n+1) t} is rescaled by 1/sqrt((n+1) t)
// and its capacity is computed on the shared grid; terms with negligible
// weight are skipped deterministically.
PotentialTerms w_potential(const CompactSet& F, const Vec& x, double t,
                           const Params& prm, const BesselKernel& kernel,
                           PotentialControls controls = {});

// Parabolic similarity pair: the series obeys
//   k^{1/(q-1)} W_F(sqrt(k) x, k t) = W_{F/sqrt(k)}(x, t)
// exactly, slice by slice. Returns {lhs, rhs} computed independently.
std::pair<double, double> similarity_pair(const CompactSet& F, const Vec& x,
                                          double t, double k,
                                          const Params& prm,
                                          const BesselKernel& kernel,
                                          PotentialControls controls = {});

}  // namespace capwiener
