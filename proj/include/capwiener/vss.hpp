#pragma once

#include "capwiener/params.hpp"
#include "capwiener/common.hpp"

namespace capwiener {

struct VssControls {
  double r_max = 20.0;
  double rtol = 1e-10;
  double atol = 1e-12;
  double r0 = 1e-4;            // series start radius
  double blow_cap = 0.0;       // 0 = auto: 50 * flat value
  double a_rel_tol = 1e-12;    // bisection width target, relative
  int max_bisections = 80;
  int max_widenings = 3;       // bracket widening attempts, factor 10 each
  double dense_dr = 0.002;     // fixed-step resolution of the dense profile
};

// Radial profile of the backward self-similar solution:
//   f'' + ((N-1)/r + r/2) f' + f/(q-1) - f^q = 0,  f'(0) = 0,
// found by shooting on f(0): small values cross zero, values near the flat
// equilibrium (q-1)^{-1/(q-1)} stay positive; the profile sits on the
// boundary. For q >= (N+2)/N the crossing side disappears and the bracket
// collapses: no positive profile exists and `exists` is false.
struct VssProfile {
  bool exists = false;
  double f0 = 0.0;
  Vec r, f;                    // dense profile on a uniform grid from 0
  double residual_sup = 0.0;   // finite-difference residual on [0.05, 10]
  double decay_sup = 0.0;      // sup of r^{2/(q-1)} f over [r_max/2, r_max]
  int bisections = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double flat_value = 0.0;     // (q-1)^{-1/(q-1)}
};

VssProfile vss_profile(const Params& prm, VssControls controls = {});

// t^{-1/(q-1)} f(|x| / sqrt(t)); zero beyond the dense grid.
double vss_value(const VssProfile& profile, double dist, double t,
                 const Params& prm);

}  // namespace capwiener
