#pragma once

#include "capwiener/bessel.hpp"
#include "capwiener/common.hpp"
#include "capwiener/geometry.hpp"
#include "capwiener/params.hpp"

#include <optional>
#include <string>

namespace capwiener {

// Weighted atom cloud; columns of `atoms` are points.
struct DiscreteMeasure {
  PointMat atoms;
  Vec weights;

  int dim() const { return static_cast<int>(atoms.rows()); }
  long size() const { return atoms.cols(); }
  double mass() const { return weights.size() ? weights.sum() : 0.0; }

  DiscreteMeasure scaled_by(double factor) const;          // weights * factor
  DiscreteMeasure pushforward(double space_scale) const;   // atoms * factor
};

// Density grid: explicit nodes with per-node cell volumes. For N >= 2 the
// grid is two-zone (fine lattice near the target set, coarser lattice filling
// the margin) to keep node counts workable.
struct DensityGrid {
  PointMat nodes;
  Vec volumes;
  double h = 0.0;  // fine spacing; kernel evaluations are capped at h/10

  long size() const { return nodes.cols(); }
};

struct CapacityControls {
  double h = 0.0;             // density spacing; 0 = auto from extent/dimension
  double margin = 0.0;        // grid margin around the set; 0 = auto
  double constraint_h = 0.0;  // spacing for discretize(); 0 = same as h
  double gap_tol = 1e-3;      // relative duality-gap target
  int max_iters = 60000;
  int check_every = 25;
  unsigned power_iters = 30;  // operator-norm power iterations
};

struct CapacityResult {
  double value = 0.0;       // certified primal value (feasible density)
  double dual_bound = 0.0;  // certified dual lower bound
  double gap = 0.0;         // value - dual_bound
  int iterations = 0;
  bool converged = true;
  DiscreteMeasure measure;  // capacitary measure; mass() tracks value
  Vec density;              // feasible density on grid.nodes
  DensityGrid grid;
  long constraint_count = 0;
};

// C_{alpha,p}(F) with alpha = prm.cap_order, p = prm.cap_power:
//   inf { sum_j vol_j f_j^p : f >= 0,  (G * f)(y_i) >= 1 on discretize(F) },
// solved by a primal-dual splitting with a duality-gap certificate. The
// returned measure is the scaled dual multiplier, whose mass converges to the
// capacity.
CapacityResult bessel_capacity(const CompactSet& F, const Params& prm,
                               const BesselKernel& kernel,
                               CapacityControls controls = {});

// Same functional with the density support restricted to the closed ball
// B(center, radius); requires F to be contained in that ball.
CapacityResult relative_capacity(const CompactSet& F, const Vec& ball_center,
                                 double ball_radius, const Params& prm,
                                 const BesselKernel& kernel,
                                 CapacityControls controls = {});

struct QuasiAdditivityResult {
  double whole = 0.0;
  Vec parts;
  double ratio = 0.0;  // sum of part capacities / whole capacity
};

QuasiAdditivityResult quasi_additivity_ratio(
    const std::vector<CompactSet>& parts, const CompactSet& whole,
    const Params& prm, const BesselKernel& kernel,
    CapacityControls controls = {});

}  // namespace capwiener
