#pragma once

#include "capwiener/heat.hpp"

namespace capwiener {

// Uniform space-time grid. 1D solves live on [-L, L]; radial solves on
// [0, L] with the symmetry condition at r = 0 and Dirichlet at r = L.
struct SpaceTimeGrid {
  double L = 8.0;
  double h = 0.02;
  double T = 0.5;
  double dt = 0.0;      // 0 = auto: h^2 (keeps the stepping order-preserving)
  bool radial = false;
  int dimension = 1;
  int store_every = 0;  // 0 = auto, about 400 stored rows
  double t_min() const { return 4.0 * h * h; }
};

enum class AbsorptionScheme {
  implicit_newton,  // trapezoidal Newton, closed-form flow above the
                    // stiffness threshold; monotone and positivity-preserving
  explicit_euler,
  exact_flow,       // closed-form absorption flow between diffusion steps
};

struct PdeOptions {
  bool absorption = true;
  AbsorptionScheme scheme = AbsorptionScheme::implicit_newton;
};

struct Field {
  Vec times;  // stored times, ascending, starting at 0
  Vec xs;
  Mat u;        // u(i, j) at times[i], xs[j]
  Vec absorbed; // cumulative mass removed by the absorption substeps
  int dimension = 1;
  bool radial = false;
  bool absorption = true;
  double q = 0.0;

  double value(double t, double x) const;  // bilinear interpolation
  long row_at(double t) const;             // nearest stored row
  double spatial_integral(long row) const;
  double spatial_integral_pow(long row, double p) const;
};

// Crank-Nicolson diffusion with Strang-split absorption for
// d_t u - Lap u + u^q = 0, Dirichlet outer boundary.
Field solve_semilinear(const Vec& u0, const Params& prm,
                       const SpaceTimeGrid& grid, PdeOptions opt = {});

struct MaximalControls {
  double k0 = 10.0;
  int max_doublings = 20;
  double sat_tol = 1e-3;  // per-row sup-norm saturation of u at t >= t_min
};

struct MaximalResult {
  Field field;
  double k_final = 0.0;
  int doublings = 0;
  double last_change = 0.0;
};

// Limit of solutions with initial data k * 1_{dist(.,F) <= h} as k doubles;
// stops when the solution saturates for t >= t_min.
MaximalResult maximal_solution(const CompactSet& F, const Params& prm,
                               const SpaceTimeGrid& grid,
                               MaximalControls controls = {},
                               PdeOptions opt = {});

struct MeasureRunControls {
  double eps0 = 0.0;        // mollification scale of the initial trace
  bool sensitivity = true;  // rerun at eps0 / 2 and compare the final rows
  double sens_tol = 0.01;   // relative final-row change allowed; above: error
};

struct MeasureRunResult {
  Field field;
  double eps0 = 0.0;
  double sens_delta = 0.0;  // relative difference at the final stored time
};

// Solve with initial data e^{eps0 Delta} mu on the nodes; times measure the
// run from that mollified start. With the sensitivity check on, the solve is
// repeated at eps0 / 2 and fails if the final stored rows differ by more
// than sens_tol in relative sup norm.
MeasureRunResult solve_with_measure(const DiscreteMeasure& mu,
                                    const Params& prm,
                                    const SpaceTimeGrid& grid,
                                    MeasureRunControls controls,
                                    PdeOptions opt = {});

// |integral u(t2) - integral u(t1) + int_{t1}^{t2} int u^q| / integral u(t1),
// trapezoidal quadrature over the stored rows; the u^q term is dropped for
// absorption-free runs, whose only mass loss is boundary outflow. The field's
// per-step `absorbed` tally is the exact discrete removal, so the residual
// measures the stored-row time quadrature plus outflow.
double mass_balance_residual(const Field& f, double t1, double t2);

struct MonotoneStep {
  double multiplier = 0.0;
  double center_value = 0.0;     // max over stored t >= t_min at the center
  double ratio_to_reference = 0.0;
};

struct MonotoneSequenceResult {
  std::vector<MonotoneStep> steps;
  bool monotone = true;
  double max_violation = 0.0;  // positive part of (previous - current)
  double final_ratio = 0.0;
};

// Solves for multiplier * mu with increasing multipliers; checks pointwise
// monotonicity of the solutions and their saturation toward a reference
// (typically the maximal solution on the same grid).
MonotoneSequenceResult monotone_measure_sequence(
    const DiscreteMeasure& mu, const std::vector<double>& multipliers,
    const Field& reference, const Params& prm, const SpaceTimeGrid& grid,
    MeasureRunControls controls);

}  // namespace capwiener
