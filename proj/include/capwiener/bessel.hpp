#pragma once

#include "capwiener/common.hpp"

#include <memory>

namespace capwiener {

// Radial kernel of (1 - Laplacian)^{-alpha/2} on R^N, represented through its
// subordination integral
//   G(r) = [(4 pi)^{N/2} Gamma(alpha/2)]^{-1}
//          * Int_0^inf s^{(alpha-N)/2 - 1} exp(-s - r^2/(4 s)) ds,
// normalized so that the kernel integrates to 1 over R^N.
//
// value() is backed by cubic-Hermite tables in log G (log-spaced radii on
// [1e-6, 1], linear on [1, 60]) and falls back to direct quadrature outside
// the tabulated range. value_quad()/value_simpson() evaluate the integral
// directly and exist as independent cross-checks.
class BesselKernel {
 public:
  BesselKernel(int dimension, double alpha);

  double value(double r) const;
  double value_quad(double r) const;
  double value_simpson(double r, double tol = 1e-12) const;

  int dimension() const { return N_; }
  double alpha() const { return alpha_; }
  double table_r_min() const { return std::exp(lx1_[0]); }
  double table_r_max() const { return x2_[x2_.size() - 1]; }

 private:
  double log_integrand(double u, double r) const;

  int N_ = 0;
  double alpha_ = 0.0;
  double log_norm_ = 0.0;
  Vec lx1_, ly1_, d1_;  // log r in [ln 1e-6, 0], log G, slopes
  Vec x2_, ly2_, d2_;   // r in [1, 60], log G, slopes
};

// Process-wide cache, keyed by (dimension, alpha). Table construction is the
// expensive part; experiments share one kernel per parameter set.
std::shared_ptr<const BesselKernel> shared_kernel(int dimension, double alpha);

}  // namespace capwiener
