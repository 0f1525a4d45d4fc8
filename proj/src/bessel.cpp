#include "capwiener/bessel.hpp"

#include "capwiener/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace capwiener {

namespace {

// Hermite slopes from central differences (one-sided at the ends).
Vec hermite_slopes(const Vec& x, const Vec& y) {
  const int n = static_cast<int>(x.size());
  Vec d(n);
  for (int i = 0; i < n; ++i) {
    if (i == 0)
      d[i] = (y[1] - y[0]) / (x[1] - x[0]);
    else if (i == n - 1)
      d[i] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
    else
      d[i] = (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]);
  }
  return d;
}

double hermite_eval(const Vec& x, const Vec& y, const Vec& d, double xi) {
  const int n = static_cast<int>(x.size());
  const double step = (x[n - 1] - x[0]) / (n - 1);
  int i = static_cast<int>((xi - x[0]) / step);
  i = std::max(0, std::min(n - 2, i));
  const double h = x[i + 1] - x[i];
  const double s = (xi - x[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1];
}

}  // namespace

double BesselKernel::log_integrand(double u, double r) const {
  // s = e^u:  s^{(alpha-N)/2 - 1} e^{-s - r^2/(4s)} ds
  //        -> exp(u (alpha-N)/2 - e^u - (r^2/4) e^{-u}) du
  return 0.5 * (alpha_ - N_) * u - std::exp(u) - 0.25 * r * r * std::exp(-u);
}

double BesselKernel::value_quad(double r) const {
  if (!(r > 0.0)) throw InvalidParameterError("bessel: radius must be > 0");
  const double u_lo = std::min(2.0 * std::log(0.5 * r) - 5.0, -6.0);
  const double u_hi = std::max(0.0, std::log(0.5 * r)) + 4.5;
  // Shift by the peak value so the exponentials stay in range.
  const double u_star = std::log(std::max(r, 0.2) / 2.0);
  const double shift = log_integrand(u_star, r);
  const int panels = std::max(24, static_cast<int>((u_hi - u_lo) * 2.0));
  std::vector<double> pts(panels + 1);
  for (int i = 0; i <= panels; ++i)
    pts[i] = u_lo + (u_hi - u_lo) * i / panels;
  const double integral = gl_integrate_panels(
      pts, 10, [&](double u) { return std::exp(log_integrand(u, r) - shift); });
  return std::exp(log_norm_ + shift) * integral;
}

double BesselKernel::value_simpson(double r, double tol) const {
  if (!(r > 0.0)) throw InvalidParameterError("bessel: radius must be > 0");
  const double u_lo = std::min(2.0 * std::log(0.5 * r) - 5.0, -6.0);
  const double u_hi = std::max(0.0, std::log(0.5 * r)) + 4.5;
  const double u_star = std::log(std::max(r, 0.2) / 2.0);
  const double shift = log_integrand(u_star, r);
  const double integral = adaptive_simpson(
      [&](double u) { return std::exp(log_integrand(u, r) - shift); }, u_lo,
      u_hi, tol);
  return std::exp(log_norm_ + shift) * integral;
}

BesselKernel::BesselKernel(int dimension, double alpha) {
  if (dimension < 1 || dimension > 3)
    throw InvalidParameterError("bessel: dimension must be 1, 2 or 3");
  if (!(alpha > 0.0) || !(alpha < 2.0 + 1e-12))
    throw InvalidParameterError("bessel: alpha must lie in (0, 2]");
  N_ = dimension;
  alpha_ = alpha;
  log_norm_ = -0.5 * N_ * std::log(4.0 * M_PI) - std::lgamma(0.5 * alpha_);

  // Table 1: log-spaced radii on [1e-6, 1].
  {
    const int n = 721;
    lx1_.resize(n);
    ly1_.resize(n);
    const double lo = std::log(1e-6), hi = 0.0;
    for (int i = 0; i < n; ++i) {
      lx1_[i] = lo + (hi - lo) * i / (n - 1);
      ly1_[i] = std::log(value_quad(std::exp(lx1_[i])));
    }
    d1_ = hermite_slopes(lx1_, ly1_);
  }
  // Table 2: linear radii on [1, 60].
  {
    const int n = 1181;
    x2_.resize(n);
    ly2_.resize(n);
    for (int i = 0; i < n; ++i) {
      x2_[i] = 1.0 + 59.0 * i / (n - 1);
      ly2_[i] = std::log(value_quad(x2_[i]));
    }
    d2_ = hermite_slopes(x2_, ly2_);
  }
}

double BesselKernel::value(double r) const {
  if (!(r > 0.0)) throw InvalidParameterError("bessel: radius must be > 0");
  if (r < 1e-6 || r > 60.0) return value_quad(r);
  if (r <= 1.0) return std::exp(hermite_eval(lx1_, ly1_, d1_, std::log(r)));
  return std::exp(hermite_eval(x2_, ly2_, d2_, r));
}

std::shared_ptr<const BesselKernel> shared_kernel(int dimension, double alpha) {
  static std::mutex mtx;
  static std::map<std::pair<int, long long>,
                  std::shared_ptr<const BesselKernel>>
      cache;
  const auto key = std::make_pair(
      dimension, static_cast<long long>(std::llround(alpha * 1e12)));
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_shared<BesselKernel>(dimension, alpha))
             .first;
  return it->second;
}

}  // namespace capwiener
