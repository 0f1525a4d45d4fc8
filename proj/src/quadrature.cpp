#include "capwiener/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace capwiener {

namespace {

// Legendre P_n and derivative at x via the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

GLRule build_rule(int n) {
  GLRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      std::tie(p, dp) = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    std::tie(p, dp) = legendre(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.x[i] = -x;
    rule.w[i] = w;
    rule.x[n - 1 - i] = x;
    rule.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.x[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GLRule& gl_rule(int order) {
  if (order < 1 || order > 256)
    throw InvalidParameterError("gl_rule: order must be in [1, 256]");
  static std::mutex mtx;
  static std::map<int, GLRule> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

double gl_integrate(double a, double b, int order,
                    const std::function<double(double)>& f) {
  const GLRule& r = gl_rule(order);
  const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < r.x.size(); ++i) s += r.w[i] * f(mid + hw * r.x[i]);
  return hw * s;
}

double gl_integrate_panels(const std::vector<double>& pts, int order,
                           const std::function<double(double)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    s += gl_integrate(pts[i], pts[i + 1], order, f);
  return s;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace capwiener
