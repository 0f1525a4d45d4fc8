#pragma once

#include "capwiener/common.hpp"

#include <functional>

namespace capwiener {

// Gauss-Legendre rule on [-1, 1]; nodes ascending. Cached per order.
struct GLRule {
  Vec x;
  Vec w;
};

const GLRule& gl_rule(int order);

double gl_integrate(double a, double b, int order,
                    const std::function<double(double)>& f);

// Composite rule over consecutive panels [pts[i], pts[i+1]].
double gl_integrate_panels(const std::vector<double>& pts, int order,
                           const std::function<double(double)>& f);

// Classic adaptive Simpson with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 28);

}  // namespace capwiener
