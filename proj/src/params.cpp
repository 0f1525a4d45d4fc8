#include "capwiener/params.hpp"

#include <cmath>

namespace capwiener {

Params make_params(int dimension, double q) {
  if (dimension < 1)
    throw InvalidParameterError("params.N: dimension must be >= 1");
  if (!(q > 1.0) || !std::isfinite(q))
    throw InvalidParameterError("params.q: exponent must satisfy q > 1");
  Params p;
  p.dimension = dimension;
  p.q = q;
  p.q_crit = (dimension + 2.0) / dimension;
  p.q_conj = q / (q - 1.0);
  p.cap_order = 2.0 / q;
  p.cap_power = p.q_conj;
  p.supercritical = q >= p.q_crit;
  return p;
}

}  // namespace capwiener
