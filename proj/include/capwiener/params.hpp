#pragma once

#include "capwiener/common.hpp"

namespace capwiener {

// Exponent bookkeeping for the absorption equation u_t - Lap(u) + u^q = 0.
// cap_order = 2/q and cap_power = q/(q-1) are the Bessel capacity indices;
// their product is 2/(q-1), and it is <= N exactly when q >= q_crit.
struct Params {
  int dimension = 1;       // N
  double q = 0.0;          // absorption exponent, q > 1
  double q_crit = 0.0;     // (N+2)/N
  double q_conj = 0.0;     // q/(q-1)
  double cap_order = 0.0;  // 2/q
  double cap_power = 0.0;  // q/(q-1), same as q_conj
  bool supercritical = false;  // q >= q_crit
};

Params make_params(int dimension, double q);

}  // namespace capwiener
