#pragma once

#include <string>
#include <vector>

#include "capwiener/geometry.hpp"

namespace capwiener {

// Named compact sets used across experiments and reports.
//   interval       [-1, 1]                       dim 1
//   two-intervals  [-2, -1] u [1, 2]             dim 1
//   cantor-1 .. 4  middle-thirds stages on [-1,1] dim 1
//   point          {0}                           dim 1
//   ball           closed unit ball              dim 2
//   ring           annulus 0.7 <= |x| <= 1.3     dim 2
CompactSet fixture(const std::string& name);

const std::vector<std::string>& fixture_names();

}  // namespace capwiener
