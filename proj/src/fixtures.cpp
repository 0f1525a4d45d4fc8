#include "capwiener/fixtures.hpp"

#include "capwiener/common.hpp"

namespace capwiener {

CompactSet fixture(const std::string& name) {
  if (name == "interval") {
    return CompactSet::intervals({{-1.0, 1.0}});
  }
  if (name == "two-intervals") {
    return CompactSet::intervals({{-2.0, -1.0}, {1.0, 2.0}});
  }
  if (name.rfind("cantor-", 0) == 0) {
    const int depth = std::stoi(name.substr(7));
    if (depth < 1 || depth > 4)
      throw InvalidParameterError("fixture: cantor depth must be 1..4");
    return CompactSet::cantor(-1.0, 1.0, 1.0 / 3.0, depth);
  }
  if (name == "point") {
    return CompactSet::points(PointMat::Zero(1, 1));
  }
  if (name == "ball") {
    return CompactSet::balls(PointMat::Zero(2, 1), Vec::Ones(1));
  }
  if (name == "ring") {
    CompactSet disk =
        CompactSet::balls(PointMat::Zero(2, 1), Vec::Constant(1, 1.3));
    return disk.with_shell(Vec::Zero(2), 0.7, 1.3);
  }
  throw InvalidParameterError("fixture: unknown name '" + name + "'");
}

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {
      "interval", "two-intervals", "cantor-1", "cantor-2", "cantor-3",
      "cantor-4", "point",         "ball",     "ring"};
  return names;
}

}  // namespace capwiener
