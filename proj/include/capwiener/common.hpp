#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace capwiener {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Column j of a PointMat is one point in R^N.
using PointMat = Eigen::MatrixXd;

struct InvalidParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iteration/quadrature budget exhausted; carries the best certified bounds.
struct NonConvergedError : std::runtime_error {
  double lower = 0.0;
  double upper = 0.0;
  NonConvergedError(const std::string& what, double lo, double up)
      : std::runtime_error(what), lower(lo), upper(up) {}
};

// Static partition of [0, n) over at most `jobs` threads. Each index is
// processed exactly once and writers own disjoint slots, so results do not
// depend on the degree of parallelism.
inline void parallel_for(std::size_t n, unsigned jobs,
                         const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  unsigned k = jobs == 0 ? hw : jobs;
  if (k > n) k = static_cast<unsigned>(n);
  if (k <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(k);
  for (unsigned w = 0; w < k; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += k) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace capwiener
