#pragma once

#include "capwiener/common.hpp"

#include <array>
#include <vector>

namespace capwiener {

// Radial constraint |y - center| in [rmin, rmax]. Stored as the closure; the
// half-open bookkeeping of annulus slices lives in AnnulusSlice.
struct Shell {
  Vec center;
  double rmin = 0.0;
  double rmax = 0.0;
};

// Annulus T_n(x, t) = { y : sqrt(n t) <= |y - x| < sqrt((n+1) t) }.
// Half-open on the distance so {T_n}_{n>=0} partitions R^N exactly.
struct AnnulusSlice {
  Vec center;
  double t = 0.0;
  int n = 0;

  double inner() const;
  double outer() const;
  bool contains(const Vec& y) const;
};

// Compact subset of R^N given by one generator variant plus optional radial
// shells. Intervals and cantor iterates are exact under slicing (interval
// arithmetic); balls and point sets carry shells for slices and cover pieces.
class CompactSet {
 public:
  enum class Variant { Intervals, Cantor, Balls, Points };

  static CompactSet intervals(std::vector<std::array<double, 2>> ivs);
  static CompactSet cantor(double a, double b, double ratio, int depth);
  static CompactSet balls(PointMat centers, Vec radii);
  static CompactSet points(PointMat pts);
  static CompactSet empty(int dim);

  Variant variant() const { return variant_; }
  int dim() const { return dim_; }
  bool is_empty() const;

  bool contains(const Vec& y) const;
  // Distance lower bound to the set; exact for shell-free variants and for
  // radially shelled balls (used to fatten indicator data).
  double distance(const Vec& y) const;
  double bounding_radius() const;
  // Axis-aligned bounding box of the closure (shells applied).
  void bounding_box(Vec& lo, Vec& hi) const;
  double extent() const;  // diameter upper bound from the bounding box

  // F / sqrt(k); divides every generator length by sqrt(k).
  CompactSet scaled(double k) const;
  CompactSet translated(const Vec& z) const;
  // Intersection with the closed ball B(center, radius); exact for interval
  // variants, a shell for the others.
  CompactSet with_ball(const Vec& center, double radius) const;
  // Intersection with the closed annulus rmin <= |y - center| <= rmax.
  CompactSet with_shell(const Vec& center, double rmin, double rmax) const;

  // Finite point set with spacing <= h whose h-neighborhood covers the set.
  // Intervals use an even split per component (endpoints always included);
  // balls use a membership-filtered lattice of pitch h/2.
  PointMat discretize(double h) const;

  // Expanded closed components for the 1-d variants.
  const std::vector<std::array<double, 2>>& components() const;
  const std::vector<Shell>& shells() const { return shells_; }

  // Generator access for serialization.
  struct CantorGen {
    double a = 0.0, b = 0.0, ratio = 0.0;
    int depth = 0;
  };
  const CantorGen& cantor_gen() const { return cantor_; }
  const PointMat& ball_centers() const { return centers_; }
  const Vec& ball_radii() const { return radii_; }
  const PointMat& point_list() const { return points_; }

  friend CompactSet slice(const CompactSet& F, const Vec& x, double t, int n);

 private:
  CompactSet() = default;

  Variant variant_ = Variant::Points;
  int dim_ = 1;
  std::vector<std::array<double, 2>> intervals_;  // components (cantor too)
  CantorGen cantor_;
  PointMat centers_;  // N x k
  Vec radii_;
  PointMat points_;  // N x m
  std::vector<Shell> shells_;
};

// F intersected with T_n(x, t). Interval variants intersect exactly (the
// closure of the half-open annulus component is stored); balls and points
// filter by the half-open membership.
CompactSet slice(const CompactSet& F, const Vec& x, double t, int n);

// ceil(max_{y in F} |x - y|^2 / t); every slice beyond it is empty and the
// largest nonempty slice index is floor(max dist^2 / t).
int slice_range(const CompactSet& F, const Vec& x, double t);

// Parabolic rescaling F / sqrt(k): the set as seen at time scale k. Pass
// 1/k to dilate by sqrt(k).
inline CompactSet scale_set(const CompactSet& F, double k) {
  return F.scaled(k);
}

// Cover of T_n(x, t) by J balls of radius sqrt(t/(n+1)) centered on the
// mid-sphere of radius (sqrt(n+1)+sqrt(n))/2 * sqrt(t), pairwise spacing
// >= sqrt(t) / sqrt(2(n+1)). N = 1 degenerates to the two endpoints.
struct SphereCover {
  PointMat centers;     // N x J
  double ball_radius = 0.0;
  double min_spacing = 0.0;
  double mid_radius = 0.0;
};

SphereCover sphere_cover(const Vec& x, double t, int n, int dim);

}  // namespace capwiener
