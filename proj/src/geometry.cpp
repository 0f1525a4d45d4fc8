#include "capwiener/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace capwiener {

namespace {

bool finite(double v) { return std::isfinite(v); }

void check_dim(const Vec& x, int dim, const char* who) {
  if (x.size() != dim)
    throw InvalidParameterError(std::string(who) + ": point dimension mismatch");
}

}  // namespace

double AnnulusSlice::inner() const { return std::sqrt(double(n) * t); }
double AnnulusSlice::outer() const { return std::sqrt(double(n + 1) * t); }

bool AnnulusSlice::contains(const Vec& y) const {
  check_dim(y, int(center.size()), "AnnulusSlice::contains");
  double d = (y - center).norm();
  return d >= inner() && d < outer();
}

CompactSet CompactSet::intervals(std::vector<std::array<double, 2>> ivs) {
  CompactSet F;
  F.variant_ = Variant::Intervals;
  F.dim_ = 1;
  for (const auto& iv : ivs) {
    if (!finite(iv[0]) || !finite(iv[1]) || iv[0] > iv[1])
      throw InvalidParameterError("intervals: each component needs a <= b");
  }
  std::sort(ivs.begin(), ivs.end());
  F.intervals_ = std::move(ivs);
  return F;
}

CompactSet CompactSet::cantor(double a, double b, double ratio, int depth) {
  if (!finite(a) || !finite(b) || a >= b)
    throw InvalidParameterError("cantor: base interval needs a < b");
  if (!(ratio > 0.0) || ratio > 0.5)
    throw InvalidParameterError("cantor: ratio must lie in (0, 1/2]");
  if (depth < 0 || depth > 16)
    throw InvalidParameterError("cantor: depth must lie in [0, 16]");
  CompactSet F;
  F.variant_ = Variant::Cantor;
  F.dim_ = 1;
  F.cantor_ = {a, b, ratio, depth};
  std::vector<std::array<double, 2>> cur = {{a, b}};
  for (int d = 0; d < depth; ++d) {
    std::vector<std::array<double, 2>> next;
    next.reserve(2 * cur.size());
    for (const auto& iv : cur) {
      double len = iv[1] - iv[0];
      next.push_back({iv[0], iv[0] + ratio * len});
      next.push_back({iv[1] - ratio * len, iv[1]});
    }
    cur.swap(next);
  }
  F.intervals_ = std::move(cur);
  return F;
}

CompactSet CompactSet::balls(PointMat centers, Vec radii) {
  if (centers.cols() != radii.size())
    throw InvalidParameterError("balls: one radius per center required");
  if (centers.rows() < 1)
    throw InvalidParameterError("balls: dimension must be >= 1");
  if ((radii.array() < 0.0).any())
    throw InvalidParameterError("balls: radii must be >= 0");
  CompactSet F;
  F.variant_ = Variant::Balls;
  F.dim_ = int(centers.rows());
  F.centers_ = std::move(centers);
  F.radii_ = std::move(radii);
  return F;
}

CompactSet CompactSet::points(PointMat pts) {
  if (pts.rows() < 1)
    throw InvalidParameterError("points: dimension must be >= 1");
  CompactSet F;
  F.variant_ = Variant::Points;
  F.dim_ = int(pts.rows());
  F.points_ = std::move(pts);
  return F;
}

CompactSet CompactSet::empty(int dim) {
  return points(PointMat(std::max(dim, 1), 0));
}

bool CompactSet::is_empty() const {
  switch (variant_) {
    case Variant::Intervals:
    case Variant::Cantor:
      return intervals_.empty();
    case Variant::Balls:
      return centers_.cols() == 0;
    case Variant::Points:
      return points_.cols() == 0;
  }
  return true;
}

bool CompactSet::contains(const Vec& y) const {
  check_dim(y, dim_, "CompactSet::contains");
  for (const auto& sh : shells_) {
    double d = (y - sh.center).norm();
    if (d < sh.rmin || d > sh.rmax) return false;
  }
  switch (variant_) {
    case Variant::Intervals:
    case Variant::Cantor: {
      double v = y[0];
      for (const auto& iv : intervals_)
        if (v >= iv[0] && v <= iv[1]) return true;
      return false;
    }
    case Variant::Balls:
      for (Eigen::Index j = 0; j < centers_.cols(); ++j)
        if ((y - centers_.col(j)).norm() <= radii_[j]) return true;
      return false;
    case Variant::Points:
      for (Eigen::Index j = 0; j < points_.cols(); ++j)
        if ((y - points_.col(j)).lpNorm<Eigen::Infinity>() == 0.0) return true;
      return false;
  }
  return false;
}

double CompactSet::distance(const Vec& y) const {
  check_dim(y, dim_, "CompactSet::distance");
  double base = std::numeric_limits<double>::infinity();
  switch (variant_) {
    case Variant::Intervals:
    case Variant::Cantor: {
      double v = y[0];
      for (const auto& iv : intervals_)
        base = std::min(base, std::max({iv[0] - v, v - iv[1], 0.0}));
      break;
    }
    case Variant::Balls:
      for (Eigen::Index j = 0; j < centers_.cols(); ++j)
        base = std::min(base,
                        std::max((y - centers_.col(j)).norm() - radii_[j], 0.0));
      break;
    case Variant::Points:
      for (Eigen::Index j = 0; j < points_.cols(); ++j)
        base = std::min(base, (y - points_.col(j)).norm());
      break;
  }
  for (const auto& sh : shells_) {
    double d = (y - sh.center).norm();
    base = std::max(base, std::max({sh.rmin - d, d - sh.rmax, 0.0}));
  }
  return base;
}

double CompactSet::bounding_radius() const {
  if (is_empty()) return 0.0;
  double base = 0.0;
  switch (variant_) {
    case Variant::Intervals:
    case Variant::Cantor:
      for (const auto& iv : intervals_)
        base = std::max({base, std::abs(iv[0]), std::abs(iv[1])});
      break;
    case Variant::Balls:
      for (Eigen::Index j = 0; j < centers_.cols(); ++j)
        base = std::max(base, centers_.col(j).norm() + radii_[j]);
      break;
    case Variant::Points:
      for (Eigen::Index j = 0; j < points_.cols(); ++j)
        base = std::max(base, points_.col(j).norm());
      break;
  }
  for (const auto& sh : shells_)
    base = std::min(base, sh.center.norm() + sh.rmax);
  return base;
}

void CompactSet::bounding_box(Vec& lo, Vec& hi) const {
  lo = Vec::Zero(dim_);
  hi = Vec::Zero(dim_);
  if (is_empty()) return;
  lo.setConstant(std::numeric_limits<double>::infinity());
  hi.setConstant(-std::numeric_limits<double>::infinity());
  switch (variant_) {
    case Variant::Intervals:
    case Variant::Cantor:
      for (const auto& iv : intervals_) {
        lo[0] = std::min(lo[0], iv[0]);
        hi[0] = std::max(hi[0], iv[1]);
      }
      break;
    case Variant::Balls:
      for (Eigen::Index j = 0; j < centers_.cols(); ++j) {
        lo = lo.cwiseMin((centers_.col(j).array() - radii_[j]).matrix());
        hi = hi.cwiseMax((centers_.col(j).array() + radii_[j]).matrix());
      }
      break;
    case Variant::Points:
      lo = points_.rowwise().minCoeff();
      hi = points_.rowwise().maxCoeff();
      break;
  }
  for (const auto& sh : shells_) {
    lo = lo.cwiseMax((sh.center.array() - sh.rmax).matrix());
    hi = hi.cwiseMin((sh.center.array() + sh.rmax).matrix());
  }
}

double CompactSet::extent() const {
  if (is_empty()) return 0.0;
  Vec lo, hi;
  bounding_box(lo, hi);
  if ((hi - lo).minCoeff() < 0.0) return 0.0;
  return (hi - lo).norm();
}

CompactSet CompactSet::scaled(double k) const {
  if (!(k > 0.0) || !finite(k))
    throw InvalidParameterError("scale_set: factor k must be > 0");
  double s = std::sqrt(k);
  CompactSet F = *this;
  for (auto& iv : F.intervals_) {
    iv[0] /= s;
    iv[1] /= s;
  }
  F.cantor_.a /= s;
  F.cantor_.b /= s;
  F.centers_ /= s;
  F.radii_ /= s;
  F.points_ /= s;
  for (auto& sh : F.shells_) {
    sh.center /= s;
    sh.rmin /= s;
    sh.rmax /= s;
  }
  return F;
}

CompactSet CompactSet::translated(const Vec& z) const {
  check_dim(z, dim_, "CompactSet::translated");
  CompactSet F = *this;
  for (auto& iv : F.intervals_) {
    iv[0] += z[0];
    iv[1] += z[0];
  }
  F.cantor_.a += z[0];
  F.cantor_.b += z[0];
  F.centers_.colwise() += z;
  F.points_.colwise() += z;
  for (auto& sh : F.shells_) sh.center += z;
  return F;
}

CompactSet CompactSet::with_ball(const Vec& center, double radius) const {
  check_dim(center, dim_, "CompactSet::with_ball");
  if (!(radius >= 0.0))
    throw InvalidParameterError("with_ball: radius must be >= 0");
  switch (variant_) {
    case Variant::Intervals:
    case Variant::Cantor: {
      double lo = center[0] - radius, hi = center[0] + radius;
      std::vector<std::array<double, 2>> out;
      for (const auto& iv : intervals_) {
        double l = std::max(iv[0], lo), r = std::min(iv[1], hi);
        if (l <= r) out.push_back({l, r});
      }
      if (out.empty()) return empty(dim_);
      return intervals(std::move(out));
    }
    case Variant::Points: {
      std::vector<Eigen::Index> keep;
      for (Eigen::Index j = 0; j < points_.cols(); ++j)
        if ((points_.col(j) - center).norm() <= radius) keep.push_back(j);
      PointMat pts(dim_, Eigen::Index(keep.size()));
      for (std::size_t j = 0; j < keep.size(); ++j)
        pts.col(Eigen::Index(j)) = points_.col(keep[j]);
      return points(std::move(pts));
    }
    case Variant::Balls: {
      std::vector<Eigen::Index> keep;
      for (Eigen::Index j = 0; j < centers_.cols(); ++j) {
        double d = (centers_.col(j) - center).norm();
        if (d - radii_[j] <= radius) keep.push_back(j);
      }
      if (keep.empty()) return empty(dim_);
      CompactSet F;
      F.variant_ = Variant::Balls;
      F.dim_ = dim_;
      F.centers_.resize(dim_, Eigen::Index(keep.size()));
      F.radii_.resize(Eigen::Index(keep.size()));
      for (std::size_t j = 0; j < keep.size(); ++j) {
        F.centers_.col(Eigen::Index(j)) = centers_.col(keep[j]);
        F.radii_[Eigen::Index(j)] = radii_[keep[j]];
      }
      F.shells_ = shells_;
      F.shells_.push_back(Shell{center, 0.0, radius});
      return F;
    }
  }
  return empty(dim_);
}

CompactSet CompactSet::with_shell(const Vec& center, double rmin,
                                  double rmax) const {
  check_dim(center, dim_, "CompactSet::with_shell");
  if (!(rmin >= 0.0) || !(rmax >= rmin))
    throw InvalidParameterError("with_shell: need 0 <= rmin <= rmax");
  switch (variant_) {
    case Variant::Intervals:
    case Variant::Cantor: {
      double c = center[0];
      std::array<std::array<double, 2>, 2> sides = {
          {{c - rmax, c - rmin}, {c + rmin, c + rmax}}};
      std::vector<std::array<double, 2>> out;
      for (const auto& iv : intervals_) {
        for (const auto& sd : sides) {
          double l = std::max(iv[0], sd[0]), r = std::min(iv[1], sd[1]);
          if (l <= r) out.push_back({l, r});
        }
      }
      if (out.empty()) return empty(dim_);
      return intervals(std::move(out));
    }
    case Variant::Points: {
      std::vector<Eigen::Index> keep;
      for (Eigen::Index j = 0; j < points_.cols(); ++j) {
        double d = (points_.col(j) - center).norm();
        if (d >= rmin && d <= rmax) keep.push_back(j);
      }
      PointMat pts(dim_, Eigen::Index(keep.size()));
      for (std::size_t j = 0; j < keep.size(); ++j)
        pts.col(Eigen::Index(j)) = points_.col(keep[j]);
      return points(std::move(pts));
    }
    case Variant::Balls: {
      std::vector<Eigen::Index> keep;
      for (Eigen::Index j = 0; j < centers_.cols(); ++j) {
        double d = (centers_.col(j) - center).norm();
        if (d - radii_[j] <= rmax && d + radii_[j] >= rmin) keep.push_back(j);
      }
      if (keep.empty()) return empty(dim_);
      CompactSet F;
      F.variant_ = Variant::Balls;
      F.dim_ = dim_;
      F.centers_.resize(dim_, Eigen::Index(keep.size()));
      F.radii_.resize(Eigen::Index(keep.size()));
      for (std::size_t j = 0; j < keep.size(); ++j) {
        F.centers_.col(Eigen::Index(j)) = centers_.col(keep[j]);
        F.radii_[Eigen::Index(j)] = radii_[keep[j]];
      }
      F.shells_ = shells_;
      F.shells_.push_back(Shell{center, rmin, rmax});
      return F;
    }
  }
  return empty(dim_);
}

namespace {

// Even number of segments so spacing = len / (2 ceil(len / 2h)) <= h.
void discretize_interval(double a, double b, double h,
                         std::vector<double>& out) {
  double len = b - a;
  if (len <= 0.0) {
    out.push_back(a);
    return;
  }
  auto nseg = 2 * static_cast<long>(std::ceil(len / (2.0 * h)));
  for (long j = 0; j <= nseg; ++j)
    out.push_back(a + len * (double(j) / double(nseg)));
}

}  // namespace

PointMat CompactSet::discretize(double h) const {
  if (!(h > 0.0) || !finite(h))
    throw InvalidParameterError("discretize: spacing h must be > 0");
  if (is_empty()) return PointMat(dim_, 0);
  switch (variant_) {
    case Variant::Intervals:
    case Variant::Cantor: {
      std::vector<double> pts;
      for (const auto& iv : intervals_) discretize_interval(iv[0], iv[1], h, pts);
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      PointMat out(1, Eigen::Index(pts.size()));
      for (std::size_t j = 0; j < pts.size(); ++j) out(0, Eigen::Index(j)) = pts[j];
      return out;
    }
    case Variant::Points: {
      std::vector<Eigen::Index> keep;
      for (Eigen::Index j = 0; j < points_.cols(); ++j)
        if (contains(points_.col(j))) keep.push_back(j);
      PointMat out(dim_, Eigen::Index(keep.size()));
      for (std::size_t j = 0; j < keep.size(); ++j)
        out.col(Eigen::Index(j)) = points_.col(keep[j]);
      return out;
    }
    case Variant::Balls: {
      Vec lo, hi;
      bounding_box(lo, hi);
      double g = h / 2.0;
      std::vector<long> ilo(dim_), ihi(dim_);
      double count = 1.0;
      for (int d = 0; d < dim_; ++d) {
        ilo[d] = static_cast<long>(std::floor(lo[d] / g));
        ihi[d] = static_cast<long>(std::ceil(hi[d] / g));
        if (ihi[d] < ilo[d]) return PointMat(dim_, 0);
        count *= double(ihi[d] - ilo[d] + 1);
      }
      if (count > 4e6)
        throw InvalidParameterError("discretize: lattice too fine for this set");
      std::vector<double> coords;
      Vec y(dim_);
      std::vector<long> idx(ilo);
      while (true) {
        for (int d = 0; d < dim_; ++d) y[d] = g * double(idx[d]);
        if (contains(y))
          for (int d = 0; d < dim_; ++d) coords.push_back(y[d]);
        int d = dim_ - 1;
        while (d >= 0 && ++idx[d] > ihi[d]) idx[d] = ilo[d], --d;
        if (d < 0) break;
      }
      Eigen::Index m = Eigen::Index(coords.size() / std::size_t(dim_));
      PointMat out(dim_, m);
      for (Eigen::Index j = 0; j < m; ++j)
        for (int d = 0; d < dim_; ++d) out(d, j) = coords[std::size_t(j) * dim_ + d];
      return out;
    }
  }
  return PointMat(dim_, 0);
}

const std::vector<std::array<double, 2>>& CompactSet::components() const {
  return intervals_;
}

CompactSet slice(const CompactSet& F, const Vec& x, double t, int n) {
  check_dim(x, F.dim_, "slice");
  if (!(t > 0.0) || !finite(t))
    throw InvalidParameterError("slice: time t must be > 0");
  if (n < 0) throw InvalidParameterError("slice: index n must be >= 0");
  double ri = std::sqrt(double(n) * t);
  double ro = std::sqrt(double(n + 1) * t);
  switch (F.variant_) {
    case CompactSet::Variant::Intervals:
    case CompactSet::Variant::Cantor: {
      double c = x[0];
      std::vector<std::array<double, 2>> sides;
      if (n == 0)
        sides = {{c - ro, c + ro}};
      else
        sides = {{c - ro, c - ri}, {c + ri, c + ro}};
      std::vector<std::array<double, 2>> out;
      for (const auto& iv : F.intervals_) {
        for (const auto& sd : sides) {
          double l = std::max(iv[0], sd[0]), r = std::min(iv[1], sd[1]);
          if (l < r) {
            out.push_back({l, r});
          } else if (l == r) {
            double d = std::abs(l - c);
            if (d >= ri && d < ro) out.push_back({l, r});
          }
        }
      }
      if (out.empty()) return CompactSet::empty(1);
      return CompactSet::intervals(std::move(out));
    }
    case CompactSet::Variant::Points: {
      std::vector<Eigen::Index> keep;
      for (Eigen::Index j = 0; j < F.points_.cols(); ++j) {
        double d = (F.points_.col(j) - x).norm();
        if (d >= ri && d < ro) keep.push_back(j);
      }
      PointMat pts(F.dim_, Eigen::Index(keep.size()));
      for (std::size_t j = 0; j < keep.size(); ++j)
        pts.col(Eigen::Index(j)) = F.points_.col(keep[j]);
      return CompactSet::points(std::move(pts));
    }
    case CompactSet::Variant::Balls: {
      std::vector<Eigen::Index> keep;
      for (Eigen::Index j = 0; j < F.centers_.cols(); ++j) {
        double d = (F.centers_.col(j) - x).norm();
        if (d - F.radii_[j] <= ro && d + F.radii_[j] >= ri) keep.push_back(j);
      }
      if (keep.empty()) return CompactSet::empty(F.dim_);
      CompactSet S;
      S.variant_ = CompactSet::Variant::Balls;
      S.dim_ = F.dim_;
      S.centers_.resize(F.dim_, Eigen::Index(keep.size()));
      S.radii_.resize(Eigen::Index(keep.size()));
      for (std::size_t j = 0; j < keep.size(); ++j) {
        S.centers_.col(Eigen::Index(j)) = F.centers_.col(keep[j]);
        S.radii_[Eigen::Index(j)] = F.radii_[keep[j]];
      }
      S.shells_ = F.shells_;
      S.shells_.push_back(Shell{x, ri, ro});
      return S;
    }
  }
  return CompactSet::empty(F.dim_);
}

int slice_range(const CompactSet& F, const Vec& x, double t) {
  check_dim(x, F.dim(), "slice_range");
  if (!(t > 0.0) || !finite(t))
    throw InvalidParameterError("slice_range: time t must be > 0");
  if (F.is_empty()) return 0;
  double maxd = 0.0;
  switch (F.variant()) {
    case CompactSet::Variant::Intervals:
    case CompactSet::Variant::Cantor: {
      double c = x[0];
      for (const auto& iv : F.components())
        maxd = std::max({maxd, std::abs(c - iv[0]), std::abs(c - iv[1])});
      break;
    }
    case CompactSet::Variant::Balls:
      for (Eigen::Index j = 0; j < F.ball_centers().cols(); ++j)
        maxd = std::max(maxd,
                        (F.ball_centers().col(j) - x).norm() + F.ball_radii()[j]);
      break;
    case CompactSet::Variant::Points:
      for (Eigen::Index j = 0; j < F.point_list().cols(); ++j)
        maxd = std::max(maxd, (F.point_list().col(j) - x).norm());
      break;
  }
  for (const auto& sh : F.shells())
    maxd = std::min(maxd, (sh.center - x).norm() + sh.rmax);
  // First index whose annulus lies wholly beyond the farthest point.  The
  // farthest point itself sits in slice floor(maxd^2/t), also when the ratio
  // is an exact integer (half-open shells), so +1 rather than ceil.
  double nm = std::floor(maxd * maxd / t) + 1.0;
  if (nm > 2e9) throw InvalidParameterError("slice_range: index overflow");
  return int(nm);
}

SphereCover sphere_cover(const Vec& x, double t, int n, int dim) {
  check_dim(x, dim, "sphere_cover");
  if (!(t > 0.0)) throw InvalidParameterError("sphere_cover: t must be > 0");
  if (n < 0) throw InvalidParameterError("sphere_cover: n must be >= 0");
  double st = std::sqrt(t);
  SphereCover cov;
  cov.mid_radius = 0.5 * (std::sqrt(double(n + 1)) + std::sqrt(double(n))) * st;
  cov.ball_radius = std::sqrt(t / double(n + 1));
  cov.min_spacing = st / std::sqrt(2.0 * double(n + 1));
  if (dim == 1) {
    cov.centers.resize(1, 2);
    cov.centers(0, 0) = x[0] - cov.mid_radius;
    cov.centers(0, 1) = x[0] + cov.mid_radius;
    return cov;
  }
  if (dim == 2) {
    double half = std::min(1.0, cov.min_spacing / (2.0 * cov.mid_radius));
    double theta_min = 2.0 * std::asin(half);
    long J = std::max<long>(1, long(std::floor(2.0 * std::numbers::pi / theta_min)));
    cov.centers.resize(2, J);
    for (long j = 0; j < J; ++j) {
      double th = 2.0 * std::numbers::pi * double(j) / double(J);
      cov.centers(0, j) = x[0] + cov.mid_radius * std::cos(th);
      cov.centers(1, j) = x[1] + cov.mid_radius * std::sin(th);
    }
    return cov;
  }
  if (dim == 3) {
    // Greedy farthest-point subset of a Fibonacci sample, stopping once the
    // best candidate would violate the spacing bound.
    double ratio = 2.0 * cov.mid_radius / cov.min_spacing;
    long M = std::max<long>(256, long(8.0 * ratio * ratio));
    PointMat cand(3, M);
    double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (long i = 0; i < M; ++i) {
      double z = 1.0 - 2.0 * (double(i) + 0.5) / double(M);
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double phi = golden * double(i);
      cand(0, i) = r * std::cos(phi);
      cand(1, i) = r * std::sin(phi);
      cand(2, i) = z;
    }
    cand *= cov.mid_radius;
    std::vector<long> sel = {0};
    Vec mind = (cand.colwise() - cand.col(0)).colwise().norm().transpose();
    while (true) {
      Eigen::Index arg;
      double best = mind.maxCoeff(&arg);
      if (best < cov.min_spacing) break;
      sel.push_back(long(arg));
      mind = mind.cwiseMin(
          (cand.colwise() - cand.col(arg)).colwise().norm().transpose());
    }
    cov.centers.resize(3, Eigen::Index(sel.size()));
    for (std::size_t j = 0; j < sel.size(); ++j)
      cov.centers.col(Eigen::Index(j)) = cand.col(sel[j]) + x;
    return cov;
  }
  throw UnsupportedError("sphere_cover: dimensions above 3 not supported");
}

}  // namespace capwiener
