#include "capwiener/heat.hpp"

#include "capwiener/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace capwiener {

double heat_kernel(const Vec& xi, double tau, int dim) {
  if (!(tau > 0.0))
    throw InvalidParameterError("heat kernel: tau must be > 0");
  if (xi.size() != dim)
    throw InvalidParameterError("heat kernel: dimension mismatch");
  return std::pow(4.0 * M_PI * tau, -0.5 * dim) *
         std::exp(-xi.squaredNorm() / (4.0 * tau));
}

double heat_of_measure(const DiscreteMeasure& mu, const Vec& x, double t) {
  if (!(t > 0.0))
    throw InvalidParameterError("heat extension: t must be > 0");
  if (mu.size() == 0) return 0.0;
  if (mu.dim() != x.size())
    throw InvalidParameterError("heat extension: dimension mismatch");
  const double norm = std::pow(4.0 * M_PI * t, -0.5 * mu.dim());
  double s = 0.0;
  for (long k = 0; k < mu.size(); ++k)
    s += mu.weights[k] *
         std::exp(-(x - mu.atoms.col(k)).squaredNorm() / (4.0 * t));
  return norm * s;
}

DiscreteMeasure SlicedMeasure::slice_part(int n) const {
  std::vector<long> idx;
  for (long k = 0; k < total.size(); ++k)
    if (slice_of_atom[k] == n) idx.push_back(k);
  DiscreteMeasure out;
  out.atoms.resize(total.dim(), static_cast<long>(idx.size()));
  out.weights.resize(static_cast<long>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.atoms.col(static_cast<long>(i)) = total.atoms.col(idx[i]);
    out.weights[static_cast<long>(i)] = total.weights[idx[i]];
  }
  return out;
}

SlicedMeasure build_capacitary_mu(const PotentialTerms& series,
                                  const Params& prm) {
  SlicedMeasure out;
  out.x = series.x;
  out.t = series.t;
  long natoms = 0;
  for (const auto& term : series.terms)
    if (!term.empty && !term.skipped) natoms += term.nu.size();
  out.total.atoms.resize(prm.dimension, natoms);
  out.total.weights.resize(natoms);
  out.slice_of_atom.resize(natoms);
  long k = 0;
  for (const auto& term : series.terms) {
    if (term.empty || term.skipped || term.nu.size() == 0) continue;
    const double scale = std::sqrt((term.n + 1) * series.t);
    const double wfac =
        std::pow((term.n + 1) * series.t,
                 0.5 * prm.dimension - 1.0 / (prm.q - 1.0));
    out.slice_ids.push_back(term.n);
    for (long j = 0; j < term.nu.size(); ++j, ++k) {
      out.total.atoms.col(k) = scale * term.nu.atoms.col(j);
      out.total.weights[k] = wfac * term.nu.weights[j];
      out.slice_of_atom[k] = term.n;
    }
  }
  return out;
}

Est4Result est4_check(const PotentialTerms& series, const SlicedMeasure& mu,
                      const Params& prm) {
  Est4Result r;
  r.lhs = heat_of_measure(mu.total, mu.x, mu.t);
  double s = 0.0;
  for (const auto& term : series.terms) {
    if (term.empty || term.skipped) continue;
    s += std::pow(std::sqrt((term.n + 1) * mu.t),
                  prm.dimension - 2.0 / (prm.q - 1.0)) *
         std::exp(-0.25 * (term.n + 1)) * term.capacity;
  }
  r.rhs = std::pow(4.0 * M_PI * mu.t, -0.5 * prm.dimension) * s;
  return r;
}

int partition_cell(double rho2, double t, double alpha) {
  if (!(t > 0.0) || !(rho2 > 0.0))
    throw InvalidParameterError("partition: rho^2 and t must be > 0");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw InvalidParameterError("partition: alpha must lie in (0, 1)");
  const double ratio = rho2 / t;
  if (ratio >= 1.0)
    return static_cast<int>(std::floor(std::min(ratio, 2.0e9)));
  const double g = std::log(ratio) / std::log(alpha);  // g > 0
  return static_cast<int>(std::floor(std::max(-g, -2.0e9)));
}

namespace {

struct AxisGrid {
  Vec nodes;
  Vec weights;
};

std::vector<double> axis_breaks(double xd, double hlo, double hhi,
                                double sigma_g, double sigma_mu, double wlo,
                                double whi, int hull_cap) {
  std::vector<double> b = {wlo, whi};
  for (int k = -8; k <= 8; ++k) b.push_back(xd + k * sigma_g);
  const double lo = hlo - 6.0 * sigma_mu, hi = hhi + 6.0 * sigma_mu;
  const double step = std::max(sigma_mu, (hi - lo) / hull_cap);
  for (double v = lo; v < hi + 0.5 * step; v += step) b.push_back(v);
  std::vector<double> c;
  for (double v : b)
    if (v > wlo - 1e-12 && v < whi + 1e-12)
      c.push_back(std::clamp(v, wlo, whi));
  std::sort(c.begin(), c.end());
  const double merge_tol = 0.125 * std::min(sigma_g, sigma_mu) + 1e-14;
  std::vector<double> d;
  for (double v : c)
    if (d.empty() || v - d.back() > merge_tol) d.push_back(v);
  if (d.empty() || d.front() > wlo) d.insert(d.begin(), wlo);
  if (whi - d.back() > merge_tol)
    d.push_back(whi);
  else
    d.back() = whi;
  // Fill wide gaps so neither factor is skipped over.
  const double fill = 2.0 * std::max(sigma_g, sigma_mu);
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    out.push_back(d[i]);
    const double gap = d[i + 1] - d[i];
    const int sub = std::min(6, static_cast<int>(std::ceil(gap / fill)));
    for (int j = 1; j < sub; ++j) out.push_back(d[i] + gap * j / sub);
  }
  out.push_back(d.back());
  return out;
}

AxisGrid axis_grid(const std::vector<double>& brk, int gl, bool refined) {
  std::vector<double> pts;
  if (!refined) {
    pts = brk;
  } else {
    for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
      pts.push_back(brk[i]);
      pts.push_back(0.5 * (brk[i] + brk[i + 1]));
    }
    pts.push_back(brk.back());
  }
  const GLRule& r = gl_rule(gl);
  const long panels = static_cast<long>(pts.size()) - 1;
  AxisGrid g;
  g.nodes.resize(panels * gl);
  g.weights.resize(panels * gl);
  for (long p = 0; p < panels; ++p) {
    const double mid = 0.5 * (pts[p] + pts[p + 1]);
    const double hw = 0.5 * (pts[p + 1] - pts[p]);
    for (int i = 0; i < gl; ++i) {
      g.nodes[p * gl + i] = mid + hw * r.x[i];
      g.weights[p * gl + i] = hw * r.w[i];
    }
  }
  return g;
}

struct SweepAccum {
  double value = 0.0;
  std::vector<double> j1, j2;
  long nodes = 0;
};

int near_index(const std::vector<int>& ids, int threshold) {
  return static_cast<int>(std::upper_bound(ids.begin(), ids.end(), threshold) -
                          ids.begin()) -
         1;
}

SweepAccum duhamel_sweep(const SlicedMeasure& mu, const Params& prm,
                         const DuhamelControls& ctl,
                         const std::vector<double>& alphas, bool refined) {
  const int N = prm.dimension;
  const double t = mu.t, q = prm.q;
  const double eps0 = ctl.eps0_rel * t;
  const int hull_cap =
      ctl.max_axis_panels > 0 ? ctl.max_axis_panels : (N == 1 ? 96 : 36);
  const int gl = ctl.gl + (refined ? 2 : 0);
  const long natoms = mu.total.size();
  const int nsl = static_cast<int>(mu.slice_ids.size());

  SweepAccum acc;
  acc.j1.assign(alphas.size(), 0.0);
  acc.j2.assign(alphas.size(), 0.0);
  if (natoms == 0) return acc;

  // Time panels: geometric toward s = 0 (mollification scale) and s = t.
  std::vector<double> sb = {0.0};
  const int jdown = std::clamp(
      static_cast<int>(std::ceil(std::log2(t / eps0))) + 3, 8, 40);
  for (int j = jdown; j >= 1; --j) sb.push_back(t * std::ldexp(1.0, -j));
  for (int j = 2; j <= 8; ++j) sb.push_back(t * (1.0 - std::ldexp(1.0, -j)));
  sb.push_back(t);
  if (refined) {
    std::vector<double> sb2;
    for (std::size_t i = 0; i + 1 < sb.size(); ++i) {
      sb2.push_back(sb[i]);
      sb2.push_back(0.5 * (sb[i] + sb[i + 1]));
    }
    sb2.push_back(sb.back());
    sb.swap(sb2);
  }

  // Atom hull and truncation window per axis.
  Vec hlo = mu.total.atoms.rowwise().minCoeff();
  Vec hhi = mu.total.atoms.rowwise().maxCoeff();
  const double diam = (hhi - hlo).norm();
  const double rwin = ctl.trunc * std::sqrt(t) + diam;

  std::vector<int> row(natoms);
  for (long k = 0; k < natoms; ++k)
    row[k] = near_index(mu.slice_ids, mu.slice_of_atom[k]);

  const GLRule& rs = gl_rule(gl);
  for (std::size_t pi = 0; pi + 1 < sb.size(); ++pi) {
    const double smid = 0.5 * (sb[pi] + sb[pi + 1]);
    const double shw = 0.5 * (sb[pi + 1] - sb[pi]);
    for (int gi = 0; gi < gl; ++gi) {
      const double s = smid + shw * rs.x[gi];
      const double ws = shw * rs.w[gi];
      const double var_mu = s + eps0;
      const double sigma_mu = std::sqrt(var_mu);
      const double sigma_g = std::sqrt(t - s);
      const double norm_mu = std::pow(4.0 * M_PI * var_mu, -0.5 * N);
      const double norm_g = std::pow(4.0 * M_PI * (t - s), -0.5 * N);

      AxisGrid ax[2];
      for (int d = 0; d < N; ++d)
        ax[d] = axis_grid(
            axis_breaks(mu.x[d], hlo[d], hhi[d], sigma_g, sigma_mu,
                        mu.x[d] - rwin, mu.x[d] + rwin, hull_cap),
            gl, false);

      if (N == 1) {
        const Vec& y = ax[0].nodes;
        const long K = y.size();
        acc.nodes += K;
        Mat Vs = Mat::Zero(K, nsl);
        for (long k = 0; k < natoms; ++k) {
          const double a = mu.total.atoms(0, k);
          if (a < mu.x[0] - rwin - 8.0 * sigma_mu ||
              a > mu.x[0] + rwin + 8.0 * sigma_mu)
            continue;
          Vs.col(row[k]).array() +=
              mu.total.weights[k] *
              (-(y.array() - a).square() / (4.0 * var_mu)).exp();
        }
        Vs *= norm_mu;
        for (int r = 1; r < nsl; ++r) Vs.col(r) += Vs.col(r - 1);
        const Vec vtot = Vs.col(nsl - 1);
        const Vec gv =
            norm_g *
            (-(y.array() - mu.x[0]).square() / (4.0 * (t - s))).exp();
        acc.value +=
            ws * (ax[0].weights.array() * gv.array() * vtot.array().pow(q))
                     .sum();
        for (long i = 0; i < K; ++i) {
          const double d2 = (y[i] - mu.x[0]) * (y[i] - mu.x[0]);
          const double rho2 = d2 + (t - s);
          const double base = ws * ax[0].weights[i] * gv[i];
          for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
            const int p = partition_cell(rho2, t, alphas[ai]);
            const int idx = near_index(mu.slice_ids, p + 2);
            const double nearv = idx >= 0 ? Vs(i, idx) : 0.0;
            const double farv = std::max(vtot[i] - nearv, 0.0);
            acc.j1[ai] += base * std::pow(nearv, q);
            acc.j2[ai] += base * std::pow(farv, q);
          }
        }
      } else if (N == 2) {
        const Vec& yx = ax[0].nodes;
        const Vec& yy = ax[1].nodes;
        const long Kx = yx.size(), Ky = yy.size();
        acc.nodes += Kx * Ky;
        std::vector<Mat> Vs(nsl, Mat::Zero(Kx, Ky));
        Vec gx(Kx), gy(Ky);
        for (long k = 0; k < natoms; ++k) {
          const double a0 = mu.total.atoms(0, k), a1 = mu.total.atoms(1, k);
          gx = (-(yx.array() - a0).square() / (4.0 * var_mu)).exp();
          gy = (-(yy.array() - a1).square() / (4.0 * var_mu)).exp();
          Vs[row[k]].noalias() += mu.total.weights[k] * gx * gy.transpose();
        }
        for (int r = 0; r < nsl; ++r) Vs[r] *= norm_mu;
        for (int r = 1; r < nsl; ++r) Vs[r] += Vs[r - 1];
        const Mat& vtot = Vs[nsl - 1];
        const Vec ggx =
            (-(yx.array() - mu.x[0]).square() / (4.0 * (t - s))).exp();
        const Vec ggy =
            (-(yy.array() - mu.x[1]).square() / (4.0 * (t - s))).exp();
        const Vec wgx = ax[0].weights.array() * ggx.array();
        const Vec wgy = ax[1].weights.array() * ggy.array();
        acc.value += ws * norm_g *
                     wgx.dot(vtot.array().pow(q).matrix() * wgy);
        for (long i = 0; i < Kx; ++i) {
          const double dx2 = (yx[i] - mu.x[0]) * (yx[i] - mu.x[0]);
          for (long j = 0; j < Ky; ++j) {
            const double rho2 =
                dx2 + (yy[j] - mu.x[1]) * (yy[j] - mu.x[1]) + (t - s);
            const double base = ws * norm_g * wgx[i] * wgy[j];
            for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
              const int p = partition_cell(rho2, t, alphas[ai]);
              const int idx = near_index(mu.slice_ids, p + 2);
              const double nearv = idx >= 0 ? Vs[idx](i, j) : 0.0;
              const double farv = std::max(vtot(i, j) - nearv, 0.0);
              acc.j1[ai] += base * std::pow(nearv, q);
              acc.j2[ai] += base * std::pow(farv, q);
            }
          }
        }
      } else {
        throw UnsupportedError(
            "nonlinear term: quadrature implemented for dimensions 1 and 2");
      }
    }
  }
  return acc;
}

}  // namespace

DuhamelResult nonlinear_term(const SlicedMeasure& mu, const Params& prm,
                             DuhamelControls controls) {
  if (!(mu.t > 0.0))
    throw InvalidParameterError("nonlinear term: measure has no time scale");
  std::vector<double> alphas = {controls.alpha};
  for (double a : controls.extra_alphas) alphas.push_back(a);
  for (double a : alphas)
    if (!(a > 0.0) || !(a < 1.0))
      throw InvalidParameterError("nonlinear term: alpha must lie in (0, 1)");

  DuhamelResult res;
  res.eps0 = controls.eps0_rel * mu.t;
  if (mu.total.size() == 0) {
    for (double a : alphas) res.splits.push_back({a, 0.0, 0.0});
    return res;
  }

  const SweepAccum base = duhamel_sweep(mu, prm, controls, alphas, false);
  const SweepAccum fine = duhamel_sweep(mu, prm, controls, alphas, true);
  res.value = fine.value;
  res.nodes = fine.nodes;
  res.refine_delta = std::abs(fine.value - base.value) /
                     std::max(std::abs(fine.value), 1e-300);
  for (std::size_t ai = 0; ai < alphas.size(); ++ai)
    res.splits.push_back({alphas[ai], fine.j1[ai], fine.j2[ai]});
  res.j1 = res.splits[0].j1;
  res.j2 = res.splits[0].j2;
  if (res.refine_delta > controls.delta_tol)
    throw NonConvergedError(
        "nonlinear term: refinement delta above tolerance",
        std::min(base.value, fine.value), std::max(base.value, fine.value));
  return res;
}

LowerSolutionResult lower_solution(const SlicedMeasure& mu, const Params& prm,
                                   DuhamelControls controls) {
  LowerSolutionResult out;
  out.duhamel = nonlinear_term(mu, prm, controls);
  out.heat = heat_of_measure(mu.total, mu.x, mu.t + out.duhamel.eps0);
  out.nl = out.duhamel.value;
  out.value = out.heat - out.nl;
  return out;
}

EpsDoublingResult eps_doubling_search(const SlicedMeasure& mu,
                                      const Params& prm,
                                      DuhamelControls controls,
                                      int max_halvings) {
  EpsDoublingResult out;
  out.duhamel = nonlinear_term(mu, prm, controls);
  out.nl_mu = out.duhamel.value;
  out.heat_mu =
      heat_of_measure(mu.total, mu.x, mu.t + controls.eps0_rel * mu.t);
  for (int k = 0; k <= max_halvings; ++k) {
    const double eps = std::ldexp(1.0, -k);
    // NL(eps mu) = eps^q NL(mu); require eps H - eps^q NL >= eps H / 2.
    if (std::pow(eps, prm.q - 1.0) * out.nl_mu <= 0.5 * out.heat_mu) {
      out.eps = eps;
      out.halvings = k;
      out.lower_at_eps =
          eps * out.heat_mu - std::pow(eps, prm.q) * out.nl_mu;
      return out;
    }
  }
  throw NonConvergedError("multiplier search: no admissible scaling found",
                          0.0, out.heat_mu);
}

}  // namespace capwiener
