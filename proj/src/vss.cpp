#include "capwiener/vss.hpp"

#include <cmath>

namespace capwiener {

namespace {

struct State {
  double f, g;  // f and f'
};

State rhs(double r, const State& y, int N, double q) {
  // f'' = -((N-1)/r + r/2) f' - f/(q-1) + f^q, with sign(f)|f|^q to keep the
  // flow defined across a zero crossing.
  const double fq = std::copysign(std::pow(std::abs(y.f), q), y.f);
  return {y.g,
          -((N - 1) / r + 0.5 * r) * y.g - y.f / (q - 1.0) + fq};
}

// Cash-Karp embedded pair.
constexpr double kA[6] = {0.0, 0.2, 0.3, 0.6, 1.0, 0.875};
constexpr double kB[6][5] = {
    {},
    {0.2},
    {3.0 / 40, 9.0 / 40},
    {0.3, -0.9, 1.2},
    {-11.0 / 54, 2.5, -70.0 / 27, 35.0 / 27},
    {1631.0 / 55296, 175.0 / 512, 575.0 / 13824, 44275.0 / 110592,
     253.0 / 4096}};
constexpr double kC5[6] = {37.0 / 378,  0.0, 250.0 / 621,
                           125.0 / 594, 0.0, 512.0 / 1771};
constexpr double kC4[6] = {2825.0 / 27648,  0.0,           18575.0 / 48384,
                           13525.0 / 55296, 277.0 / 14336, 0.25};

enum class Shot { crossed, positive };

struct ShotResult {
  Shot kind = Shot::positive;
  double r_event = 0.0;
};

State series_start(double a, double r0, int N, double q) {
  const double f2 = (std::pow(a, q) - a / (q - 1.0)) / N;  // f''(0)
  return {a + 0.5 * r0 * r0 * f2, r0 * f2};
}

ShotResult shoot(double a, const Params& prm, const VssControls& c,
                 double blow_cap) {
  const int N = prm.dimension;
  const double q = prm.q;
  double r = c.r0;
  State y = series_start(a, r, N, q);
  double h = 1e-3;
  long steps = 0;
  while (r < c.r_max) {
    if (steps++ > 2000000)
      throw NonConvergedError("profile shot: step budget exhausted", 0.0, r);
    h = std::min(h, c.r_max - r);
    State k[6];
    k[0] = rhs(r, y, N, q);
    bool ok = true;
    State y5{}, y4{};
    for (int i = 1; i < 6; ++i) {
      State yi = y;
      for (int j = 0; j < i; ++j) {
        yi.f += h * kB[i][j] * k[j].f;
        yi.g += h * kB[i][j] * k[j].g;
      }
      k[i] = rhs(r + kA[i] * h, yi, N, q);
    }
    y5 = y;
    y4 = y;
    for (int i = 0; i < 6; ++i) {
      y5.f += h * kC5[i] * k[i].f;
      y5.g += h * kC5[i] * k[i].g;
      y4.f += h * kC4[i] * k[i].f;
      y4.g += h * kC4[i] * k[i].g;
    }
    const double sc_f = c.atol + c.rtol * std::max(std::abs(y.f), std::abs(y5.f));
    const double sc_g = c.atol + c.rtol * std::max(std::abs(y.g), std::abs(y5.g));
    const double err = std::max(std::abs(y5.f - y4.f) / sc_f,
                                std::abs(y5.g - y4.g) / sc_g);
    if (err > 1.0) ok = false;
    if (ok) {
      r += h;
      y = y5;
      if (y.f < 0.0) return {Shot::crossed, r};
      if (y.f > blow_cap) return {Shot::positive, r};
    }
    const double fac =
        std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
    h = std::max(h * fac, 1e-12);
  }
  return {Shot::positive, c.r_max};
}

}  // namespace

VssProfile vss_profile(const Params& prm, VssControls c) {
  VssProfile out;
  out.flat_value = std::pow(prm.q - 1.0, -1.0 / (prm.q - 1.0));
  const double blow_cap =
      c.blow_cap > 0.0 ? c.blow_cap : 50.0 * std::max(out.flat_value, 1.0);

  double lo = 0.1;
  double hi = 10.0 * out.flat_value;
  bool lo_crossed = shoot(lo, prm, c, blow_cap).kind == Shot::crossed;
  for (int wdn = 0; wdn < c.max_widenings && !lo_crossed; ++wdn) {
    lo /= 10.0;
    lo_crossed = shoot(lo, prm, c, blow_cap).kind == Shot::crossed;
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  if (!lo_crossed) {
    // No crossing side: every small shot stays positive, the bracket
    // collapses onto 0 and no positive profile exists in this regime.
    out.exists = false;
    return out;
  }
  bool hi_positive = shoot(hi, prm, c, blow_cap).kind == Shot::positive;
  for (int wdn = 0; wdn < c.max_widenings && !hi_positive; ++wdn) {
    hi *= 10.0;
    hi_positive = shoot(hi, prm, c, blow_cap).kind == Shot::positive;
  }
  if (!hi_positive)
    throw NonConvergedError("profile: no positive side of the bracket", lo,
                            hi);

  int bis = 0;
  while (bis < c.max_bisections && (hi - lo) > c.a_rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (shoot(mid, prm, c, blow_cap).kind == Shot::crossed)
      lo = mid;
    else
      hi = mid;
    ++bis;
  }
  out.bisections = bis;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.exists = true;
  out.f0 = hi;  // positive side of the separatrix

  // Dense profile by fixed-step RK4 at the selected shot.
  const int N = prm.dimension;
  const double q = prm.q;
  const double dr = c.dense_dr;
  const long M = std::lround(std::ceil(c.r_max / dr));
  out.r.resize(M + 1);
  out.f.resize(M + 1);
  out.r[0] = 0.0;
  out.f[0] = out.f0;
  double r = c.r0;
  State y = series_start(out.f0, r, N, q);
  long idx = 1;
  const auto rk4 = [&](double rr, const State& yy, double hh) {
    const State k1 = rhs(rr, yy, N, q);
    const State k2 = rhs(rr + 0.5 * hh,
                         {yy.f + 0.5 * hh * k1.f, yy.g + 0.5 * hh * k1.g}, N, q);
    const State k3 = rhs(rr + 0.5 * hh,
                         {yy.f + 0.5 * hh * k2.f, yy.g + 0.5 * hh * k2.g}, N, q);
    const State k4 =
        rhs(rr + hh, {yy.f + hh * k3.f, yy.g + hh * k3.g}, N, q);
    return State{yy.f + hh / 6.0 * (k1.f + 2 * k2.f + 2 * k3.f + k4.f),
                 yy.g + hh / 6.0 * (k1.g + 2 * k2.g + 2 * k3.g + k4.g)};
  };
  // Substeps keep the fixed grid while bounding the local error.
  const int sub = 4;
  for (; idx <= M; ++idx) {
    const double target = idx * dr;
    while (r < target - 1e-14) {
      const double hh = std::min((target - r) / 1.0, dr) / sub;
      for (int ss = 0; ss < sub; ++ss) y = rk4(r + ss * hh, y, hh);
      r += sub * hh;
    }
    out.r[idx] = target;
    out.f[idx] = std::max(y.f, 0.0);
  }

  // Finite-difference residual of the profile equation on [0.05, 10].
  const long i1 = std::max<long>(1, std::lround(0.05 / dr));
  const long i2 = std::min<long>(M - 1, std::lround(10.0 / dr));
  double res = 0.0;
  for (long i = i1; i <= i2; ++i) {
    const double rr = out.r[i];
    const double fd2 = (out.f[i + 1] - 2 * out.f[i] + out.f[i - 1]) / (dr * dr);
    const double fd1 = (out.f[i + 1] - out.f[i - 1]) / (2 * dr);
    res = std::max(res,
                   std::abs(fd2 + ((N - 1) / rr + 0.5 * rr) * fd1 +
                            out.f[i] / (q - 1.0) - std::pow(out.f[i], q)));
  }
  out.residual_sup = res;

  double decay = 0.0;
  for (long i = 0; i <= M; ++i)
    if (out.r[i] >= 0.5 * c.r_max)
      decay = std::max(decay,
                       std::pow(out.r[i], 2.0 / (q - 1.0)) * out.f[i]);
  out.decay_sup = decay;
  return out;
}

double vss_value(const VssProfile& profile, double dist, double t,
                 const Params& prm) {
  if (!(t > 0.0)) throw InvalidParameterError("profile value: t must be > 0");
  if (!profile.exists || profile.r.size() < 2) return 0.0;
  const double rr = dist / std::sqrt(t);
  const double dr = profile.r[1] - profile.r[0];
  if (rr >= profile.r[profile.r.size() - 1]) return 0.0;
  const long i = std::clamp<long>(static_cast<long>(rr / dr), 0,
                                  profile.r.size() - 2);
  const double w = (rr - profile.r[i]) / dr;
  const double fval = (1 - w) * profile.f[i] + w * profile.f[i + 1];
  return std::pow(t, -1.0 / (prm.q - 1.0)) * fval;
}

}  // namespace capwiener
