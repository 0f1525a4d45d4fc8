#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "capwiener/fixtures.hpp"
#include "capwiener/serialize.hpp"
#include "capwiener/verify.hpp"

namespace cw = capwiener;
using cw::Json;
using cw::Vec;

namespace {

// Configuration problems exit with code 3 and a field diagnostic.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const Json& need(const Json& j, const char* field) {
  if (!j.is_object() || !j.contains(field))
    throw ConfigError(std::string("missing field '") + field + "'");
  return j.at(field);
}

double need_num(const Json& j, const char* field) {
  const Json& v = need(j, field);
  if (!v.is_number())
    throw ConfigError(std::string("field '") + field + "' must be a number");
  return v.get<double>();
}

template <typename T>
T opt(const Json& j, const char* field, T fallback) {
  if (!j.is_object() || !j.contains(field)) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("field '") + field + "' has the wrong type");
  }
}

std::vector<double> num_list(const Json& j, const char* field,
                             std::vector<double> fallback) {
  if (!j.is_object() || !j.contains(field)) return fallback;
  const Json& v = j.at(field);
  if (!v.is_array())
    throw ConfigError(std::string("field '") + field + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(e.get<double>());
  return out;
}

cw::CompactSet parse_fixture(const Json& cfg, int dim) {
  const Json& f = need(cfg, "fixture");
  cw::CompactSet F = cw::CompactSet::empty(dim);
  if (f.is_string()) {
    F = cw::fixture(f.get<std::string>());
  } else if (f.is_object()) {
    F = cw::set_from_json(f);
  } else {
    throw ConfigError("field 'fixture' must be a catalog name or a set object");
  }
  if (F.dim() != dim)
    throw ConfigError("field 'fixture' dimension disagrees with params");
  return F;
}

Vec parse_point(const Json& cfg, const char* field, int dim) {
  if (!cfg.contains(field)) return Vec::Zero(dim);
  Vec x = cw::vec_from_json(cfg.at(field));
  if (x.size() != dim)
    throw ConfigError(std::string("field '") + field +
                      "' must have one coordinate per dimension");
  return x;
}

cw::SpaceTimeGrid parse_grid(const Json& cfg, const cw::Params& prm) {
  cw::SpaceTimeGrid g;
  g.dimension = prm.dimension;
  g.radial = prm.dimension >= 2;
  if (!cfg.contains("grid")) return g;
  const Json& j = cfg.at("grid");
  g.L = opt(j, "L", g.L);
  g.h = opt(j, "h", g.h);
  g.T = opt(j, "T", g.T);
  g.dt = opt(j, "dt", g.dt);
  g.radial = opt(j, "radial", g.radial);
  g.store_every = opt(j, "store_every", g.store_every);
  return g;
}

cw::CapacityControls parse_cap(const Json& j) {
  cw::CapacityControls c;
  c.h = opt(j, "h", c.h);
  c.margin = opt(j, "margin", c.margin);
  c.constraint_h = opt(j, "constraint_h", c.constraint_h);
  c.gap_tol = opt(j, "gap_tol", c.gap_tol);
  c.max_iters = opt(j, "max_iters", c.max_iters);
  return c;
}

cw::PotentialControls parse_pot(const Json& cfg, unsigned jobs) {
  cw::PotentialControls c;
  c.jobs = jobs;
  if (!cfg.contains("potential")) return c;
  const Json& j = cfg.at("potential");
  c.h = opt(j, "h", c.h);
  c.weight_cutoff = opt(j, "weight_cutoff", c.weight_cutoff);
  c.skip_below = opt(j, "skip_below", c.skip_below);
  c.cap_upper = opt(j, "cap_upper", c.cap_upper);
  if (j.contains("cap")) c.cap = parse_cap(j.at("cap"));
  return c;
}

cw::DuhamelControls parse_duhamel(const Json& cfg) {
  cw::DuhamelControls c;
  if (!cfg.contains("duhamel")) return c;
  const Json& j = cfg.at("duhamel");
  c.eps0_rel = opt(j, "eps0_rel", c.eps0_rel);
  c.alpha = opt(j, "alpha", c.alpha);
  c.gl = opt(j, "gl", c.gl);
  c.delta_tol = opt(j, "delta_tol", c.delta_tol);
  c.trunc = opt(j, "trunc", c.trunc);
  return c;
}

cw::PdeOptions parse_pde(const Json& cfg) {
  cw::PdeOptions o;
  if (!cfg.contains("pde")) return o;
  const Json& j = cfg.at("pde");
  o.absorption = opt(j, "absorption", o.absorption);
  const std::string s = opt<std::string>(j, "scheme", "implicit");
  if (s == "implicit")
    o.scheme = cw::AbsorptionScheme::implicit_newton;
  else if (s == "explicit")
    o.scheme = cw::AbsorptionScheme::explicit_euler;
  else if (s == "exact")
    o.scheme = cw::AbsorptionScheme::exact_flow;
  else
    throw ConfigError("field 'scheme' must be implicit, explicit, or exact");
  return o;
}

Json budget_json(double cap_gap, double quad_delta, double scheme_err) {
  Json b;
  b["capacity_gap_rel"] = cap_gap;
  b["quadrature_delta_rel"] = quad_delta;
  b["scheme_error_rel"] = scheme_err;
  return b;
}

void write_report(const std::filesystem::path& dir, const Json& report) {
  std::filesystem::create_directories(dir);
  cw::write_text((dir / "report.json").string(), report.dump(2) + "\n");
}

void write_csv(const std::filesystem::path& dir, const std::string& name,
               const std::vector<std::string>& header,
               const std::vector<Vec>& cols) {
  std::filesystem::create_directories(dir);
  cw::write_text((dir / name).string(), cw::csv_table(header, cols));
}

// ---------------------------------------------------------------------------
// Experiment handlers. Each fills `report` and returns the pass verdict.

bool run_capacity(const Json& cfg, const cw::Params& prm,
                  const std::filesystem::path& dir, unsigned, Json& report) {
  cw::CompactSet F = parse_fixture(cfg, prm.dimension);
  cw::CapacityControls controls =
      cfg.contains("controls") ? parse_cap(cfg.at("controls"))
                               : cw::CapacityControls{};
  auto kernel = cw::shared_kernel(prm.dimension, prm.cap_order);
  cw::CapacityResult res;
  if (cfg.contains("ball")) {
    const Json& b = cfg.at("ball");
    res = cw::relative_capacity(F, cw::vec_from_json(need(b, "center")),
                                need_num(b, "radius"), prm, *kernel, controls);
  } else {
    res = cw::bessel_capacity(F, prm, *kernel, controls);
  }
  Json sum;
  sum["value"] = res.value;
  sum["dual_bound"] = res.dual_bound;
  sum["gap"] = res.gap;
  sum["iterations"] = res.iterations;
  sum["converged"] = res.converged;
  sum["constraint_count"] = res.constraint_count;
  sum["grid_nodes"] = res.grid.size();
  sum["measure_mass"] = res.measure.mass();
  report["summary"] = sum;
  report["samples"] = Json::array();
  report["budget"] = budget_json(
      res.value > 0.0 ? res.gap / res.value : 0.0, 0.0, 0.0);
  std::vector<Vec> cols;
  std::vector<std::string> header;
  for (int d = 0; d < prm.dimension; ++d) {
    header.push_back("x" + std::to_string(d));
    cols.push_back(res.measure.atoms.row(d).transpose());
  }
  header.push_back("weight");
  cols.push_back(res.measure.weights);
  write_csv(dir, "measure.csv", header, cols);
  return true;
}

bool run_potential(const Json& cfg, const cw::Params& prm,
                   const std::filesystem::path& dir, unsigned jobs,
                   Json& report) {
  cw::CompactSet F = parse_fixture(cfg, prm.dimension);
  const double t = need_num(cfg, "t");
  Vec x = parse_point(cfg, "x", prm.dimension);
  cw::PotentialControls controls = parse_pot(cfg, jobs);
  auto kernel = cw::shared_kernel(prm.dimension, prm.cap_order);
  cw::PotentialTerms series = cw::w_potential(F, x, t, prm, *kernel, controls);

  Json samples = Json::array();
  double worst_gap = 0.0;
  std::vector<double> ns, ws, caps, contribs;
  for (const auto& term : series.terms) {
    Json s;
    s["n"] = term.n;
    s["weight"] = term.weight;
    s["empty"] = term.empty;
    s["skipped"] = term.skipped;
    s["capacity"] = term.capacity;
    s["gap"] = term.gap;
    samples.push_back(s);
    if (!term.empty && !term.skipped && term.capacity > 0.0)
      worst_gap = std::max(worst_gap, term.gap / term.capacity);
    ns.push_back(term.n);
    ws.push_back(term.weight);
    caps.push_back(term.capacity);
    contribs.push_back(series.prefactor * term.weight * term.capacity);
  }
  Json sum;
  sum["total"] = series.total;
  sum["prefactor"] = series.prefactor;
  sum["below_threshold"] = series.below_threshold;
  sum["n_bound"] = series.n_bound;
  sum["solves"] = series.solves;
  report["summary"] = sum;
  report["samples"] = samples;
  report["budget"] = budget_json(worst_gap, 0.0, 0.0);
  auto to_vec = [](const std::vector<double>& v) {
    return Eigen::Map<const Vec>(v.data(), Eigen::Index(v.size())).eval();
  };
  write_csv(dir, "terms.csv", {"n", "weight", "capacity", "contribution"},
            {to_vec(ns), to_vec(ws), to_vec(caps), to_vec(contribs)});
  return true;
}

bool run_solve(const Json& cfg, const cw::Params& prm,
               const std::filesystem::path& dir, unsigned, Json& report) {
  cw::SpaceTimeGrid grid = parse_grid(cfg, prm);
  cw::PdeOptions pde = parse_pde(cfg);
  const Json& init = need(cfg, "initial");
  const std::string kind = opt<std::string>(init, "kind", "");

  cw::Field field;
  Json sum;
  if (kind == "maximal") {
    cw::CompactSet F = parse_fixture(init, prm.dimension);
    cw::MaximalControls mc;
    mc.k0 = opt(init, "k0", mc.k0);
    mc.sat_tol = opt(init, "sat_tol", mc.sat_tol);
    cw::MaximalResult res = cw::maximal_solution(F, prm, grid, mc, pde);
    field = std::move(res.field);
    sum["k_final"] = res.k_final;
    sum["doublings"] = res.doublings;
    sum["last_change"] = res.last_change;
  } else if (kind == "measure") {
    cw::DiscreteMeasure mu = cw::measure_from_json(need(init, "measure"));
    cw::MeasureRunControls mc;
    mc.eps0 = need_num(init, "eps0");
    mc.sensitivity = opt(init, "sensitivity", mc.sensitivity);
    cw::MeasureRunResult res =
        cw::solve_with_measure(mu, prm, grid, mc, pde);
    field = std::move(res.field);
    sum["eps0"] = res.eps0;
    sum["sens_delta"] = res.sens_delta;
  } else if (kind == "flat" || kind == "indicator") {
    const long M = std::lround(grid.L / grid.h);
    const long nodes = grid.radial ? M + 1 : 2 * M + 1;
    Vec u0 = Vec::Zero(nodes);
    if (kind == "flat") {
      const double v = need_num(init, "value");
      u0.setConstant(v);
    } else {
      cw::CompactSet F = parse_fixture(init, prm.dimension);
      const double k = need_num(init, "k");
      for (long i = 0; i < nodes; ++i) {
        Vec y = Vec::Zero(prm.dimension);
        y[0] = grid.radial ? grid.h * double(i) : -grid.L + grid.h * double(i);
        if (F.distance(y) <= grid.h + 1e-12) u0[i] = k;
      }
    }
    u0[nodes - 1] = 0.0;
    if (!grid.radial) u0[0] = 0.0;
    field = cw::solve_semilinear(u0, prm, grid, pde);
  } else {
    throw ConfigError(
        "field 'initial.kind' must be maximal, measure, flat, or indicator");
  }

  const long center =
      grid.radial ? 0 : (field.xs.size() - 1) / 2;
  const long last = field.times.size() - 1;
  sum["final_time"] = field.times[last];
  sum["center_final"] = field.u(last, center);
  double bt1 = std::max({grid.t_min(), field.times[1], 0.1 * grid.T});
  double bt2 = field.times[last];
  if (cfg.contains("balance")) {
    const Json& b = cfg.at("balance");
    bt1 = opt(b, "t1", bt1);
    bt2 = opt(b, "t2", bt2);
  }
  sum["mass_balance_residual"] = cw::mass_balance_residual(field, bt1, bt2);
  sum["balance_window"] = Json::array({field.times[field.row_at(bt1)],
                                       field.times[field.row_at(bt2)]});
  report["summary"] = sum;
  report["samples"] = Json::array();
  report["budget"] = budget_json(0.0, 0.0, grid.h * grid.h);
  write_csv(dir, "final_profile.csv", {"x", "u"},
            {field.xs, field.u.row(last).transpose()});
  write_csv(dir, "center_history.csv", {"t", "u"},
            {field.times, field.u.col(center)});
  return true;
}

bool run_vss(const Json& cfg, const cw::Params& prm,
             const std::filesystem::path& dir, unsigned, Json& report) {
  cw::VssControls controls;
  if (cfg.contains("controls")) {
    const Json& j = cfg.at("controls");
    controls.r_max = opt(j, "r_max", controls.r_max);
    controls.rtol = opt(j, "rtol", controls.rtol);
    controls.dense_dr = opt(j, "dense_dr", controls.dense_dr);
    controls.a_rel_tol = opt(j, "a_rel_tol", controls.a_rel_tol);
  }
  cw::VssProfile p = cw::vss_profile(prm, controls);
  Json sum;
  sum["exists"] = p.exists;
  sum["f0"] = p.f0;
  sum["flat_value"] = p.flat_value;
  sum["residual_sup"] = p.residual_sup;
  sum["decay_sup"] = p.decay_sup;
  sum["bisections"] = p.bisections;
  sum["bracket_lo"] = p.bracket_lo;
  sum["bracket_hi"] = p.bracket_hi;
  report["summary"] = sum;
  report["samples"] = Json::array();
  report["budget"] = budget_json(0.0, p.residual_sup, 0.0);
  if (p.r.size() > 0)
    write_csv(dir, "profile.csv", {"r", "f"}, {p.r, p.f});
  if (cfg.contains("expect")) {
    const Json& e = cfg.at("expect");
    if (e.contains("exists") && e.at("exists").get<bool>() != p.exists)
      return false;
  }
  return true;
}

bool run_lowerbound(const Json& cfg, const cw::Params& prm,
                    const std::filesystem::path&, unsigned jobs,
                    Json& report) {
  cw::CompactSet F = parse_fixture(cfg, prm.dimension);
  const double t = need_num(cfg, "t");
  Vec x = parse_point(cfg, "x", prm.dimension);
  cw::LowerBoundControls controls;
  controls.pot = parse_pot(cfg, jobs);
  controls.duhamel = parse_duhamel(cfg);
  controls.grid = parse_grid(cfg, prm);
  if (!cfg.contains("grid")) controls.grid.L = 0.0;  // auto-size
  cw::LowerBoundReport rep =
      cw::lower_bound_experiment(F, x, t, prm, controls);
  Json sum;
  sum["w_total"] = rep.w_total;
  sum["est4_lhs"] = rep.est4_lhs;
  sum["est4_rhs"] = rep.est4_rhs;
  sum["est4_ok"] = rep.est4_ok;
  sum["heat"] = rep.heat;
  sum["nl"] = rep.nl;
  sum["eps_star"] = rep.eps_star;
  sum["halvings"] = rep.halvings;
  sum["lower_at_eps"] = rep.lower_at_eps;
  sum["u_pde"] = rep.u_pde;
  sum["c_value"] =
      rep.w_total > 0.0 ? rep.lower_at_eps / rep.w_total : 0.0;
  sum["chain_ok"] = rep.chain_ok;
  sum["vacuous"] = F.is_empty();
  report["summary"] = sum;
  report["samples"] = Json::array();
  report["budget"] =
      budget_json(rep.max_cap_gap_rel, rep.refine_delta, rep.sens_delta);
  return F.is_empty() || (rep.est4_ok && rep.chain_ok);
}

bool run_bilateral(const Json& cfg, const cw::Params& prm,
                   const std::filesystem::path& dir, unsigned jobs,
                   Json& report) {
  cw::CompactSet F = parse_fixture(cfg, prm.dimension);
  cw::BilateralControls controls;
  controls.pot = parse_pot(cfg, jobs);
  controls.grid = parse_grid(cfg, prm);
  if (!cfg.contains("grid")) controls.grid.L = 0.0;
  if (cfg.contains("controls")) {
    const Json& j = cfg.at("controls");
    controls.T = opt(j, "T", controls.T);
    controls.t_count = opt(j, "t_count", controls.t_count);
    controls.x_count = opt(j, "x_count", controls.x_count);
    controls.denom_floor = opt(j, "denom_floor", controls.denom_floor);
  }
  const std::string name = cfg.at("fixture").is_string()
                               ? cfg.at("fixture").get<std::string>()
                               : "custom";
  cw::RatioReport rep = cw::bilateral_ratio(F, name, prm, controls);
  Json samples = Json::array();
  std::vector<double> ts, ds, us, wsv, rs;
  for (const auto& s : rep.samples) {
    Json e;
    e["t"] = s.t;
    e["dist"] = s.dist;
    e["u"] = s.u;
    e["w"] = s.w;
    e["ratio"] = s.ratio;
    e["included"] = s.included;
    samples.push_back(e);
    ts.push_back(s.t);
    ds.push_back(s.dist);
    us.push_back(s.u);
    wsv.push_back(s.w);
    rs.push_back(s.ratio);
  }
  Json sum;
  sum["min_ratio"] = rep.min_ratio;
  sum["max_ratio"] = rep.max_ratio;
  sum["median_ratio"] = rep.median_ratio;
  sum["envelope"] = rep.included ? rep.envelope() : 0.0;
  sum["included"] = rep.included;
  sum["excluded"] = rep.excluded;
  sum["k_final"] = rep.k_final;
  sum["vacuous"] = rep.samples.empty() || rep.included == 0;
  report["summary"] = sum;
  report["samples"] = samples;
  report["budget"] = budget_json(rep.max_cap_gap_rel, 0.0, rep.scheme_change);
  auto to_vec = [](const std::vector<double>& v) {
    return Eigen::Map<const Vec>(v.data(), Eigen::Index(v.size())).eval();
  };
  if (!ts.empty())
    write_csv(dir, "samples.csv", {"t", "dist", "u", "w", "ratio"},
              {to_vec(ts), to_vec(ds), to_vec(us), to_vec(wsv), to_vec(rs)});
  return true;
}

bool run_uplem(const Json& cfg, const cw::Params& prm,
               const std::filesystem::path& dir, unsigned, Json& report) {
  cw::CompactSet F = parse_fixture(cfg, prm.dimension);
  const double r = need_num(cfg, "r");
  const double rho = need_num(cfg, "rho");
  std::vector<double> times = num_list(cfg, "times", {});
  std::vector<double> xs = num_list(cfg, "xs", {});
  if (times.empty() || xs.empty())
    throw ConfigError("fields 'times' and 'xs' must be non-empty arrays");
  cw::UplemControls controls;
  controls.grid = parse_grid(cfg, prm);
  if (!cfg.contains("grid")) controls.grid.L = 0.0;
  if (cfg.contains("controls") && cfg.at("controls").contains("cap"))
    controls.cap = parse_cap(cfg.at("controls").at("cap"));
  cw::UplemReport rep =
      cw::uplem_experiment(F, prm, r, rho, times, xs, controls);
  Json samples = Json::array();
  std::vector<double> ts, xv, us, bs, rs;
  for (const auto& s : rep.samples) {
    Json e;
    e["t"] = s.t;
    e["x"] = s.x;
    e["u"] = s.u;
    e["bound"] = s.bound;
    e["ratio"] = s.ratio;
    e["included"] = s.included;
    samples.push_back(e);
    ts.push_back(s.t);
    xv.push_back(s.x);
    us.push_back(s.u);
    bs.push_back(s.bound);
    rs.push_back(s.ratio);
  }
  Json sum;
  sum["relative_cap"] = rep.relative_cap;
  sum["c_max"] = rep.c_max;
  sum["included"] = rep.included;
  sum["vacuous"] = F.is_empty();
  report["summary"] = sum;
  report["samples"] = samples;
  report["budget"] = budget_json(rep.cap_gap_rel, 0.0, rep.scheme_change);
  auto to_vec = [](const std::vector<double>& v) {
    return Eigen::Map<const Vec>(v.data(), Eigen::Index(v.size())).eval();
  };
  if (!ts.empty())
    write_csv(dir, "samples.csv", {"t", "x", "u", "bound", "ratio"},
              {to_vec(ts), to_vec(xv), to_vec(us), to_vec(bs), to_vec(rs)});
  return true;
}

bool run_est5(const Json& cfg, const cw::Params& prm,
              const std::filesystem::path&, unsigned jobs, Json& report) {
  cw::CompactSet F = parse_fixture(cfg, prm.dimension);
  const double t = need_num(cfg, "t");
  Vec x = parse_point(cfg, "x", prm.dimension);
  std::vector<double> scales = num_list(cfg, "scales", {0.25, 1.0, 4.0});
  std::vector<double> alphas = num_list(cfg, "alphas", {0.5, 0.3, 0.7});
  cw::Est5Controls controls;
  controls.pot = parse_pot(cfg, jobs);
  controls.duhamel = parse_duhamel(cfg);
  cw::Est5Report rep =
      cw::est5_experiment(F, x, t, prm, scales, alphas, controls);
  Json samples = Json::array();
  for (const auto& s : rep.scales) {
    Json e;
    e["k"] = s.k;
    e["j1"] = s.j1;
    e["j2"] = s.j2;
    e["total"] = s.total;
    e["s_value"] = s.s_value;
    e["ratio"] = s.ratio;
    samples.push_back(e);
  }
  Json splits = Json::array();
  for (const auto& s : rep.alpha_splits) {
    Json e;
    e["alpha"] = s.alpha;
    e["j1"] = s.j1;
    e["j2"] = s.j2;
    splits.push_back(e);
  }
  Json sum;
  sum["ratio_spread"] = rep.ratio_spread;
  sum["alpha_splits"] = splits;
  sum["vacuous"] = F.is_empty();
  report["summary"] = sum;
  report["samples"] = samples;
  report["budget"] =
      budget_json(rep.max_cap_gap_rel, rep.refine_delta, 0.0);
  return true;
}

bool run_equivalence(const Json& cfg, const cw::Params& prm,
                     const std::filesystem::path&, unsigned,
                     Json& report) {
  cw::CompactSet F = parse_fixture(cfg, prm.dimension);
  const double t = need_num(cfg, "t");
  Vec x = parse_point(cfg, "x", prm.dimension);
  std::vector<double> raw = num_list(cfg, "n_list", {1.0, 2.0, 3.0});
  std::vector<int> n_list;
  for (double v : raw) n_list.push_back(int(std::lround(v)));
  cw::EquivalenceControls controls;
  if (cfg.contains("controls") && cfg.at("controls").contains("cap"))
    controls.cap = parse_cap(cfg.at("controls").at("cap"));
  cw::EquivalenceReport rep =
      cw::equivalence_sweep(F, x, t, prm, n_list, controls);
  Json samples = Json::array();
  for (const auto& p : rep.pieces) {
    Json e;
    e["n"] = p.n;
    e["j"] = p.j;
    e["lhs"] = p.lhs;
    e["rhs"] = p.rhs;
    e["ratio"] = p.ratio;
    samples.push_back(e);
  }
  Json slices = Json::array();
  for (const auto& s : rep.slices) {
    Json e;
    e["n"] = s.n;
    e["pieces"] = s.pieces;
    e["whole"] = s.whole;
    e["sum_parts"] = s.sum_parts;
    e["ratio"] = s.ratio;
    slices.push_back(e);
  }
  Json sum;
  sum["min_ratio"] = rep.min_ratio;
  sum["max_ratio"] = rep.max_ratio;
  sum["slices"] = slices;
  sum["vacuous"] = rep.pieces.empty();
  report["summary"] = sum;
  report["samples"] = samples;
  report["budget"] = budget_json(rep.max_cap_gap_rel, 0.0, 0.0);
  return true;
}

int run_config(const std::string& config_path, std::string out_flag,
               unsigned jobs, std::uint64_t seed) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open config '" << config_path << "'\n";
    return 3;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  Json cfg;
  try {
    cfg = Json::parse(text);
  } catch (const Json::parse_error& e) {
    long line = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    std::cerr << "error: malformed config at line " << line << ": " << e.what()
              << "\n";
    return 3;
  }

  try {
    const std::string id = need(cfg, "experiment").get<std::string>();
    cw::Params prm = cw::params_from_json(need(cfg, "params"));

    std::string out_dir = opt<std::string>(cfg, "out", ".");
    if (!out_flag.empty()) out_dir = out_flag;
    if (const char* env = std::getenv("CAPWIENER_OUT"); env && *env)
      out_dir = env;
    const std::filesystem::path dir(out_dir);

    Json report;
    report["id"] = id;
    report["fixture"] = cfg.contains("fixture") && cfg.at("fixture").is_object()
                            ? cfg.at("fixture")
                            : Json(nullptr);
    if (cfg.contains("fixture") && cfg.at("fixture").is_string())
      report["fixture"] = cw::set_to_json(
          cw::fixture(cfg.at("fixture").get<std::string>()));
    report["params"] = cw::params_to_json(prm);
    report["seed"] = seed;
    report["config"] = cfg;

    bool pass = false;
    try {
      if (id == "capacity")
        pass = run_capacity(cfg, prm, dir, jobs, report);
      else if (id == "potential")
        pass = run_potential(cfg, prm, dir, jobs, report);
      else if (id == "solve")
        pass = run_solve(cfg, prm, dir, jobs, report);
      else if (id == "vss")
        pass = run_vss(cfg, prm, dir, jobs, report);
      else if (id == "lowerbound")
        pass = run_lowerbound(cfg, prm, dir, jobs, report);
      else if (id == "bilateral")
        pass = run_bilateral(cfg, prm, dir, jobs, report);
      else if (id == "uplem")
        pass = run_uplem(cfg, prm, dir, jobs, report);
      else if (id == "est5")
        pass = run_est5(cfg, prm, dir, jobs, report);
      else if (id == "equivalence")
        pass = run_equivalence(cfg, prm, dir, jobs, report);
      else
        throw ConfigError("unknown experiment id '" + id + "'");
    } catch (const cw::NonConvergedError& e) {
      Json err;
      err["kind"] = "non-convergence";
      err["what"] = e.what();
      err["lower"] = e.lower;
      err["upper"] = e.upper;
      report["error"] = err;
      report["pass"] = false;
      write_report(dir, report);
      std::cerr << "non-convergence: " << e.what() << "\n";
      return 2;
    }
    report["pass"] = pass;
    write_report(dir, report);
    if (!pass) std::cerr << "assertion failed for experiment '" << id << "'\n";
    return pass ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const cw::InvalidParameterError& e) {
    std::cerr << "error: invalid config value: " << e.what() << "\n";
    return 3;
  } catch (const cw::UnsupportedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed config: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacity, potential, and absorption-equation experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  unsigned jobs = 0;
  std::uint64_t seed = 0;
  CLI::App* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("--config", config_path, "JSON config path")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--jobs", jobs, "Parallelism degree (0 = cores)");
  run->add_option("--seed", seed, "Seed echoed into the report");

  CLI::App* lf =
      app.add_subcommand("list-fixtures", "Print the fixture catalog");

  CLI11_PARSE(app, argc, argv);

  if (lf->parsed()) {
    for (const auto& name : cw::fixture_names()) {
      cw::CompactSet F = cw::fixture(name);
      std::cout << name << "  dim=" << F.dim() << "  "
                << cw::set_to_json(F).dump() << "\n";
    }
    return 0;
  }
  return run_config(config_path, out_dir, jobs, seed);
}
