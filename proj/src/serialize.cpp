#include "capwiener/serialize.hpp"

#include <cstdio>
#include <fstream>

namespace capwiener {

namespace {

Json shell_to_json(const Shell& sh) {
  Json j;
  j["center"] = vec_to_json(sh.center);
  j["rmin"] = sh.rmin;
  j["rmax"] = sh.rmax;
  return j;
}

Json mat_to_json(const PointMat& m) {
  Json cols = Json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j) cols.push_back(vec_to_json(m.col(j)));
  return cols;
}

PointMat mat_from_json(const Json& j, int dim) {
  PointMat m(dim, Eigen::Index(j.size()));
  Eigen::Index c = 0;
  for (const auto& col : j) {
    Vec v = vec_from_json(col);
    if (v.size() != dim)
      throw InvalidParameterError("set_from_json: column dimension mismatch");
    m.col(c++) = v;
  }
  return m;
}

}  // namespace

Json vec_to_json(const Vec& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Vec vec_from_json(const Json& j) {
  if (!j.is_array())
    throw InvalidParameterError("vec_from_json: expected an array");
  Vec v(Eigen::Index(j.size()));
  Eigen::Index i = 0;
  for (const auto& e : j) v[i++] = e.get<double>();
  return v;
}

Json set_to_json(const CompactSet& F) {
  Json j;
  j["dimension"] = F.dim();
  if (F.is_empty()) {
    j["kind"] = "empty";
    return j;
  }
  switch (F.variant()) {
    case CompactSet::Variant::Intervals: {
      j["kind"] = "intervals";
      Json comps = Json::array();
      for (const auto& iv : F.components()) comps.push_back({iv[0], iv[1]});
      j["components"] = comps;
      break;
    }
    case CompactSet::Variant::Cantor: {
      j["kind"] = "cantor";
      const auto& g = F.cantor_gen();
      j["a"] = g.a;
      j["b"] = g.b;
      j["ratio"] = g.ratio;
      j["depth"] = g.depth;
      break;
    }
    case CompactSet::Variant::Balls: {
      j["kind"] = "balls";
      j["centers"] = mat_to_json(F.ball_centers());
      j["radii"] = vec_to_json(F.ball_radii());
      break;
    }
    case CompactSet::Variant::Points: {
      j["kind"] = "points";
      j["points"] = mat_to_json(F.point_list());
      break;
    }
  }
  if (!F.shells().empty()) {
    Json shells = Json::array();
    for (const auto& sh : F.shells()) shells.push_back(shell_to_json(sh));
    j["shells"] = shells;
  }
  return j;
}

CompactSet set_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw InvalidParameterError("set_from_json: missing field 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  const int dim = j.value("dimension", 1);
  CompactSet F = CompactSet::empty(dim);
  if (kind == "empty") {
    return F;
  } else if (kind == "intervals") {
    std::vector<std::array<double, 2>> ivs;
    for (const auto& c : j.at("components"))
      ivs.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
    F = CompactSet::intervals(std::move(ivs));
  } else if (kind == "cantor") {
    F = CompactSet::cantor(j.at("a").get<double>(), j.at("b").get<double>(),
                           j.at("ratio").get<double>(),
                           j.at("depth").get<int>());
  } else if (kind == "balls") {
    F = CompactSet::balls(mat_from_json(j.at("centers"), dim),
                          vec_from_json(j.at("radii")));
  } else if (kind == "points") {
    F = CompactSet::points(mat_from_json(j.at("points"), dim));
  } else {
    throw InvalidParameterError("set_from_json: unknown kind '" + kind + "'");
  }
  if (j.contains("shells"))
    for (const auto& sh : j.at("shells"))
      F = F.with_shell(vec_from_json(sh.at("center")),
                       sh.at("rmin").get<double>(),
                       sh.at("rmax").get<double>());
  if (F.dim() != dim)
    throw InvalidParameterError("set_from_json: dimension mismatch");
  return F;
}

Json params_to_json(const Params& p) {
  Json j;
  j["dimension"] = p.dimension;
  j["q"] = p.q;
  j["q_crit"] = p.q_crit;
  j["cap_order"] = p.cap_order;
  j["cap_power"] = p.cap_power;
  j["supercritical"] = p.supercritical;
  return j;
}

Params params_from_json(const Json& j) {
  if (!j.contains("dimension") || !j.contains("q"))
    throw InvalidParameterError("params_from_json: need 'dimension' and 'q'");
  return make_params(j.at("dimension").get<int>(), j.at("q").get<double>());
}

Json measure_to_json(const DiscreteMeasure& mu) {
  Json j;
  j["dimension"] = mu.dim();
  j["atoms"] = mat_to_json(mu.atoms);
  j["weights"] = vec_to_json(mu.weights);
  return j;
}

DiscreteMeasure measure_from_json(const Json& j) {
  DiscreteMeasure mu;
  const int dim = j.value("dimension", 1);
  mu.atoms = mat_from_json(j.at("atoms"), dim);
  mu.weights = vec_from_json(j.at("weights"));
  if (mu.atoms.cols() != mu.weights.size())
    throw InvalidParameterError("measure_from_json: one weight per atom");
  return mu;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw InvalidParameterError("write_text: cannot open '" + path + "'");
  out << text;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<Vec>& columns) {
  if (header.size() != columns.size())
    throw InvalidParameterError("csv_table: one header per column");
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  const Eigen::Index rows = columns.empty() ? 0 : columns[0].size();
  for (const auto& col : columns)
    if (col.size() != rows)
      throw InvalidParameterError("csv_table: column lengths differ");
  char buf[40];
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      std::snprintf(buf, sizeof(buf), "%.17g", columns[c][r]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace capwiener
