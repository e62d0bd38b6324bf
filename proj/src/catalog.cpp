#include "mafol/catalog.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace mafol {

using nlohmann::json;

const Catalog& Catalog::builtin() {
  static const Catalog c{{
      {"sphere", 1, "abs2(z1) + abs2(z2) - 1", "i*z1/2, i*z2/2"},
      {"heisenberg", 1, "im(z2) - abs2(z1)", "0, 0, -1, 0"},
      {"ellipsoid", 1, "abs2(z1) + 4*abs2(z2) - 1", "i*z1/2, i*z2/2"},
      {"sphere3", 2, "abs2(z1) + abs2(z2) + abs2(z3) - 1",
       "i*z1/2, i*z2/2, i*z3/2"},
  }};
  return c;
}

Catalog Catalog::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open catalog file: " + path);
  json j = json::parse(in);
  Catalog c;
  for (const auto& e : j.at("surfaces")) {
    SurfaceEntry s;
    s.label = e.at("label").get<std::string>();
    s.n = e.at("n").get<int>();
    s.rho = e.at("rho").get<std::string>();
    s.xi0 = e.value("xi0", std::string());
    c.surfaces.push_back(std::move(s));
  }
  return c;
}

const SurfaceEntry& Catalog::find(const std::string& label) const {
  for (const auto& s : surfaces)
    if (s.label == label) return s;
  throw ConfigError("catalog has no surface '" + label + "'");
}

Hypersurface make_hypersurface(const SurfaceEntry& e) {
  Hypersurface h;
  h.n = e.n;
  h.label = e.label;
  h.rho = parse_expression(e.rho, e.n + 1);
  return h;
}

std::shared_ptr<const VecField> make_reeb_field(const SurfaceEntry& e) {
  if (e.xi0.empty())
    throw ConfigError("surface '" + e.label +
                      "' has no closed-form Reeb field; give the scenario an "
                      "explicit seed expression");
  return std::make_shared<ExpressionField>(parse_vector_field(e.xi0, e.n + 1));
}

unsigned stable_seed(const std::string& label) {
  unsigned h = 2166136261u;
  for (unsigned char c : label) {
    h ^= c;
    h *= 16777619u;
  }
  return h == 0 ? 1u : h;
}

namespace {

SamplingBox default_box(const std::string& surface, int n) {
  const int m = 2 * n + 2;
  SamplingBox b;
  b.center.assign(m, 0.0);
  b.half.assign(m, 1.2);
  if (surface == "heisenberg") {
    b.half = {0.4, 0.4, 0.4, 0.3};
  }
  return b;
}

Scenario make_builtin(const std::string& label) {
  Scenario s;
  s.label = label;
  s.rng_seed = stable_seed(label);
  if (label == "sphere-reeb") {
    s.surface = "sphere";
    s.seed.kind = SeedSpec::Kind::kReeb;
    s.fol.s_max = 0.25;
    s.grids.kind = GridSpec::Kind::kShell;
    s.grids.rmin = 0.9;
    s.grids.rmax = 1.1;
    s.oracle_u = "log(abs2(z1) + abs2(z2))";
    s.uniqueness_orders = {12, 24};
  } else if (label == "heisenberg-reeb") {
    s.surface = "heisenberg";
    s.seed.kind = SeedSpec::Kind::kReeb;
    s.fol.s_max = 0.15;
    s.oracle_u = "im(z2) - abs2(z1)";
    s.tol.u_oracle = 1e-9;
  } else if (label == "ellipsoid-reeb") {
    s.surface = "ellipsoid";
    s.seed.kind = SeedSpec::Kind::kReeb;
    s.fol.s_max = 0.15;
    s.oracle_u = "log(abs2(z1) + 4*abs2(z2))";
  } else if (label == "sphere3-reeb") {
    s.surface = "sphere3";
    s.seed.kind = SeedSpec::Kind::kReeb;
    s.fol.s_max = 0.15;
    s.grids.points = 500;
  } else if (label == "sphere-perturbed") {
    s.surface = "sphere";
    s.seed.kind = SeedSpec::Kind::kScaledReeb;
    s.seed.factor = "1 + 0.3*re(z1)";
    s.fol.s_max = 0.12;
    s.fol.flow.mode = FlowMode::kTimeSeries;
    s.grids.leaf_s_half = 0.1;
    s.negative_control = true;
  } else {
    throw ConfigError("unknown built-in scenario '" + label + "'");
  }
  const SurfaceEntry& e = Catalog::builtin().find(s.surface);
  s.box = default_box(s.surface, e.n);
  return s;
}

}  // namespace

const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> all = [] {
    std::vector<Scenario> v;
    for (const char* l :
         {"sphere-reeb", "heisenberg-reeb", "ellipsoid-reeb", "sphere3-reeb",
          "sphere-perturbed"})
      v.push_back(make_builtin(l));
    return v;
  }();
  return all;
}

const Scenario& find_scenario(const std::string& label) {
  for (const auto& s : builtin_scenarios())
    if (s.label == label) return s;
  throw ConfigError("unknown scenario '" + label +
                    "' (and no --config file given)");
}

Scenario scenario_from_json(const json& j) {
  Scenario s;
  s.label = j.at("label").get<std::string>();
  s.surface = j.at("surface").get<std::string>();
  const auto& seed = j.at("seed");
  const std::string kind = seed.at("kind").get<std::string>();
  if (kind == "reeb") {
    s.seed.kind = SeedSpec::Kind::kReeb;
  } else if (kind == "expression") {
    s.seed.kind = SeedSpec::Kind::kExpression;
    s.seed.field = seed.at("field").get<std::string>();
  } else if (kind == "scaled-reeb") {
    s.seed.kind = SeedSpec::Kind::kScaledReeb;
    s.seed.factor = seed.at("factor").get<std::string>();
  } else {
    throw ConfigError("seed.kind must be reeb | expression | scaled-reeb");
  }
  if (j.contains("flow")) {
    const auto& f = j["flow"];
    s.fol.flow.order = f.value("order", s.fol.flow.order);
    s.fol.flow.trust_fraction =
        f.value("trust_fraction", s.fol.flow.trust_fraction);
    s.fol.flow.substeps = f.value("substeps", s.fol.flow.substeps);
    s.fol.flow.max_substeps = f.value("max_substeps", s.fol.flow.max_substeps);
    const std::string mode = f.value("mode", std::string("holomorphic"));
    if (mode == "holomorphic")
      s.fol.flow.mode = FlowMode::kHolomorphic;
    else if (mode == "time-series")
      s.fol.flow.mode = FlowMode::kTimeSeries;
    else
      throw ConfigError("flow.mode must be holomorphic | time-series");
  }
  if (j.contains("collar")) s.fol.s_max = j["collar"].value("s_max", 0.15);
  if (j.contains("sampling")) {
    s.box.center = j["sampling"].at("center").get<RVec>();
    s.box.half = j["sampling"].at("half").get<RVec>();
  }
  if (j.contains("grids")) {
    const auto& g = j["grids"];
    const std::string kind2 = g.value("kind", std::string("collar"));
    s.grids.kind =
        kind2 == "shell" ? GridSpec::Kind::kShell : GridSpec::Kind::kCollar;
    s.grids.points = g.value("points", s.grids.points);
    s.grids.rmin = g.value("rmin", s.grids.rmin);
    s.grids.rmax = g.value("rmax", s.grids.rmax);
    s.grids.s_fill = g.value("s_fill", s.grids.s_fill);
    s.grids.collar_samples = g.value("collar_samples", s.grids.collar_samples);
    s.grids.leaf_nt = g.value("leaf_nt", s.grids.leaf_nt);
    s.grids.leaf_ns = g.value("leaf_ns", s.grids.leaf_ns);
    s.grids.leaf_t_half = g.value("leaf_t_half", s.grids.leaf_t_half);
    s.grids.leaf_s_half = g.value("leaf_s_half", s.grids.leaf_s_half);
    s.grids.v_samples = g.value("v_samples", s.grids.v_samples);
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    auto get = [&](const char* k, double& dst) { dst = t.value(k, dst); };
    get("calibration", s.tol.calibration);
    get("lemma41", s.tol.lemma41);
    get("contact", s.tol.contact);
    get("ma", s.tol.ma);
    get("nondegeneracy_floor", s.tol.nondegeneracy_floor);
    get("vekua_residual", s.tol.vekua_residual);
    get("reeb_match", s.tol.reeb_match);
    get("u_oracle", s.tol.u_oracle);
    get("group_property", s.tol.group_property);
    get("cauchy_riemann", s.tol.cauchy_riemann);
    get("uniqueness", s.tol.uniqueness);
    get("reeb_residual", s.tol.reeb_residual);
    for (auto it = t.begin(); it != t.end(); ++it)
      if (!(it.value().is_number() && it.value().get<double>() > 0.0))
        throw ConfigError("tolerances must be positive numbers");
  }
  s.oracle_u = j.value("oracle_u", std::string());
  s.negative_control = j.value("negative_control", false);
  if (j.contains("uniqueness_orders"))
    s.uniqueness_orders = j["uniqueness_orders"].get<std::vector<int>>();
  s.rng_seed = j.value("rng_seed", 0u);
  if (s.rng_seed == 0) s.rng_seed = stable_seed(s.label);
  if (s.box.center.empty()) {
    const SurfaceEntry& e = Catalog::builtin().find(s.surface);
    s.box = default_box(s.surface, e.n);
  }
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario config: " + path);
  json j = json::parse(in);
  return scenario_from_json(j);
}

nlohmann::ordered_json scenario_echo(const Scenario& s) {
  nlohmann::ordered_json j;
  j["label"] = s.label;
  j["surface"] = s.surface;
  switch (s.seed.kind) {
    case SeedSpec::Kind::kReeb:
      j["seed"] = {{"kind", "reeb"}};
      break;
    case SeedSpec::Kind::kExpression:
      j["seed"] = {{"kind", "expression"}, {"field", s.seed.field}};
      break;
    case SeedSpec::Kind::kScaledReeb:
      j["seed"] = {{"kind", "scaled-reeb"}, {"factor", s.seed.factor}};
      break;
  }
  j["flow"] = {{"order", s.fol.flow.order},
               {"trust_fraction", s.fol.flow.trust_fraction},
               {"mode", s.fol.flow.mode == FlowMode::kHolomorphic
                            ? "holomorphic"
                            : "time-series"}};
  j["collar"] = {{"s_max", s.fol.s_max}};
  j["grids"] = {{"kind", s.grids.kind == GridSpec::Kind::kShell ? "shell"
                                                                : "collar"},
                {"points", s.grids.points},
                {"collar_samples", s.grids.collar_samples},
                {"leaf_nt", s.grids.leaf_nt},
                {"leaf_ns", s.grids.leaf_ns}};
  if (!s.oracle_u.empty()) j["oracle_u"] = s.oracle_u;
  j["negative_control"] = s.negative_control;
  j["rng_seed"] = s.rng_seed;
  return j;
}

}  // namespace mafol
