#pragma once

// Built-in hypersurface catalog and scenario definitions, plus JSON loading
// for user-supplied catalogs and scenario configs (one scenario per file).

#include <nlohmann/json_fwd.hpp>

#include "mafol/foliation.hpp"

namespace mafol {

struct SurfaceEntry {
  std::string label;
  int n = 1;
  std::string rho;
  std::string xi0;  // optional closed-form Reeb field ("" = none)
};

struct Catalog {
  std::vector<SurfaceEntry> surfaces;

  static const Catalog& builtin();
  static Catalog load_file(const std::string& path);
  const SurfaceEntry& find(const std::string& label) const;
};

Hypersurface make_hypersurface(const SurfaceEntry& e);
// Parses the closed-form Reeb expression; throws ConfigError when absent.
std::shared_ptr<const VecField> make_reeb_field(const SurfaceEntry& e);

struct SeedSpec {
  enum class Kind { kReeb, kExpression, kScaledReeb } kind = Kind::kReeb;
  std::string field;   // kExpression: the component list
  std::string factor;  // kScaledReeb: scalar factor expression
};

struct GridSpec {
  enum class Kind { kCollar, kShell } kind = Kind::kCollar;
  int points = 1000;
  double rmin = 0.9, rmax = 1.1;  // kShell: |z| range
  double s_fill = 0.9;            // kCollar: fraction of s_max used
  int collar_samples = 200;       // calibration / identity sample count
  int leaf_nt = 41, leaf_ns = 41;
  double leaf_t_half = 0.5, leaf_s_half = 0.1;
  int v_samples = 100;  // Reeb / recovery sample count
};

struct Tolerances {
  double calibration = 1e-7;
  double lemma41 = 1e-8;
  double contact = 1e-7;
  double ma = 1e-6;
  double nondegeneracy_floor = 1e-3;
  double vekua_residual = 1e-4;
  double reeb_match = 1e-7;
  double u_oracle = 1e-6;
  double group_property = 1e-9;
  double cauchy_riemann = 1e-7;
  double uniqueness = 1e-9;
  double reeb_residual = 1e-10;
};

struct Scenario {
  std::string label;
  std::string surface;
  SeedSpec seed;
  FoliationParams fol;  // flow params, s_max, jet order, build samples
  SamplingBox box;
  GridSpec grids;
  Tolerances tol;
  std::string oracle_u;  // optional closed-form u as an expression string
  bool negative_control = false;
  std::vector<int> uniqueness_orders;  // e.g. {12, 24}
  unsigned rng_seed = 0;               // 0 = derive from the label
};

const std::vector<Scenario>& builtin_scenarios();
const Scenario& find_scenario(const std::string& label);
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario_file(const std::string& path);
nlohmann::ordered_json scenario_echo(const Scenario& s);

// Stable label hash for per-scenario RNG seeds (FNV-1a).
unsigned stable_seed(const std::string& label);

}  // namespace mafol
