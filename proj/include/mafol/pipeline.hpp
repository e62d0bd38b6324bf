#pragma once

// Scenario runner: resolves catalog references, executes the staged pipeline
// (reeb -> flow -> build -> calibrate -> verify -> scan), and produces the
// machine-readable RunReport plus CSV/gnuplot artifacts. Reports are pure
// functions of the scenario and options: fixed iteration orders, fixed RNG
// seeds, no wall-clock data in the body.

#include <nlohmann/json.hpp>
#include <optional>

#include "mafol/catalog.hpp"
#include "mafol/monge_ampere.hpp"
#include "mafol/vekua.hpp"

namespace mafol {

struct RunOptions {
  int jobs = 0;  // 0 = hardware concurrency
  double tol_scale = 1.0;
  int taylor_order = 0;  // 0 = scenario default
  std::optional<FlowMode> mode_override;
  const Catalog* catalog = nullptr;  // null = builtin
};

struct RunOutcome {
  nlohmann::ordered_json report;
  bool pass = false;
  // Artifact files (relative path -> contents), written by write_outcome.
  std::vector<std::pair<std::string, std::string>> files;
};

RunOutcome run_build(const Scenario& s, const RunOptions& opt);
RunOutcome run_verify(const Scenario& s, const RunOptions& opt);
RunOutcome run_locus(const Scenario& s, const RunOptions& opt);
RunOutcome run_vekua(const Scenario& s, const RunOptions& opt);
RunOutcome run_report(const Scenario& s, const RunOptions& opt);

// Serialize the report exactly as written to disk (the determinism contract
// compares these bytes).
std::string report_bytes(const RunOutcome& o);
void write_outcome(const RunOutcome& o, const std::string& out_dir);

// Shared with the CLI `flow` and `reeb` subcommands.
std::shared_ptr<const VecField> resolve_seed(const Scenario& s,
                                             const SurfaceEntry& e);

}  // namespace mafol
