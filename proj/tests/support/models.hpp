#pragma once

// Shared model construction for the module tests: built-in scenarios with
// trimmed build-sample counts so unit tests stay quick.

#include "mafol/pipeline.hpp"

namespace mafol::testing {

struct ModelBundle {
  Scenario scenario;
  Hypersurface h;
  std::shared_ptr<const VecField> xi0;
  std::shared_ptr<FoliationModel> model;
};

inline ModelBundle make_model(const std::string& scenario_label,
                              int build_samples = 12) {
  ModelBundle b;
  b.scenario = find_scenario(scenario_label);
  b.scenario.fol.build_samples = build_samples;
  const SurfaceEntry& e = Catalog::builtin().find(b.scenario.surface);
  b.h = make_hypersurface(e);
  b.xi0 = resolve_seed(b.scenario, e);
  b.model = std::make_shared<FoliationModel>(
      build_foliation(b.h, b.xi0, b.scenario.fol, b.scenario.box));
  return b;
}

}  // namespace mafol::testing
