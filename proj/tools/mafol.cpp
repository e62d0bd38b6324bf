// Scenario runner and report generator for the Monge-Ampere foliation lab.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "mafol/pipeline.hpp"

namespace {

using namespace mafol;

std::complex<double> parse_complex(std::string s) {
  // Accepted forms: "0.3", "0.2i", "0.3+0.2i", "0.3-0.2i", "i", "-i".
  s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
  if (s.empty()) throw ConfigError("empty complex number");
  if (s.back() != 'i') return {std::stod(s), 0.0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) {
    if (s.empty() || s == "+") return {0.0, 1.0};
    if (s == "-") return {0.0, -1.0};
    return {0.0, std::stod(s)};
  }
  const std::string re = s.substr(0, split);
  std::string im = s.substr(split);
  if (im == "+") im = "1";
  if (im == "-") im = "-1";
  return {std::stod(re), std::stod(im)};
}

RVec parse_point(const std::string& s, int m) {
  RVec out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(std::stod(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (static_cast<int>(out.size()) != m)
    throw ConfigError("point needs " + std::to_string(m) +
                      " real coordinates");
  return out;
}

void print_verdict(const RunOutcome& o) {
  const auto& v = o.report["verdict"];
  std::cout << (o.pass ? "verdict: pass" : "verdict: FAIL") << "\n";
  for (const auto& r : v["reasons"])
    std::cout << "  reason: " << r.get<std::string>() << "\n";
}

void print_stages(const RunOutcome& o) {
  if (!o.report.contains("stages")) return;
  for (const auto& [name, stage] : o.report["stages"].items())
    std::cout << "stage " << name << ": " << stage.dump() << "\n";
}

int run_scenario_command(const std::string& command, const Scenario& sc,
                         const RunOptions& opt, const std::string& out_dir) {
  RunOutcome o;
  if (command == "build")
    o = run_build(sc, opt);
  else if (command == "verify")
    o = run_verify(sc, opt);
  else if (command == "locus")
    o = run_locus(sc, opt);
  else if (command == "vekua")
    o = run_vekua(sc, opt);
  else
    o = run_report(sc, opt);
  print_stages(o);
  print_verdict(o);
  if (!out_dir.empty()) {
    write_outcome(o, out_dir);
    std::cout << "report written to " << out_dir << "/report.json\n";
  }
  return o.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mafol: constructs defining functions of CR hypersurfaces as "
               "degenerate complex Monge-Ampere solutions by complexifying "
               "Reeb-type flows, and verifies the attached identities"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, catalog_path, out_dir, mode_str;
  int jobs = 0, taylor_order = 0;
  double tol_scale = 1.0;
  app.add_option("--config", config_path, "scenario config JSON");
  app.add_option("--catalog", catalog_path, "hypersurface catalog JSON");
  app.add_option("--out", out_dir, "output directory for reports");
  app.add_option("--jobs", jobs, "worker threads (default: hardware)");
  app.add_option("--tol-scale", tol_scale, "scale all tolerances");
  app.add_option("--taylor-order", taylor_order, "flow Taylor order override");
  app.add_option("--mode", mode_str,
                 "flow mode override: holomorphic | time-series");

  auto* cat = app.add_subcommand("catalog", "list or show catalog surfaces");
  std::string cat_action = "list", cat_label;
  cat->fallthrough();
  cat->add_option("action", cat_action, "list | show")->required();
  cat->add_option("label", cat_label, "surface label (for show)");

  auto* reeb_cmd = app.add_subcommand("reeb", "Reeb field at sample points");
  std::string reeb_surface;
  int reeb_grid = 5;
  reeb_cmd->fallthrough();
  reeb_cmd->add_option("surface", reeb_surface)->required();
  reeb_cmd->add_option("--grid", reeb_grid, "number of sample points");

  auto* flow_cmd =
      app.add_subcommand("flow", "continue the seed flow to complex time");
  std::string flow_surface, flow_seed, flow_time, flow_dump;
  flow_cmd->fallthrough();
  flow_cmd->add_option("surface", flow_surface)->required();
  flow_cmd->add_option("--seed", flow_seed, "ambient point x1,x2,...")
      ->required();
  flow_cmd->add_option("--time", flow_time, "complex time, e.g. 0.3+0.2i")
      ->required();
  flow_cmd->add_option("--dump-orbit", flow_dump,
                       "write the orbit coefficient norms as CSV (k,norm)");

  std::string scen_label;
  std::vector<CLI::App*> scen_cmds;
  for (const char* name : {"build", "verify", "locus", "vekua", "report"}) {
    auto* c = app.add_subcommand(
        name, std::string(name) + " pipeline for a scenario");
    c->fallthrough();
    c->add_option("scenario", scen_label, "scenario label or --config file");
    scen_cmds.push_back(c);
  }

  CLI11_PARSE(app, argc, argv);

  using namespace mafol;
  try {
    Catalog user_catalog;
    RunOptions opt;
    opt.jobs = jobs;
    opt.tol_scale = tol_scale;
    opt.taylor_order = taylor_order;
    if (!mode_str.empty()) {
      if (mode_str == "holomorphic")
        opt.mode_override = FlowMode::kHolomorphic;
      else if (mode_str == "time-series")
        opt.mode_override = FlowMode::kTimeSeries;
      else
        throw ConfigError("--mode must be holomorphic | time-series");
    }
    if (!catalog_path.empty()) {
      user_catalog = Catalog::load_file(catalog_path);
      opt.catalog = &user_catalog;
    }
    const Catalog& catalog = opt.catalog ? *opt.catalog : Catalog::builtin();

    if (cat->parsed()) {
      if (cat_action == "list") {
        for (const auto& s : catalog.surfaces)
          std::cout << s.label << "  (n=" << s.n << ")  rho = " << s.rho
                    << "\n";
        return 0;
      }
      if (cat_action == "show") {
        const SurfaceEntry& e = catalog.find(cat_label);
        std::cout << "label: " << e.label << "\nn: " << e.n
                  << "\nrho: " << e.rho << "\n";
        if (!e.xi0.empty()) std::cout << "xi0: " << e.xi0 << "\n";
        return 0;
      }
      throw ConfigError("catalog action must be list | show");
    }

    if (reeb_cmd->parsed()) {
      const SurfaceEntry& e = catalog.find(reeb_surface);
      Hypersurface h = make_hypersurface(e);
      SamplingBox box{RVec(h.real_dim(), 0.0), RVec(h.real_dim(), 1.2)};
      if (e.label == "heisenberg") box.half = {0.4, 0.4, 0.4, 0.3};
      auto pts = sample_hypersurface(h, box, reeb_grid,
                                     stable_seed(e.label) ^ 0x1u);
      double worst = 0.0;
      for (const auto& p : pts) {
        double res = 0.0;
        RVec xi = reeb(h, p, &res);
        worst = std::max(worst, res);
        std::cout << "p = [";
        for (std::size_t i = 0; i < p.size(); ++i)
          std::cout << (i ? ", " : "") << p[i];
        std::cout << "]  xi0 = [";
        for (std::size_t i = 0; i < xi.size(); ++i)
          std::cout << (i ? ", " : "") << xi[i];
        std::cout << "]  residual = " << res << "\n";
      }
      std::cout << "max residual: " << worst << "\n";
      return worst <= 1e-9 ? 0 : 1;
    }

    if (flow_cmd->parsed()) {
      const SurfaceEntry& e = catalog.find(flow_surface);
      Hypersurface h = make_hypersurface(e);
      auto xi0 = make_reeb_field(e);
      RVec p = parse_point(flow_seed, h.real_dim());
      const std::complex<double> w = parse_complex(flow_time);
      FlowParams fp;
      if (taylor_order > 0) fp.order = taylor_order;
      if (opt.mode_override) fp.mode = *opt.mode_override;
      TaylorOrbit o = taylor_orbit(*xi0, p, fp.order);
      std::cout << "orbit radius estimate: "
                << (o.unbounded() ? std::string("unbounded")
                                  : std::to_string(o.radius))
                << "\n";
      if (!flow_dump.empty()) {
        std::ofstream dump(flow_dump);
        dump << "k,coeff_norm\n";
        for (int k = 0; k <= o.order; ++k)
          dump << k << "," << norm2(o.coeff[k]) << "\n";
        std::cout << "orbit dump written to " << flow_dump << "\n";
      }
      RVec q = continue_flow(*xi0, p, w, fp);
      std::cout << "g_w(p) = [";
      for (std::size_t i = 0; i < q.size(); ++i)
        std::cout << (i ? ", " : "") << q[i];
      std::cout << "]\n";
      return 0;
    }

    for (CLI::App* c : scen_cmds) {
      if (!c->parsed()) continue;
      Scenario sc;
      if (!config_path.empty())
        sc = load_scenario_file(config_path);
      else if (!scen_label.empty())
        sc = find_scenario(scen_label);
      else
        throw ConfigError("give a scenario label or --config <file>");
      if (c->get_name() == "report" && out_dir.empty())
        throw ConfigError("report needs --out <dir>");
      return run_scenario_command(c->get_name(), sc, opt, out_dir);
    }
    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
