#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "worklab/worklab.h"

namespace {

using nlohmann::json;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 0;
  std::size_t atom_cap = 0;
  std::optional<double> kT;
  std::string csv;
};

struct SystemArgs {
  std::vector<double> levels;
  std::vector<double> q;
  std::string initial;
};

void add_system(CLI::App* app, SystemArgs& a, bool need_levels = true) {
  auto* opt = app->add_option("--levels", a.levels, "energy levels, comma separated")
                  ->delimiter(',');
  if (need_levels) opt->required();
  app->add_option("--q", a.q, "initial distribution, comma separated")->delimiter(',');
  app->add_option("--initial", a.initial, "gibbs, uniform or point_mass:<s>");
}

json system_json(const SystemArgs& a) { return {{"levels", a.levels}}; }

json initial_json(const SystemArgs& a, const char* dflt) {
  if (!a.q.empty()) return {{"explicit", a.q}};
  if (a.initial.empty()) return dflt;
  const std::string pm = "point_mass:";
  if (a.initial.rfind(pm, 0) == 0) return {{"point_mass", std::stoull(a.initial.substr(pm.size()))}};
  return a.initial;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// One table goes to `path`; several go to <stem>_<name><ext> beside it.
void write_tables(const json& report, const std::string& path) {
  const json& tables = report.at("tables");
  if (tables.empty()) return;
  const std::filesystem::path base(path);
  if (tables.size() == 1) {
    write_file(base, tables.begin().value().get<std::string>());
    return;
  }
  const std::string ext = base.has_extension() ? base.extension().string() : ".csv";
  for (const auto& [name, csv] : tables.items()) {
    auto target = base;
    target.replace_filename(base.stem().string() + "_" + name + ext);
    write_file(target, csv.get<std::string>());
  }
}

int run(const json& config, const Globals& g) {
  wl_run_options opts{};
  if (g.seed) {
    opts.has_seed = 1;
    opts.seed = *g.seed;
  }
  opts.jobs = g.jobs;
  opts.atom_cap = g.atom_cap;
  opts.kT = g.kT.value_or(0.0);
  char* report = nullptr;
  int passed = 0;
  const std::string text = config.dump();
  if (wl_run_scenario(text.c_str(), &opts, &report, &passed) != WL_OK) {
    std::cerr << "error: " << wl_last_error() << "\n";
    return 2;
  }
  std::string out(report);
  wl_string_free(report);
  std::cout << out << "\n";
  if (!g.csv.empty()) write_tables(json::parse(out), g.csv);
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Work extraction and erasure toolkit"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  double kT = 0.0;
  auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo seed (u64)");
  app.add_option("--jobs", g.jobs, "worker threads for ladder points");
  app.add_option("--atom-cap", g.atom_cap, "atom cap for exact work laws");
  app.add_option("--csv", g.csv, "write tabular output here");
  auto* kt_opt = app.add_option("--bath-kT", kT, "bath temperature kT")->check(CLI::PositiveNumber);
  json config{{"schema", 1}};

  auto* analyze = app.add_subcommand("analyze", "closed-form quantities of (q, h)");
  SystemArgs an;
  double an_eps = 0.0;
  add_system(analyze, an);
  analyze->add_option("--eps", an_eps, "smoothing parameter");

  auto* simulate = app.add_subcommand("simulate", "work law of a process, exact or Monte Carlo");
  SystemArgs sim;
  std::string sim_type = "fig2", sim_mode = "exact";
  std::size_t sim_L = 400, sim_s = 0, sim_samples = 100000;
  double sim_cutoff = 50.0, sim_eps = 0.0, sim_E = 50.0, sim_delta = 0.0;
  std::vector<double> sim_final;
  std::vector<std::size_t> sim_ladder;
  std::string sim_steps;
  add_system(simulate, sim);
  simulate->add_option("--process", sim_type, "itr, fig2, fig3, erasure or custom")
      ->check(CLI::IsMember({"itr", "fig2", "fig3", "erasure", "custom"}));
  simulate->add_option("--L", sim_L, "ITR steps");
  simulate->add_option("--L-ladder", sim_ladder, "list of ITR step counts")->delimiter(',');
  simulate->add_option("--m-cutoff", sim_cutoff, "cutoff energy");
  simulate->add_option("--eps", sim_eps, "smoothing parameter (fig3) / delta-set eps");
  simulate->add_option("--E", sim_E, "lift energy (fig3)");
  simulate->add_option("--s", sim_s, "target state (erasure)");
  simulate->add_option("--final-levels", sim_final, "final levels")->delimiter(',');
  simulate->add_option("--steps", sim_steps, "JSON step list (custom)");
  simulate->add_option("--mode", sim_mode, "exact, monte-carlo or both")
      ->check(CLI::IsMember({"exact", "monte-carlo", "both"}));
  simulate->add_option("--samples", sim_samples, "Monte Carlo sample count");
  simulate->add_option("--delta", sim_delta, "delta-set window half-width");

  auto* crooks = app.add_subcommand("crooks", "Crooks sandwich on an ITR or custom process");
  SystemArgs cr;
  std::vector<double> cr_final, cr_deltas{0.01, 0.1, 0.5};
  std::size_t cr_L = 3;
  std::string cr_steps;
  double cr_eps = 0.0;
  add_system(crooks, cr);
  crooks->add_option("--final-levels", cr_final, "ITR target levels")->delimiter(',');
  crooks->add_option("--L", cr_L, "ITR steps");
  crooks->add_option("--steps", cr_steps, "JSON step list instead of an ITR");
  crooks->add_option("--delta", cr_deltas, "window half-widths")->delimiter(',');
  crooks->add_option("--eps", cr_eps, "also check the thermal-start bound at this eps");

  auto* asym = app.add_subcommand("asymptotics", "second-order expansion of D0^eps for iid products");
  std::vector<double> as_q, as_r;
  std::vector<std::size_t> as_m{64, 256, 1024};
  double as_eps = 0.05, as_C = 0.4748, as_gap = 0.0;
  asym->add_option("--q", as_q, "base distribution q")->delimiter(',')->required();
  asym->add_option("--r", as_r, "base distribution r")->delimiter(',')->required();
  asym->add_option("--eps", as_eps, "smoothing parameter");
  asym->add_option("--m", as_m, "copy counts")->delimiter(',');
  asym->add_option("--C", as_C, "Berry-Esseen constant");
  asym->add_option("--residual-gap", as_gap, "required final |residual - target|");

  auto* erase = app.add_subcommand("erase", "erasure cost and final-state probability");
  SystemArgs er;
  std::size_t er_s = 0, er_L = 400;
  double er_cutoff = 50.0, er_eps = 0.0, er_tau = 1e-3, er_E = 50.0, er_delta = 0.2,
         er_tol = 1e-2;
  std::vector<double> er_final;
  add_system(erase, er);
  erase->add_option("--s", er_s, "target state (0-based)");
  erase->add_option("--L", er_L, "ITR steps");
  erase->add_option("--m-cutoff", er_cutoff, "depth of the target well");
  erase->add_option("--final-levels", er_final, "final levels")->delimiter(',');
  erase->add_option("--eps", er_eps, "also run the eps-deterministic variant");
  erase->add_option("--tau", er_tau, "allowed failure probability");
  erase->add_option("--E", er_E, "lift energy for the eps variant");
  erase->add_option("--delta", er_delta, "delta-set window for the eps variant");
  erase->add_option("--tolerance", er_tol, "tolerance on the expected cost");

  auto* scenario = app.add_subcommand("scenario", "run a JSON scenario config");
  std::string scenario_path;
  scenario->add_option("file", scenario_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (*seed_opt) g.seed = seed;
  if (*kt_opt) g.kT = kT;

  try {
    if (analyze->parsed()) {
      config["kind"] = "analyze";
      config["system"] = system_json(an);
      config["initial"] = initial_json(an, "gibbs");
      if (an_eps > 0.0) config["eps"] = an_eps;
    } else if (simulate->parsed()) {
      config["kind"] = "simulate";
      config["system"] = system_json(sim);
      config["initial"] = initial_json(sim, "gibbs");
      json p{{"type", sim_type}, {"L", sim_L}, {"m_cutoff", sim_cutoff}};
      if (sim_type == "fig3") p["eps"] = sim_eps, p["E"] = sim_E;
      if (sim_type == "erasure") p["s"] = sim_s;
      if (!sim_final.empty()) p["final_levels"] = sim_final;
      if (sim_type == "custom") p["steps"] = json::parse(sim_steps.empty() ? "[]" : sim_steps);
      config["process"] = p;
      config["mode"] = sim_mode;
      config["seeds"] = {{"seed", g.seed.value_or(1)}, {"n_samples", sim_samples}};
      if (!sim_ladder.empty()) config["ladder"] = {{"L", sim_ladder}};
      if (sim_delta > 0.0) {
        config["delta"] = sim_delta;
        config["eps"] = sim_eps;
        config["quantities"] = {"law"};
      }
    } else if (crooks->parsed()) {
      config["kind"] = "crooks";
      config["system"] = system_json(cr);
      if (!cr_steps.empty()) {
        config["process"] = {{"type", "custom"}, {"steps", json::parse(cr_steps)}};
      } else {
        config["process"] = {{"type", "itr"},
                             {"L", cr_L},
                             {"final_levels", cr_final.empty() ? cr.levels : cr_final}};
      }
      config["delta"] = cr_deltas;
      if (cr_eps > 0.0) config["eps"] = cr_eps;
    } else if (asym->parsed()) {
      config["kind"] = "asymptotics";
      config["iid"] = {{"q", as_q}, {"r", as_r}, {"berry_esseen_C", as_C}};
      config["eps"] = as_eps;
      config["ladder"] = {{"m", as_m}};
      if (as_gap > 0.0) config["residual_gap"] = as_gap;
    } else if (erase->parsed()) {
      config["kind"] = "erase";
      config["system"] = system_json(er);
      config["initial"] = initial_json(er, "uniform");
      json e{{"s", er_s}, {"L", er_L}, {"m_cutoff", er_cutoff}, {"tau", er_tau}, {"E", er_E}};
      if (!er_final.empty()) e["final_levels"] = er_final;
      config["erase"] = e;
      config["tolerance"] = er_tol;
      if (er_eps > 0.0) config["eps"] = er_eps, config["delta"] = er_delta;
    } else {
      config = json::parse(slurp(scenario_path));
    }
    return run(config, g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
