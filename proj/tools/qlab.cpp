// qlab: figure-data runner and single-state inspector.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "qlab/experiments.hpp"

namespace {

struct Flags {
  double step = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t d = 0;
  std::size_t restarts = 0;
  std::size_t max_evals = 0;
  std::string out;
  std::size_t jobs = 0;
  std::string config;
};

// Keys mirror the long flag names.
void apply_config_file(const std::string& path, qlab::ExperimentConfig& cfg) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file " + path);
  const auto j = nlohmann::json::parse(f);
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "step") cfg.step = value.get<double>();
    else if (key == "samples") cfg.samples = value.get<std::size_t>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "d") cfg.d = value.get<std::size_t>();
    else if (key == "restarts") cfg.optimizer.restarts = value.get<std::size_t>();
    else if (key == "max_evals") cfg.optimizer.max_evals = value.get<std::size_t>();
    else if (key == "out") cfg.out = value.get<std::string>();
    else if (key == "svg") cfg.svg = value.get<bool>();
    else if (key == "jobs") cfg.jobs = value.get<std::size_t>();
    else if (key == "family") cfg.family = value.get<std::string>();
    else if (key == "param") cfg.param = value.get<double>();
    else if (key == "state_file") cfg.state_file = value.get<std::string>();
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

qlab::DensityMatrix inspected_state(const qlab::ExperimentConfig& cfg) {
  if (!cfg.state_file.empty()) {
    std::ifstream f(cfg.state_file);
    if (!f) throw std::invalid_argument("cannot open state file " + cfg.state_file);
    std::stringstream text;
    text << f.rdbuf();
    return qlab::parse_state(text.str());
  }
  if (cfg.family.empty()) throw std::invalid_argument("inspect needs --family or --state-file");
  const auto family = qlab::parse_family(cfg.family);
  const bool needs_param = family != qlab::Family::bell && family != qlab::Family::ad_initial;
  if (needs_param && !cfg.param) throw std::invalid_argument("--family " + cfg.family + " needs --param");
  return qlab::make_family_point(family, cfg.param.value_or(0.0)).state;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Potential quantumness experiments"};
  app.require_subcommand(1);
  Flags flags;
  qlab::ExperimentConfig cfg;
  bool svg = false;
  bool full = false;
  std::string family;
  double param = 0;
  std::string state_file;

  std::vector<CLI::App*> subs;
  for (const char* name : {"fig2", "fig3", "fig4", "fig5", "fig6", "inspect"}) {
    auto* sub = app.add_subcommand(name, std::string(name) == std::string("inspect")
                                             ? "Report every measure for one state"
                                             : std::string("Write ") + name + " data as CSV");
    sub->add_option("--step", flags.step, "Parameter grid step in (0, 1]");
    sub->add_option("--samples", flags.samples, "Random states for scatter experiments");
    sub->add_option("--seed", flags.seed, "RNG seed");
    sub->add_option("--d", flags.d, "Ancilla dimension (0, 1, 2, 4, 8)");
    sub->add_option("--restarts", flags.restarts, "Optimizer restarts");
    sub->add_option("--max-evals", flags.max_evals, "Simplex evaluations per restart");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_flag("--svg", svg, "Also write an SVG plot");
    sub->add_option("--jobs", flags.jobs, "Worker threads");
    sub->add_flag("--full", full, "Use 1e5 random states");
    sub->add_option("--config", flags.config, "JSON config file (flags take precedence)");
    if (std::string(name) == "inspect") {
      sub->add_option("--family", family, "cc, werner, isotropic, mixture, bell or ad0");
      sub->add_option("--param", param, "Family parameter");
      sub->add_option("--state-file", state_file, "State in text matrix format");
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = nullptr;
  for (auto* s : subs)
    if (s->parsed()) sub = s;
  cfg.experiment = sub->get_name();

  try {
    if (!flags.config.empty()) apply_config_file(flags.config, cfg);
    if (sub->count("--step")) cfg.step = flags.step;
    if (sub->count("--samples")) cfg.samples = flags.samples;
    if (sub->count("--seed")) cfg.seed = flags.seed;
    if (sub->count("--d")) cfg.d = flags.d;
    if (sub->count("--restarts")) cfg.optimizer.restarts = flags.restarts;
    if (sub->count("--max-evals")) cfg.optimizer.max_evals = flags.max_evals;
    if (sub->count("--out")) cfg.out = flags.out;
    if (sub->count("--jobs")) cfg.jobs = flags.jobs;
    if (svg) cfg.svg = true;
    if (full) {
      cfg.full = true;
      cfg.samples = 100000;
      std::cerr << "warning: --full runs 1e5 states and takes days on one core\n";
    }
    if (cfg.experiment == "inspect") {
      if (sub->count("--family")) cfg.family = family;
      if (sub->count("--param")) cfg.param = param;
      if (sub->count("--state-file")) cfg.state_file = state_file;
    }
    cfg.optimizer.seed = cfg.seed;
    cfg.validate();

    if (cfg.experiment == "inspect") {
      std::cout << qlab::inspect_report(inspected_state(cfg), cfg);
      return 0;
    }
    const auto rows = qlab::run_experiment(cfg);
    const auto path = qlab::write_outputs(cfg, rows);
    std::cout << "wrote " << rows.size() << " rows to " << path.string() << '\n';
    return 0;
  } catch (const qlab::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 3;
  } catch (const qlab::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
