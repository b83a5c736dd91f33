#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "majorana/cli.hpp"

namespace {

using namespace majorana;

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  std::string plot;
  std::string engines;
  std::string m0;
};

io::RunConfig build_config(const Options& opt) {
  io::RunConfig config;
  if (!opt.config_path.empty()) config = io::load_config(opt.config_path);
  for (const auto& assignment : opt.overrides) io::apply_override(config, assignment);
  if (!opt.engines.empty()) io::apply_setting(config, "engines", opt.engines);
  if (!opt.m0.empty()) io::apply_setting(config, "m0", opt.m0);
  if (!opt.out.empty()) config.out = opt.out;
  if (!opt.plot.empty()) config.plot = opt.plot;
  io::validate(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Majorana spin-flip transitions in a reversing magnetic field"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&opt](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "configuration file (key = value lines, or a CSV with an echo block)");
    cmd->add_option("--set", opt.overrides, "override a configuration key, e.g. --set tau_q=117.7us")->take_all();
    cmd->add_option("--out", opt.out, "output CSV path (default: stdout)");
    cmd->add_option("--plot", opt.plot, "write an SVG plot to this path");
    cmd->add_option("--engines", opt.engines, "analytic|numeric|both");
    cmd->add_option("--m0", opt.m0, "initial magnetic quantum number, e.g. 2 or -1/2");
  };

  auto* analytic = app.add_subcommand("analytic", "closed-form populations for each tau_i");
  auto* simulate = app.add_subcommand("simulate", "time trace from direct integration");
  auto* sweep = app.add_subcommand("sweep", "tau_i sweep with analytic/numeric comparison");
  auto* validate = app.add_subcommand("validate", "run the built-in invariant checks");
  for (auto* cmd : {analytic, simulate, sweep, validate}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kConfigError;
  }

  try {
    const io::RunConfig config = build_config(opt);
    if (analytic->parsed()) return cli::cmd_analytic(config, std::cout, std::cerr);
    if (simulate->parsed()) return cli::cmd_simulate(config, std::cout, std::cerr);
    if (sweep->parsed()) return cli::cmd_sweep(config, std::cout, std::cerr);
    return cli::cmd_validate(config, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const StepSizeUnderflow& e) {
    std::cerr << "integrator failure: " << e.what() << '\n';
    return cli::kIntegratorFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kConfigError;
  }
}
