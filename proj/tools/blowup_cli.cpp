// blowup: batch driver for the wave-equation blow-up lab.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blowup/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Blow-up lab for u_tt = u_xx + |u|^{p-1} u (complex u, one space dimension)"};
  app.require_subcommand(1);

  blowup::cli::Invocation inv;
  auto add_run = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", inv.config_path, "JSON run configuration")->required();
    sub->add_option("--set", inv.overrides, "Override a config field, e.g. --set time.cfl=0.25 (repeatable)");
    sub->callback([&inv, name] { inv.command = name; });
    return sub;
  };
  add_run("simulate", "Evolve physical data; write traces, snapshots and blow-up time estimates");
  add_run("curve", "Scan the blow-up curve; write T, d, theta per point and Hoelder reports");
  add_run("selfsim", "Evolve in self-similar variables; write the energy ledger and profile fits");
  add_run("liouville", "Run the trapping battery and the optional vanishing check");
  add_run("profile-eval", "Sample the stationary profile selected by selfsim.initial");

  bool quick = false;
  std::vector<int> only;
  CLI::App* verify = app.add_subcommand("verify", "Run the acceptance battery and print a pass/fail table");
  verify->add_flag("--quick", quick, "Reduced resolutions with the documented looser tolerances");
  verify->add_option("--only", only, "Run only these criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // usage errors are config errors
    return code == 0 ? 0 : 2;
  }
  if (verify->parsed()) return blowup::cli::verify(quick, only, std::cout);
  return blowup::cli::run(inv, std::cout, std::cerr);
}
