// Command-line driver: run a configured benchmark pipeline or compare two
// flux dumps.
#include <iostream>

#include <CLI11.hpp>

#include "axpgd/bench.hpp"
#include "axpgd/errors.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNotConverged = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace axpgd;
  CLI::App app{"Full-order SN and 2D/1D PGD reduced-order transport"};
  app.require_subcommand(1);

  std::string config, output;
  auto* run = app.add_subcommand("run", "Run the pipeline of a configuration file");
  run->add_option("--config", config, "key = value configuration")->required();
  run->add_option("--output", output, "CSV report (overrides the config; default standard output)");

  std::string fom_path, rom_path;
  auto* cmp = app.add_subcommand("compare", "Relative L2 errors of a flux dump against a reference dump");
  cmp->add_option("--fom", fom_path, "reference flux")->required();
  cmp->add_option("--rom", rom_path, "approximate flux")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      auto cfg = bench::read_config(config);
      if (!output.empty()) cfg.output = output;
      const auto reports = bench::run(cfg, std::cerr);
      if (cfg.output.empty()) bench::write_report(std::cout, reports);
    } else {
      const auto c = fom::compare_flux(fom::read_flux(fom_path), fom::read_flux(rom_path));
      std::cout.precision(10);
      std::cout << "err_L2_angular," << c.angular << "\nerr_L2_scalar," << c.scalar << '\n';
    }
  } catch (const fom::FomConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
