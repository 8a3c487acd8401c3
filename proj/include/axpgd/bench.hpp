#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "axpgd/fom3d.hpp"
#include "axpgd/pgd.hpp"

namespace axpgd::bench {

// Benchmark ids: takeda-rodded, takeda-unrodded, pin-short, pin-medium,
// pin-tall. Takeda cells are mesh_scale cm wide; the pin-cell base mesh is
// 24 x 24 cells on the quarter cell and 0.1575 cm axially, coarsened by
// mesh_scale. A positive pin_height overrides the fuel height of a pin id.
struct BenchmarkSpec {
  std::string id = "takeda-rodded";
  double mesh_scale = 1.0;
  double pin_height = 0;
  int n_polar = 2;  // per octant
  int n_azim = 2;
  std::string data_dir;
};

double pin_height_of(const std::string& id);

fom::Problem build_benchmark(const BenchmarkSpec& spec);

// Directory holding the shipped cross-section files.
std::string default_data_dir();

enum class Mode { Fom, Pgd, Svd, All };

struct RunConfig {
  BenchmarkSpec problem;
  Mode mode = Mode::All;
  std::vector<pgd::RomVariant> variants = pgd::all_variants();
  pgd::PgdSettings pgd;
  numerics::TransportSolveSettings fom = fom::fom_settings();
  std::string output;     // CSV report; empty: standard output
  std::string flux_dump;  // prefix of flux dumps; empty: none
  std::string reference;  // FOM flux file to reuse instead of solving
  unsigned seed = 0;      // reserved
};

// key = value lines, '#' comments. Unknown keys and bad values throw
// ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig read_config(const std::string& path);

struct LabelledReport {
  std::string label;
  pgd::RunReport report;
};

inline constexpr const char* kReportHeader =
    "variant,M,wall_time_s,err_L2_angular,err_L2_scalar,residual_1d_final,nonlinear_iters";

void write_report(std::ostream& out, const std::vector<LabelledReport>& reports);

// Executes the configured pipeline, writes the report and dumps, and returns
// the reports. Throws fom::FomConvergenceError when the reference fails.
std::vector<LabelledReport> run(const RunConfig& cfg, std::ostream& log);

}  // namespace axpgd::bench
