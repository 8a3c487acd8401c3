#include "axpgd/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "axpgd/errors.hpp"
#include "axpgd/svdref.hpp"

#ifndef AXPGD_DATA_DIR
#define AXPGD_DATA_DIR "data"
#endif

namespace axpgd::bench {

using numerics::Vec;

namespace {

constexpr double kPinPitch = 1.26;
constexpr double kPinRadius = 0.54;
constexpr double kPinReflector = 21.42;
constexpr int kPinRadialCells = 24;  // per half pitch, before coarsening
constexpr double kPinAxialWidth = 0.1575;

int cell_count(int base, double scale) {
  const int n = static_cast<int>(std::lround(base / scale));
  if (n < 1) throw ConfigError("mesh_scale leaves no cells");
  return n;
}

std::vector<double> centers(const std::vector<double>& edges) {
  std::vector<double> c;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) c.push_back(0.5 * (edges[k] + edges[k + 1]));
  return c;
}

std::vector<int> slot_ids(int I, int J) {
  std::vector<int> ids(I * J);
  for (int s = 0; s < I * J; ++s) ids[s] = s;
  return ids;
}

data::MultigroupXS load(const BenchmarkSpec& spec, const std::string& file) {
  const std::string dir = spec.data_dir.empty() ? default_data_dir() : spec.data_dir;
  return data::read_xs_file(dir + "/" + file);
}

// Octant of the core: reflective x-, y-, z- faces.
fom::Problem takeda(const BenchmarkSpec& spec, bool rodded) {
  using geometry::Face;
  const double h = spec.mesh_scale;
  const auto xe = geometry::graded_edges({0, 5, 15, 20, 25}, h);
  const auto ze = geometry::graded_edges({0, 15, 25}, h);
  // areas: 0 core, 1 rod channel, 2 reflector
  std::vector<int> area;
  const auto xc = centers(xe);
  for (double y : xc)
    for (double x : xc) {
      if (x < 15 && y < 15) area.push_back(0);
      else if (x > 15 && x < 20 && y < 5) area.push_back(1);
      else area.push_back(2);
    }
  std::vector<int> layer;
  for (double z : centers(ze)) layer.push_back(z < 15 ? 0 : 1);
  geometry::BoundarySpec bc;
  for (int ax = 0; ax < 3; ++ax) bc.face[ax] = {Face::Reflective, Face::Vacuum};
  auto mesh = geometry::build_extruded_mesh({xe, xe, area}, {ze, layer}, {3, 2, slot_ids(3, 2)}, bc);
  auto xs = load(spec, rodded ? "takeda1_rodded.xs" : "takeda1_unrodded.xs");
  auto src = fom::uniform_source(mesh, xs.groups, {{0, 0}});
  return {std::move(mesh), std::move(xs), angle::build_product_quadrature(spec.n_polar, spec.n_azim), std::move(src)};
}

// Quarter of a lattice cell, upper half of the pin: reflective radial faces
// and midplane, vacuum beyond the axial reflector.
fom::Problem pin_cell(const BenchmarkSpec& spec) {
  using geometry::Face;
  const double height = spec.pin_height > 0 ? spec.pin_height : pin_height_of(spec.id);
  const double half = 0.5 * kPinPitch;
  const auto xe = geometry::uniform_edges(0, half, cell_count(kPinRadialCells, spec.mesh_scale));
  const auto ze = geometry::graded_edges({0, 0.5 * height, 0.5 * height + kPinReflector},
                                         kPinAxialWidth * spec.mesh_scale);
  // stair-stepped fuel: cells whose center lies inside the pin
  std::vector<int> area;
  const auto xc = centers(xe);
  for (double y : xc)
    for (double x : xc) area.push_back(x * x + y * y < kPinRadius * kPinRadius ? 0 : 1);
  std::vector<int> layer;
  for (double z : centers(ze)) layer.push_back(z < 0.5 * height ? 0 : 1);
  geometry::BoundarySpec bc = geometry::BoundarySpec::all(Face::Reflective);
  bc.face[2][1] = Face::Vacuum;
  auto mesh = geometry::build_extruded_mesh({xe, xe, area}, {ze, layer}, {2, 2, slot_ids(2, 2)}, bc);
  auto xs = load(spec, "c5g7_uo2_pin.xs");
  auto src = fom::uniform_source(mesh, xs.groups, {{0, 0}});
  return {std::move(mesh), std::move(xs), angle::build_product_quadrature(spec.n_polar, spec.n_azim), std::move(src)};
}

}  // namespace

std::string default_data_dir() { return AXPGD_DATA_DIR; }

double pin_height_of(const std::string& id) {
  if (id == "pin-short") return 21.42;
  if (id == "pin-medium") return 42.84;
  if (id == "pin-tall") return 64.26;
  throw ConfigError("not a pin-cell problem: " + id);
}

fom::Problem build_benchmark(const BenchmarkSpec& spec) {
  if (!(spec.mesh_scale > 0)) throw ConfigError("mesh_scale must be positive");
  if (spec.n_polar < 1 || spec.n_azim < 1) throw ConfigError("quadrature orders must be positive");
  if (spec.id == "takeda-rodded") return takeda(spec, true);
  if (spec.id == "takeda-unrodded") return takeda(spec, false);
  if (spec.id.rfind("pin-", 0) == 0) return pin_cell(spec);
  throw ConfigError("unknown problem id: " + spec.id);
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size() && std::isfinite(x)) return x;
  } catch (const std::logic_error&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

Mode to_mode(const std::string& v) {
  if (v == "fom") return Mode::Fom;
  if (v == "pgd") return Mode::Pgd;
  if (v == "svd") return Mode::Svd;
  if (v == "all") return Mode::All;
  throw ConfigError("mode: expected fom, pgd, svd or all, got '" + v + "'");
}

std::vector<pgd::RomVariant> to_variants(const std::string& v) {
  if (v == "all") return pgd::all_variants();
  std::vector<pgd::RomVariant> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(pgd::parse_variant(trim(item)));
    } catch (const ArgumentError& e) {
      throw ConfigError(std::string("variants: ") + e.what());
    }
  }
  if (out.empty()) throw ConfigError("variants: empty list");
  return out;
}

void check_gmres(const std::string& name, const numerics::GmresSettings& g) {
  if (g.restart < 1 || g.max_iters < 1) throw ConfigError(name + ": restart and max_iters must be positive");
  if (!(g.rel_tol > 0) || g.abs_tol < 0) throw ConfigError(name + ": rtol must be positive and atol non-negative");
}

// Maps prefix_{restart,max_iters,atol,rtol} onto a GMRES setting.
bool gmres_key(const std::string& key, const std::string& val, const std::string& prefix,
               numerics::GmresSettings& g) {
  if (key.rfind(prefix, 0) != 0) return false;
  const std::string f = key.substr(prefix.size());
  if (f == "restart") g.restart = to_int(key, val);
  else if (f == "max_iters") g.max_iters = to_int(key, val);
  else if (f == "atol") g.abs_tol = to_double(key, val);
  else if (f == "rtol") g.rel_tol = to_double(key, val);
  else return false;
  return true;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::map<std::string, std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (!seen.emplace(key, val).second) throw ConfigError("duplicate key: " + key);

    if (key == "problem") c.problem.id = val;
    else if (key == "mesh_scale") c.problem.mesh_scale = to_double(key, val);
    else if (key == "pin_height") c.problem.pin_height = to_double(key, val);
    else if (key == "n_polar") c.problem.n_polar = to_int(key, val);
    else if (key == "n_azim") c.problem.n_azim = to_int(key, val);
    else if (key == "data_dir") c.problem.data_dir = val;
    else if (key == "mode") c.mode = to_mode(val);
    else if (key == "variants") c.variants = to_variants(val);
    else if (key == "max_modes") c.pgd.max_modes = to_int(key, val);
    else if (key == "max_nonlinear") c.pgd.max_nonlinear = to_int(key, val);
    else if (key == "nonlinear_tol") c.pgd.nonlinear_tol = to_double(key, val);
    else if (key == "p1_axial") c.pgd.p1_axial = to_bool(key, val);
    else if (key == "output") c.output = val;
    else if (key == "flux_dump") c.flux_dump = val;
    else if (key == "reference") c.reference = val;
    else if (key == "seed") c.seed = static_cast<unsigned>(to_int(key, val));
    else if (gmres_key(key, val, "fom_outer_", c.fom.outer)) {
    } else if (gmres_key(key, val, "fom_inner_", c.fom.inner)) {
    } else if (gmres_key(key, val, "sub_outer_", c.pgd.submodel.outer)) {
    } else if (gmres_key(key, val, "sub_inner_", c.pgd.submodel.inner)) {
    } else throw ConfigError("unknown key: " + key);
  }
  if (c.pgd.max_modes < 0) throw ConfigError("max_modes must be non-negative");
  if (c.pgd.max_nonlinear < 1) throw ConfigError("max_nonlinear must be positive");
  if (!(c.pgd.nonlinear_tol > 0)) throw ConfigError("nonlinear_tol must be positive");
  if (!(c.problem.mesh_scale > 0)) throw ConfigError("mesh_scale must be positive");
  if (c.problem.n_polar < 1 || c.problem.n_azim < 1) throw ConfigError("quadrature orders must be positive");
  check_gmres("fom_outer", c.fom.outer);
  check_gmres("fom_inner", c.fom.inner);
  check_gmres("sub_outer", c.pgd.submodel.outer);
  check_gmres("sub_inner", c.pgd.submodel.inner);
  return c;
}

RunConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// Reports and pipeline

void write_report(std::ostream& out, const std::vector<LabelledReport>& reports) {
  out << kReportHeader << '\n';
  std::ostringstream row;
  for (const auto& r : reports)
    for (const auto& m : r.report.rows) {
      row.str("");
      row << std::setprecision(10) << r.label << ',' << m.M << ',' << m.wall_time_s << ',';
      row << std::setprecision(16) << m.err_angular << ',' << m.err_scalar << ',' << m.residual << ','
          << m.nonlinear_iters;
      out << row.str() << '\n';
    }
}

namespace {

std::string file_label(std::string s) {
  for (char& ch : s)
    if (ch == ':') ch = '_';
  return s;
}

}  // namespace

std::vector<LabelledReport> run(const RunConfig& cfg, std::ostream& log) {
  const fom::Problem p = build_benchmark(cfg.problem);
  const auto space = fom::fom_space(p);
  const auto gw = data::group_weights(p.xs.energy_bounds);
  log << cfg.problem.id << ": " << p.mesh.nx() << 'x' << p.mesh.ny() << 'x' << p.mesh.nz() << " cells, "
      << p.xs.groups << " groups, " << p.quadrature.size() << " ordinates, " << space.size() << " unknowns\n";

  Vec psi, phi;
  if (!cfg.reference.empty()) {
    const auto f = fom::read_flux(cfg.reference);
    if (f.values.size() != space.size()) throw ConfigError("reference flux does not match the configured problem");
    psi = f.values;
    log << "reference read from " << cfg.reference << '\n';
  } else {
    const auto ref = fom::solve_fom(p, cfg.fom);
    psi = ref.psi;
    log << "full-order solve: " << ref.iterations << " iterations, " << ref.wall_time_s << " s\n";
  }
  phi = fom::scalar_flux(space, psi);
  if (!cfg.flux_dump.empty()) fom::write_flux(cfg.flux_dump + "_fom.bin", fom::make_flux_file("fom", space, gw, psi));

  std::vector<LabelledReport> reports;
  if (cfg.mode != Mode::Fom)
    for (const auto& v : cfg.variants) {
      if (cfg.mode == Mode::Pgd || cfg.mode == Mode::All) {
        pgd::SeparatedFlux f;
        auto rep = pgd::run_pgd(p, v, cfg.pgd, {&psi, &phi}, &f);
        log << v.name() << ": " << rep.rows.size() << " modes";
        if (!rep.rows.empty())
          log << ", error " << rep.rows.back().err_angular << ", " << rep.rows.back().wall_time_s << " s";
        if (rep.exhausted) log << ", basis exhausted";
        if (rep.unconverged_solves > 0) log << ", " << rep.unconverged_solves << " unconverged submodel solves";
        log << '\n';
        if (!cfg.flux_dump.empty()) {
          const auto d = pgd::decompose(p, v);
          fom::write_flux(cfg.flux_dump + "_" + file_label(v.name()) + ".bin",
                          fom::make_flux_file("rom", space, gw, pgd::reconstruct(d, f)));
        }
        reports.push_back({v.name(), std::move(rep)});
      }
      if (cfg.mode == Mode::Svd || cfg.mode == Mode::All) {
        auto rep = svdref::run_svd(p, v, psi, cfg.pgd.max_modes);
        log << "svd:" << v.name() << ": " << rep.rows.size() << " modes\n";
        reports.push_back({"svd:" + v.name(), std::move(rep)});
      }
    }
  if (!cfg.output.empty()) {
    std::ofstream out(cfg.output);
    if (!out) throw ConfigError("cannot write report " + cfg.output);
    write_report(out, reports);
  }
  return reports;
}

}  // namespace axpgd::bench
