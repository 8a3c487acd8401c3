#include "axpgd/fom3d.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include <json.hpp>

namespace axpgd::fom {

using std::numbers::pi;

FixedSource uniform_source(const geometry::ExtrudedMesh& mesh, int groups,
                           const std::vector<std::pair<int, int>>& slots) {
  FixedSource s;
  s.density.assign(mesh.num_areas() * mesh.num_layers(), std::vector<double>(groups, 0.0));
  for (auto [i, j] : slots) {
    if (i < 0 || i >= mesh.num_areas() || j < 0 || j >= mesh.num_layers())
      throw GeometryError("source slot outside the mesh");
    s.density[i * mesh.num_layers() + j].assign(groups, 1.0);
  }
  return s;
}

numerics::PhaseSpace fom_space(const Problem& p) {
  numerics::PhaseSpace sp;
  const auto& m = p.mesh;
  sp.grid.widths = {m.x_widths(), m.y_widths(), m.z_widths()};
  sp.ordinates = numerics::sphere_ordinates(p.quadrature);
  sp.groups = p.xs.groups;
  sp.region_of_cell.resize(m.num_cells());
  for (int c = 0; c < m.num_cells(); ++c) sp.region_of_cell[c] = m.region_of_cell(c);
  for (int a = 0; a < 3; ++a)
    for (int s = 0; s < 2; ++s) sp.reflective[a][s] = m.boundary().at(a, s) == geometry::Face::Reflective;
  return sp;
}

numerics::ScatterKernel sphere_kernel(const angle::AngularQuadrature& q,
                                      const std::vector<data::Material>& regions, int order) {
  numerics::ScatterKernel k;
  const auto idx = angle::harmonic_indices(order);
  const int H = static_cast<int>(idx.size()), N = q.size();
  k.Y.resize(H, N);
  k.W.resize(H, N);
  for (int h = 0; h < H; ++h)
    for (int n = 0; n < N; ++n) {
      k.Y(h, n) = angle::eval_harmonic(idx[h], q.mu[n], q.omega[n]);
      k.W(h, n) = q.weight[n] * k.Y(h, n);
    }
  k.kappa.assign(H, {});
  for (int h = 0; h < H; ++h)
    for (const auto& mat : regions)
      k.kappa[h].push_back((2 * idx[h].l + 1) / (4 * pi) * mat.scatter[idx[h].l].transpose());
  return k;
}

numerics::Coefficients fom_coefficients(const Problem& p) {
  p.xs.validate();
  if (p.xs.num_areas != p.mesh.num_areas() || p.xs.num_layers != p.mesh.num_layers())
    throw MaterialError("cross sections do not match the mesh areas and layers");
  numerics::Coefficients co;
  co.streaming.assign(p.xs.groups, 1.0);
  co.leakage.assign(p.xs.groups, 0.0);
  for (const auto& m : p.xs.slots) co.total.push_back(m.total);
  co.kernel = sphere_kernel(p.quadrature, p.xs.slots, p.xs.order);
  return co;
}

Vec source_field(const Problem& p, const numerics::PhaseSpace& space) {
  const int G = space.groups, N = space.ordinates.size(), C = space.grid.num_cells();
  const int K = space.grid.nodes_per_cell();
  if (static_cast<int>(p.source.density.size()) != p.mesh.num_areas() * p.mesh.num_layers())
    throw ShapeError("source must give a density for every slot");
  Vec q = Vec::Zero(space.size());
  for (int g = 0; g < G; ++g)
    for (int c = 0; c < C; ++c) {
      const double v = p.source.density[space.region_of_cell[c]][g] / (4 * pi);
      if (v == 0) continue;
      for (int n = 0; n < N; ++n)
        for (int nu = 0; nu < K; ++nu) q[space.index(g, n, c, nu)] = v;
    }
  return q;
}

numerics::TransportSolveSettings fom_settings() {
  numerics::TransportSolveSettings s;
  s.outer = {5, 2000, 0, 1e-6};
  s.inner = {15, 250, 1e-6, 1e-2};
  return s;
}

ReferenceSolution solve_fom(const Problem& p, const numerics::TransportSolveSettings& s) {
  const auto space = fom_space(p);
  const numerics::TransportOperator op(space, fom_coefficients(p));
  const Vec q = source_field(p, space);
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = numerics::solve_transport(op, op.mass(q), s);
  const auto t1 = std::chrono::steady_clock::now();
  ReferenceSolution out;
  out.psi = r.psi;
  out.phi = op.scalar_flux(r.psi);
  out.iterations = r.outer.iterations;
  out.converged = r.outer.converged;
  out.residuals = r.outer.residuals;
  out.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  if (!out.converged)
    throw FomConvergenceError("full-order solve did not converge in " + std::to_string(out.iterations) +
                                  " iterations",
                              out);
  return out;
}

double angular_norm2(const numerics::PhaseSpace& space, const std::vector<double>& group_w,
                     const Vec& psi) {
  if (psi.size() != space.size()) throw ShapeError("angular norm: size mismatch");
  const int N = space.ordinates.size();
  const std::size_t blk = static_cast<std::size_t>(space.grid.num_cells()) * space.grid.nodes_per_cell();
  double s = 0;
  for (int g = 0; g < space.groups; ++g)
    for (int n = 0; n < N; ++n) {
      const double* a = psi.data() + (static_cast<std::size_t>(g) * N + n) * blk;
      s += group_w[g] * space.ordinates.weight[n] * numerics::mass_inner(space.grid, a, a);
    }
  return s;
}

double scalar_norm2(const numerics::PhaseSpace& space, const std::vector<double>& group_w,
                    const Vec& phi) {
  const std::size_t blk = static_cast<std::size_t>(space.grid.num_cells()) * space.grid.nodes_per_cell();
  if (phi.size() != static_cast<Eigen::Index>(blk * space.groups)) throw ShapeError("scalar norm: size mismatch");
  double s = 0;
  for (int g = 0; g < space.groups; ++g) {
    const double* a = phi.data() + g * blk;
    s += group_w[g] * numerics::mass_inner(space.grid, a, a);
  }
  return s;
}

Vec scalar_flux(const numerics::PhaseSpace& space, const Vec& psi) {
  const int N = space.ordinates.size();
  const Eigen::Index blk = static_cast<Eigen::Index>(space.grid.num_cells()) * space.grid.nodes_per_cell();
  Vec phi = Vec::Zero(blk * space.groups);
  for (int g = 0; g < space.groups; ++g)
    for (int n = 0; n < N; ++n)
      phi.segment(g * blk, blk) += space.ordinates.weight[n] * psi.segment((g * N + n) * blk, blk);
  return phi;
}

namespace {

void write_le(std::ofstream& out, const Vec& v) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  } else {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      auto u = std::bit_cast<std::uint64_t>(v[i]);
      u = __builtin_bswap64(u);
      out.write(reinterpret_cast<const char*>(&u), sizeof u);
    }
  }
}

}  // namespace

FluxFile make_flux_file(const std::string& kind, const numerics::PhaseSpace& space,
                        const std::vector<double>& group_w, const Vec& psi) {
  FluxFile f;
  f.kind = kind;
  f.groups = space.groups;
  f.ordinates = space.ordinates.size();
  f.cells = space.grid.num_cells();
  f.nodes_per_cell = space.grid.nodes_per_cell();
  f.ordinate_weights = space.ordinates.weight;
  f.group_weights = group_w;
  f.cell_widths = space.grid.widths;
  f.values = psi;
  return f;
}

void write_flux(const std::string& path, const FluxFile& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write flux file " + path);
  write_le(out, f.values);
  nlohmann::json j;
  j["kind"] = f.kind;
  j["dtype"] = "float64";
  j["byte_order"] = "little";
  j["order"] = {"g", "n", "c", "nu"};
  j["sizes"] = {{"g", f.groups}, {"n", f.ordinates}, {"c", f.cells}, {"nu", f.nodes_per_cell}};
  j["ordinate_weights"] = f.ordinate_weights;
  j["group_weights"] = f.group_weights;
  j["cell_widths"] = f.cell_widths;
  j["cell_index"] = "cx + nx * (cy + ny * cz)";
  j["node_index"] = "bx + 2 by + 4 bz";
  std::ofstream side(path + ".json");
  side << j.dump(2) << '\n';
}

FluxFile read_flux(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) throw ArgumentError("missing flux sidecar " + path + ".json");
  nlohmann::json j;
  try {
    side >> j;
  } catch (const std::exception& e) {
    throw DataError("bad flux sidecar: " + std::string(e.what()));
  }
  FluxFile f;
  try {
    f.kind = j.at("kind");
    f.groups = j.at("sizes").at("g");
    f.ordinates = j.at("sizes").at("n");
    f.cells = j.at("sizes").at("c");
    f.nodes_per_cell = j.at("sizes").at("nu");
    f.ordinate_weights = j.at("ordinate_weights").get<std::vector<double>>();
    f.group_weights = j.at("group_weights").get<std::vector<double>>();
    f.cell_widths = j.at("cell_widths").get<std::vector<std::vector<double>>>();
  } catch (const std::exception& e) {
    throw DataError("bad flux sidecar: " + std::string(e.what()));
  }
  const std::size_t n = static_cast<std::size_t>(f.groups) * f.ordinates * f.cells * f.nodes_per_cell;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot read flux file " + path);
  f.values.resize(static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != n * sizeof(double)) throw DataError("flux file shorter than its sidecar");
  if constexpr (std::endian::native != std::endian::little)
    for (Eigen::Index i = 0; i < f.values.size(); ++i)
      f.values[i] = std::bit_cast<double>(__builtin_bswap64(std::bit_cast<std::uint64_t>(f.values[i])));
  return f;
}

FluxComparison compare_flux(const FluxFile& a, const FluxFile& b) {
  if (a.groups != b.groups || a.ordinates != b.ordinates || a.cells != b.cells ||
      a.nodes_per_cell != b.nodes_per_cell || a.cell_widths != b.cell_widths)
    throw ShapeError("flux files describe different grids");
  numerics::PhaseSpace sp;
  sp.grid.widths = a.cell_widths;
  sp.groups = a.groups;
  sp.ordinates.weight = a.ordinate_weights;
  const Vec diff = b.values - a.values;
  FluxComparison c;
  c.angular = std::sqrt(angular_norm2(sp, a.group_weights, diff) / angular_norm2(sp, a.group_weights, a.values));
  const Vec pa = scalar_flux(sp, a.values), pd = scalar_flux(sp, diff);
  c.scalar = std::sqrt(scalar_norm2(sp, a.group_weights, pd) / scalar_norm2(sp, a.group_weights, pa));
  return c;
}

}  // namespace axpgd::fom
