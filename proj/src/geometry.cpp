#include "axpgd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "axpgd/errors.hpp"

namespace axpgd::geometry {

namespace {

void check_edges(const std::vector<double>& edges, const char* axis) {
  if (edges.size() < 2)
    throw GeometryError(std::string("axis ") + axis + " needs at least one cell");
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (!(edges[k] > edges[k - 1]))
      throw GeometryError(std::string("axis ") + axis +
                          " edges must be strictly increasing (overlap or gap at edge " +
                          std::to_string(k) + ")");
  }
  if (!std::isfinite(edges.front()) || !std::isfinite(edges.back()))
    throw GeometryError(std::string("axis ") + axis + " has non-finite edges");
}

std::vector<double> widths_of(const std::vector<double>& edges) {
  std::vector<double> w(edges.size() - 1);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) w[k] = edges[k + 1] - edges[k];
  return w;
}

}  // namespace

BoundarySpec BoundarySpec::all(Face f) {
  BoundarySpec b;
  for (auto& axis : b.face) axis = {f, f};
  return b;
}

ExtrudedMesh::ExtrudedMesh(RadialSpec radial, AxialSpec axial,
                           MaterialTable materials, BoundarySpec bc)
    : radial_(std::move(radial)),
      axial_(std::move(axial)),
      materials_(std::move(materials)),
      bc_(bc) {
  check_edges(radial_.x_edges, "x");
  check_edges(radial_.y_edges, "y");
  check_edges(axial_.z_edges, "z");
  if (static_cast<int>(radial_.area_of_cell.size()) != num_radial_cells())
    throw GeometryError("radial area map must have one entry per radial cell");
  if (static_cast<int>(axial_.layer_of_cell.size()) != num_axial_cells())
    throw GeometryError("axial layer map must have one entry per axial cell");
  if (materials_.num_areas <= 0 || materials_.num_layers <= 0 ||
      static_cast<int>(materials_.ids.size()) != materials_.num_areas * materials_.num_layers)
    throw MaterialError("material table must be num_areas x num_layers");
  for (int a : radial_.area_of_cell)
    if (a < 0 || a >= materials_.num_areas)
      throw GeometryError("radial cell assigned to unknown area " + std::to_string(a));
  for (int l : axial_.layer_of_cell)
    if (l < 0 || l >= materials_.num_layers)
      throw GeometryError("axial cell assigned to unknown layer " + std::to_string(l));
  for (int i = 0; i < materials_.num_areas; ++i)
    for (int j = 0; j < materials_.num_layers; ++j)
      if (materials_.at(i, j) < 0)
        throw MaterialError("no material for area " + std::to_string(i) + ", layer " +
                            std::to_string(j));
}

std::vector<double> ExtrudedMesh::x_widths() const { return widths_of(radial_.x_edges); }
std::vector<double> ExtrudedMesh::y_widths() const { return widths_of(radial_.y_edges); }
std::vector<double> ExtrudedMesh::z_widths() const { return widths_of(axial_.z_edges); }

int ExtrudedMesh::material_of_cell(int cell3d) const {
  const int n2 = num_radial_cells();
  return material(area_of(cell3d % n2), layer_of(cell3d / n2));
}

int ExtrudedMesh::region_of_cell(int cell3d) const {
  const int n2 = num_radial_cells();
  return area_of(cell3d % n2) * num_layers() + layer_of(cell3d / n2);
}

ExtrudedMesh build_extruded_mesh(RadialSpec radial, AxialSpec axial,
                                 MaterialTable materials, BoundarySpec bc) {
  return ExtrudedMesh(std::move(radial), std::move(axial), std::move(materials), bc);
}

IndicatorMasks indicator_masks(const ExtrudedMesh& mesh) {
  IndicatorMasks m;
  m.radial.assign(mesh.num_areas(), std::vector<bool>(mesh.num_radial_cells(), false));
  m.axial.assign(mesh.num_layers(), std::vector<bool>(mesh.num_axial_cells(), false));
  for (int c = 0; c < mesh.num_radial_cells(); ++c) m.radial[mesh.area_of(c)][c] = true;
  for (int c = 0; c < mesh.num_axial_cells(); ++c) m.axial[mesh.layer_of(c)][c] = true;
  return m;
}

std::vector<double> uniform_edges(double lo, double hi, int n) {
  if (n < 1 || !(hi > lo)) throw GeometryError("uniform_edges: need n >= 1 and hi > lo");
  std::vector<double> e(n + 1);
  for (int k = 0; k <= n; ++k) e[k] = lo + (hi - lo) * k / n;
  e.back() = hi;
  return e;
}

std::vector<double> graded_edges(std::vector<double> breakpoints, double max_width) {
  if (breakpoints.size() < 2 || !(max_width > 0))
    throw GeometryError("graded_edges: need two breakpoints and positive width");
  std::sort(breakpoints.begin(), breakpoints.end());
  std::vector<double> e{breakpoints.front()};
  for (std::size_t k = 1; k < breakpoints.size(); ++k) {
    const double lo = e.back();
    const double hi = breakpoints[k];
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) continue;
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_width - 1e-9)));
    for (int s = 1; s <= n; ++s) e.push_back(s == n ? hi : lo + (hi - lo) * s / n);
  }
  return e;
}

}  // namespace axpgd::geometry
