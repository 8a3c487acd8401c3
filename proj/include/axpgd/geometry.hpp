#pragma once

#include <array>
#include <vector>

namespace axpgd::geometry {

enum class Face { Vacuum, Reflective };

// Axis order x, y, z; side 0 is the low face, side 1 the high face.
struct BoundarySpec {
  std::array<std::array<Face, 2>, 3> face{{{Face::Vacuum, Face::Vacuum},
                                           {Face::Vacuum, Face::Vacuum},
                                           {Face::Vacuum, Face::Vacuum}}};

  Face at(int axis, int side) const { return face[axis][side]; }
  static BoundarySpec all(Face f);
};

// Radial plane: Cartesian grid given by edge coordinates, one area index per
// cell (cell = ix + nx * iy).
struct RadialSpec {
  std::vector<double> x_edges;
  std::vector<double> y_edges;
  std::vector<int> area_of_cell;
};

struct AxialSpec {
  std::vector<double> z_edges;
  std::vector<int> layer_of_cell;
};

// material(i, j) for radial area i and axial layer j; -1 marks a hole.
struct MaterialTable {
  int num_areas = 0;
  int num_layers = 0;
  std::vector<int> ids;  // i * num_layers + j

  int at(int area, int layer) const { return ids[area * num_layers + layer]; }
};

// Extruded domain D2 x [0, h]. The 3D cell index is c2 + n2 * cz and the 3D
// mesh is exactly the tensor product of the radial and axial grids.
class ExtrudedMesh {
 public:
  ExtrudedMesh(RadialSpec radial, AxialSpec axial, MaterialTable materials,
               BoundarySpec bc);

  int nx() const { return static_cast<int>(radial_.x_edges.size()) - 1; }
  int ny() const { return static_cast<int>(radial_.y_edges.size()) - 1; }
  int nz() const { return static_cast<int>(axial_.z_edges.size()) - 1; }
  int num_radial_cells() const { return nx() * ny(); }
  int num_axial_cells() const { return nz(); }
  int num_cells() const { return num_radial_cells() * num_axial_cells(); }
  int num_areas() const { return materials_.num_areas; }
  int num_layers() const { return materials_.num_layers; }
  double height() const { return axial_.z_edges.back() - axial_.z_edges.front(); }

  std::vector<double> x_widths() const;
  std::vector<double> y_widths() const;
  std::vector<double> z_widths() const;
  const std::vector<double>& x_edges() const { return radial_.x_edges; }
  const std::vector<double>& y_edges() const { return radial_.y_edges; }
  const std::vector<double>& z_edges() const { return axial_.z_edges; }

  int area_of(int radial_cell) const { return radial_.area_of_cell[radial_cell]; }
  int layer_of(int axial_cell) const { return axial_.layer_of_cell[axial_cell]; }
  const std::vector<int>& areas() const { return radial_.area_of_cell; }
  const std::vector<int>& layers() const { return axial_.layer_of_cell; }
  int material(int area, int layer) const { return materials_.at(area, layer); }
  int material_of_cell(int cell3d) const;
  // Material slot index used for 3D regions: area * J + layer.
  int region_of_cell(int cell3d) const;

  const BoundarySpec& boundary() const { return bc_; }
  const MaterialTable& materials() const { return materials_; }

 private:
  RadialSpec radial_;
  AxialSpec axial_;
  MaterialTable materials_;
  BoundarySpec bc_;
};

ExtrudedMesh build_extruded_mesh(RadialSpec radial, AxialSpec axial,
                                 MaterialTable materials, BoundarySpec bc = {});

struct IndicatorMasks {
  std::vector<std::vector<bool>> radial;  // [area][radial cell]
  std::vector<std::vector<bool>> axial;   // [layer][axial cell]
};

IndicatorMasks indicator_masks(const ExtrudedMesh& mesh);

// Edges of a uniform grid [lo, hi] split into n cells.
std::vector<double> uniform_edges(double lo, double hi, int n);

// Merges breakpoints and subdivides every interval so that no cell exceeds
// max_width. Breakpoints must lie inside [lo, hi].
std::vector<double> graded_edges(std::vector<double> breakpoints, double max_width);

}  // namespace axpgd::geometry
