#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace axpgd::data {

// Cross sections of one homogeneous material. scatter[l](g_from, g_to) is the
// l-th Legendre moment of the g_from -> g_to transfer cross section (cm^-1).
struct Material {
  std::string name;
  Eigen::VectorXd total;
  std::vector<Eigen::MatrixXd> scatter;
};

// Multigroup data for every (area, layer) slot of an extruded mesh. Slot
// i * num_layers + j holds the material of radial area i and axial layer j.
struct MultigroupXS {
  int groups = 0;
  int order = 0;  // scattering order L
  int num_areas = 0;
  int num_layers = 0;
  std::vector<double> energy_bounds;  // groups + 1 values, descending (eV)
  std::vector<Material> slots;

  const Material& at(int area, int layer) const { return slots[area * num_layers + layer]; }
  void validate() const;
};

// Lethargy width ln(E_{g-1}/E_g) of every group.
using LethargyWidths = std::vector<double>;

LethargyWidths lethargy_widths(const std::vector<double>& energy_bounds);

// Reciprocal lethargy widths, the group weights of the energy inner product.
std::vector<double> group_weights(const std::vector<double>& energy_bounds);

// Plain-text format: optional '#' comment lines, a header "G L I J", a line of
// G+1 descending energy bounds, then for each slot (i outer, j inner) G
// total cross sections followed by L+1 G x G scattering matrices with rows
// indexed by the source group.
MultigroupXS read_xs(std::istream& in);
MultigroupXS read_xs_file(const std::string& path);
void write_xs(std::ostream& out, const MultigroupXS& xs);

// Repackages named materials into per-slot data using a material table.
MultigroupXS assemble_xs(const std::vector<Material>& materials,
                         const std::vector<double>& energy_bounds, int order,
                         int num_areas, int num_layers, const std::vector<int>& material_ids);

}  // namespace axpgd::data
