#include <doctest.h>

#include "axpgd/errors.hpp"
#include "axpgd/geometry.hpp"

using namespace axpgd;
using namespace axpgd::geometry;

namespace {

ExtrudedMesh small_mesh() {
  RadialSpec r{{0, 1, 2}, {0, 1}, {0, 1}};
  AxialSpec a{{0, 0.5, 1.5, 2}, {0, 1, 1}};
  MaterialTable m{2, 2, {0, 1, 2, 3}};
  return build_extruded_mesh(r, a, m);
}

}  // namespace

TEST_CASE("extruded mesh indexing") {
  const auto mesh = small_mesh();
  CHECK(mesh.num_radial_cells() == 2);
  CHECK(mesh.num_axial_cells() == 3);
  CHECK(mesh.num_cells() == 6);
  CHECK(mesh.height() == doctest::Approx(2));
  // cell 5 = radial 1 + 2 * axial 2
  CHECK(mesh.region_of_cell(5) == 1 * 2 + 1);
  CHECK(mesh.material_of_cell(5) == 3);
  CHECK(mesh.material_of_cell(0) == 0);
}

TEST_CASE("mesh validation") {
  RadialSpec r{{0, 1, 1}, {0, 1}, {0, 0}};
  AxialSpec a{{0, 1}, {0}};
  MaterialTable m{1, 1, {0}};
  CHECK_THROWS_AS(build_extruded_mesh(r, a, m), GeometryError);
  r.x_edges = {0, 2, 1};
  CHECK_THROWS_AS(build_extruded_mesh(r, a, m), GeometryError);
  r.x_edges = {0, 1, 2};
  MaterialTable hole{1, 1, {-1}};
  CHECK_THROWS_AS(build_extruded_mesh(r, a, hole), MaterialError);
  r.area_of_cell = {0, 3};
  CHECK_THROWS_AS(build_extruded_mesh(r, a, m), GeometryError);
}

TEST_CASE("indicator masks partition the grids") {
  const auto mesh = small_mesh();
  const auto masks = indicator_masks(mesh);
  for (int c = 0; c < mesh.num_radial_cells(); ++c) {
    int hits = 0;
    for (const auto& m : masks.radial) hits += m[c];
    CHECK(hits == 1);
  }
  for (int c = 0; c < mesh.num_axial_cells(); ++c) {
    int hits = 0;
    for (const auto& m : masks.axial) hits += m[c];
    CHECK(hits == 1);
  }
}

TEST_CASE("graded edges") {
  const auto e = graded_edges({0, 15, 25}, 2.0);
  CHECK(e.front() == 0);
  CHECK(e.back() == 25);
  bool has15 = false;
  for (std::size_t k = 1; k < e.size(); ++k) {
    CHECK(e[k] - e[k - 1] <= 2.0 + 1e-12);
    has15 |= std::abs(e[k] - 15) < 1e-12;
  }
  CHECK(has15);
}
