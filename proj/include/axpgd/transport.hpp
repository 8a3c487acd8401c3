#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "axpgd/angle.hpp"

namespace axpgd::numerics {

using Vec = Eigen::VectorXd;

// Tensor-product grid of dimension 1..3 given by cell widths per axis. Cell
// c = c0 + n0 * (c1 + n1 * c2); local node nu = b0 + 2 b1 + 4 b2 with b the
// low (0) / high (1) vertex bit along each axis.
struct CartesianGrid {
  std::vector<std::vector<double>> widths;

  int dim() const { return static_cast<int>(widths.size()); }
  int n(int axis) const { return static_cast<int>(widths[axis].size()); }
  int num_cells() const;
  int nodes_per_cell() const { return 1 << dim(); }
};

// Discrete directions with their streaming velocity per grid axis, the
// ordinate reflected across a plane normal to each axis, and the factor
// multiplying the angle-dependent leakage cross section.
struct OrdinateSet {
  std::vector<double> weight;
  std::vector<std::vector<double>> velocity;  // [axis][n]
  std::vector<std::vector<int>> mirror;       // [axis][n]
  std::vector<double> leakage_factor;         // [n]

  int size() const { return static_cast<int>(weight.size()); }
};

// Ordinates of the full sphere streaming along x, y, z.
OrdinateSet sphere_ordinates(const angle::AngularQuadrature& q);
// Unit-circle directions (cos w, sin w) in the radial plane.
OrdinateSet circle_ordinates(const angle::AngularQuadrature& q);
// Polar nodes streaming along one axis with velocity mu; leakage factor
// sqrt(1 - mu^2).
OrdinateSet polar_line_ordinates(const angle::AngularQuadrature& q);
// Upper-hemisphere ordinates streaming in the radial plane with velocity
// sqrt(1 - mu^2) (cos w, sin w); leakage factor mu.
OrdinateSet hemisphere_ordinates(const angle::AngularQuadrature& hemisphere);
// alpha = -1, +1 streaming along one axis with unit speed.
OrdinateSet sign_ordinates();

struct PhaseSpace {
  CartesianGrid grid;
  OrdinateSet ordinates;
  int groups = 1;
  std::vector<int> region_of_cell;
  std::array<std::array<bool, 2>, 3> reflective{};  // [axis][side]

  int num_regions() const;
  int group_size() const { return ordinates.size() * grid.num_cells() * grid.nodes_per_cell(); }
  int size() const { return groups * group_size(); }
  int index(int g, int n, int c, int nu) const {
    return ((g * ordinates.size() + n) * grid.num_cells() + c) * grid.nodes_per_cell() + nu;
  }
};

// Scattering source (S psi)_{g,n} = sum_h Y(h,n) sum_g' kappa[h][r](g,g') phi_{h,g'}
// with moments phi_h = sum_n W(h,n) psi_n.
struct ScatterKernel {
  Eigen::MatrixXd Y;                                 // H x N
  Eigen::MatrixXd W;                                 // H x N
  std::vector<std::vector<Eigen::MatrixXd>> kappa;   // [h][region], G x G (to, from)

  int num_moments() const { return static_cast<int>(Y.rows()); }
};

struct Coefficients {
  std::vector<double> streaming;        // per group, scales the streaming form
  std::vector<Eigen::VectorXd> total;   // [region](g)
  std::vector<double> leakage;          // per group, times the ordinate leakage factor
  ScatterKernel kernel;
};

// Discontinuous piecewise-linear upwind discretization of
//   c_g Omega.grad psi + (sigma_g + tau_g f_n) psi - S psi = q.
// The operator is split as A = T - K with T the sweepable part (streaming,
// collision, interior upwinding and the reflective couplings to ordinates
// swept earlier) and K = scattering + the remaining reflective couplings.
// Weak-form (dual) vectors hold integrals against the nodal basis; fields are
// nodal values.
class TransportOperator {
 public:
  // Without factorization only the apply methods are available.
  TransportOperator(PhaseSpace space, Coefficients coef, bool factorize = true);
  ~TransportOperator();
  TransportOperator(TransportOperator&&) noexcept;
  TransportOperator& operator=(TransportOperator&&) noexcept;

  const PhaseSpace& space() const { return space_; }
  const Coefficients& coefficients() const { return coef_; }
  int size() const { return space_.size(); }
  int group_size() const { return space_.group_size(); }
  int groups() const { return space_.groups; }

  Vec apply(const Vec& psi) const;
  Vec apply_T(const Vec& psi) const;
  Vec apply_K(const Vec& psi) const;
  Vec mass(const Vec& field) const;

  // x_g = T_g^{-1} b_g for one group block.
  void sweep_group(int g, const double* b, double* x) const;
  Vec sweep(const Vec& b) const;

  // out_g += sum_{g' in [from_lo, from_hi)} S_{g<-g'} psi_g', plus the lagged
  // reflective coupling of group g when it lies in the range.
  void add_K_group(int g, const Vec& psi, int from_lo, int from_hi, double* out) const;

  // Ordinates in sweep order, and whether each reflective inflow of an
  // ordinate is handled inside the sweep.
  const std::vector<int>& sweep_order() const { return order_; }

  // sum_n w_n psi_n per group and node: G * C * K values.
  Vec scalar_flux(const Vec& psi) const;

  struct Impl;

 private:
  PhaseSpace space_;
  Coefficients coef_;
  std::vector<int> order_;
  std::unique_ptr<Impl> impl_;
};

// Nodal field with a constant value q_g / (sum of ordinate weights) per group
// in the cells of the selected regions: an isotropic source of density q_g.
Vec isotropic_source(const PhaseSpace& space, const std::vector<double>& q_per_group,
                     const std::vector<bool>& region_mask);

}  // namespace axpgd::numerics

namespace axpgd::numerics {

// Element mass matrix of cell c (K x K).
Eigen::MatrixXd cell_mass(const CartesianGrid& grid, int c);

// sum over cells of a_c^T M_c b_c for one block of C * K nodal values.
double mass_inner(const CartesianGrid& grid, const double* a, const double* b);

}  // namespace axpgd::numerics
