#pragma once

#include <string>
#include <vector>

#include "axpgd/angle.hpp"
#include "axpgd/data.hpp"
#include "axpgd/errors.hpp"
#include "axpgd/geometry.hpp"
#include "axpgd/krylov.hpp"
#include "axpgd/transport.hpp"

namespace axpgd::fom {

using numerics::Vec;

// Isotropic volumetric source density q[slot][g] per (area, layer) slot,
// slot = area * J + layer (neutrons / cm^3 / s, integrated over angle).
struct FixedSource {
  std::vector<std::vector<double>> density;
};

FixedSource uniform_source(const geometry::ExtrudedMesh& mesh, int groups,
                           const std::vector<std::pair<int, int>>& slots);

// A 3D fixed-source problem.
struct Problem {
  geometry::ExtrudedMesh mesh;
  data::MultigroupXS xs;
  angle::AngularQuadrature quadrature;
  FixedSource source;
};

numerics::PhaseSpace fom_space(const Problem& p);
numerics::Coefficients fom_coefficients(const Problem& p);
// Real spherical-harmonic kernel up to order L over the sphere ordinates.
numerics::ScatterKernel sphere_kernel(const angle::AngularQuadrature& q,
                                      const std::vector<data::Material>& regions, int order);
// Nodal source field q / 4 pi on the 3D phase space.
Vec source_field(const Problem& p, const numerics::PhaseSpace& space);

struct ReferenceSolution {
  Vec psi;      // (g, n, c, nu)
  Vec phi;      // (g, c, nu)
  int iterations = 0;
  double wall_time_s = 0;
  bool converged = false;
  std::vector<double> residuals;
};

class FomConvergenceError : public NumericalError {
 public:
  FomConvergenceError(const std::string& what, ReferenceSolution best)
      : NumericalError(what), best_(std::move(best)) {}
  const ReferenceSolution& best() const { return best_; }

 private:
  ReferenceSolution best_;
};

numerics::TransportSolveSettings fom_settings();

ReferenceSolution solve_fom(const Problem& p,
                            const numerics::TransportSolveSettings& s = fom_settings());

// Weighted squared L2 norms: ordinate weights, element masses and the
// group weights (reciprocal lethargy widths).
double angular_norm2(const numerics::PhaseSpace& space, const std::vector<double>& group_w,
                     const Vec& psi);
double scalar_norm2(const numerics::PhaseSpace& space, const std::vector<double>& group_w,
                    const Vec& phi);
Vec scalar_flux(const numerics::PhaseSpace& space, const Vec& psi);

// Flat little-endian float64 array plus a JSON sidecar (path + ".json").
struct FluxFile {
  std::string kind;  // "fom" or "rom"
  int groups = 0, ordinates = 0, cells = 0, nodes_per_cell = 0;
  std::vector<double> ordinate_weights;
  std::vector<double> group_weights;
  std::vector<std::vector<double>> cell_widths;  // per axis
  Vec values;
};

void write_flux(const std::string& path, const FluxFile& f);
FluxFile read_flux(const std::string& path);
FluxFile make_flux_file(const std::string& kind, const numerics::PhaseSpace& space,
                        const std::vector<double>& group_w, const Vec& psi);

struct FluxComparison {
  double angular = 0;  // relative weighted L2 error of b against a
  double scalar = 0;
};
FluxComparison compare_flux(const FluxFile& reference, const FluxFile& approx);

}  // namespace axpgd::fom
