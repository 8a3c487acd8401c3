#pragma once

#include <memory>
#include <string>
#include <vector>

#include "axpgd/data.hpp"
#include "axpgd/fom3d.hpp"
#include "axpgd/krylov.hpp"
#include "axpgd/transport.hpp"

namespace axpgd::pgd {

using numerics::Vec;

// Axial-polar: radial modes on the circle, axial modes in (z, mu).
// Axial: radial modes on the upper hemisphere, axial modes in (z, alpha).
enum class Split { AxialPolar, Axial };
enum class EnergyMode { BothMultigroup, RadialOnly, AxialOnly };

struct RomVariant {
  Split split = Split::AxialPolar;
  EnergyMode energy = EnergyMode::BothMultigroup;

  bool radial_multigroup() const { return energy != EnergyMode::AxialOnly; }
  bool axial_multigroup() const { return energy != EnergyMode::RadialOnly; }
  // e.g. "axial-polar:both", "axial:radial-only"
  std::string name() const;
};

RomVariant parse_variant(const std::string& name);
std::vector<RomVariant> all_variants();

enum class Side { Radial, Axial };
inline Side opposite(Side s) { return s == Side::Radial ? Side::Axial : Side::Radial; }

// Scattering kernel layout of one side: the moments it carries, and for each
// moment the (opposite-side moment, Legendre degree) pairs it collects.
struct KernelLayout {
  Eigen::MatrixXd Y, W;                                  // H x N
  Eigen::MatrixXd partner_W;                             // T x N_opposite
  std::vector<std::vector<std::pair<int, int>>> couple;  // [h] -> (t, l)
};

// Radial and axial factor spaces of a split of one 3D problem.
struct Decomposition {
  RomVariant variant;
  int groups = 0;
  std::vector<double> group_weight;  // 1 / lethargy width
  data::MultigroupXS xs;
  numerics::PhaseSpace radial, axial, full;
  std::vector<int> radial_ordinate, axial_ordinate;  // per 3D ordinate
  KernelLayout radial_kernel, axial_kernel;
  std::vector<Eigen::MatrixXd> radial_mass, axial_mass;  // per cell
  std::shared_ptr<const numerics::TransportOperator> radial_stream, axial_stream;

  const numerics::PhaseSpace& space(Side s) const { return s == Side::Radial ? radial : axial; }
  const KernelLayout& kernel(Side s) const { return s == Side::Radial ? radial_kernel : axial_kernel; }
  const std::vector<Eigen::MatrixXd>& masses(Side s) const {
    return s == Side::Radial ? radial_mass : axial_mass;
  }
  const numerics::TransportOperator& stream(Side s) const {
    return s == Side::Radial ? *radial_stream : *axial_stream;
  }
  bool multigroup(Side s) const {
    return s == Side::Radial ? variant.radial_multigroup() : variant.axial_multigroup();
  }
  int mode_group(Side s, int g) const { return multigroup(s) ? g : 0; }
  int slot(Side s, int region, int other_region) const;
};

Decomposition decompose(const fom::Problem& p, RomVariant v);

// 3D field of R (x) Z, added into psi (FOM layout).
void add_product(const Decomposition& d, const Vec& R, const Vec& Z, double scale, Vec& psi);
Vec product(const Decomposition& d, const Vec& R, const Vec& Z);

// Sum_n w_n <a_n, b_n> over the mass matrix for one group block of a side.
double weighted_inner(const Decomposition& d, Side s, const double* a, const double* b);
// Same, restricted to each region of that side.
Eigen::VectorXd region_inners(const Decomposition& d, Side s, const double* a, const double* b);
// Squared L2 norm of a mode: per group, or summed with group weights.
double group_norm2(const Decomposition& d, Side s, const Vec& f, int g);
double mode_norm2(const Decomposition& d, Side s, const Vec& f);

struct SourceTerm {
  Vec radial, axial;  // nodal
};
using SeparatedSource = std::vector<SourceTerm>;

// Low-rank separation of the slot-wise isotropic source, by SVD of the
// (area, layer) density table in the variant's unfolding; terms with
// singular values below tol times the largest are dropped.
SeparatedSource separate_source(const Decomposition& d, const fom::FixedSource& q, double tol = 1e-12);

// Galerkin projection of the 3D operator onto the submodel of side `unknown`:
// test functions test (x) v, trial products u (x) trial. The streaming
// coefficient is left in place (not cancelled). One-group sides condense
// physical groups with the group weights.
numerics::Coefficients project_operator(const Decomposition& d, Side unknown, const Vec& test,
                                        const Vec& trial);
// Weak-form source of the submodel for the given test mode.
Vec project_source(const Decomposition& d, Side unknown, const Vec& test, const SeparatedSource& q);

// Divides every group row by its streaming coefficient. Returns the divisors.
std::vector<double> cancel_streaming(numerics::Coefficients& c);

numerics::TransportSolveSettings submodel_settings();

struct SubmodelSolve {
  Vec mode;
  double initial_residual = 0;  // ||r - B x0|| / ||r||, l2
  int iterations = 0;
  bool converged = false;
};

// Solves B x = r with B from normalized coefficients, warm-started from x0.
SubmodelSolve solve_submodel(const Decomposition& d, Side unknown, const numerics::Coefficients& coef,
                             const Vec& rhs, const Vec& x0,
                             const numerics::TransportSolveSettings& s = submodel_settings());

// 1D axial-split submodel solved directly in phi = Z+ + Z-, J = Z+ - Z-
// variables; returns Z in sign-ordinate layout.
Vec solve_1d_p1_form(const Decomposition& d, const numerics::Coefficients& coef, const Vec& rhs);

struct ModePair {
  Vec radial, axial;
};

struct SeparatedFlux {
  RomVariant variant;
  std::vector<ModePair> modes;
  int size() const { return static_cast<int>(modes.size()); }
};

Vec reconstruct(const Decomposition& d, const SeparatedFlux& f, int count = -1);

struct PgdSettings {
  int max_modes = 30;
  int max_nonlinear = 10;
  double nonlinear_tol = 1e-2;
  bool p1_axial = false;  // use the phi/J form for the axial-split 1D submodel
  numerics::TransportSolveSettings submodel = submodel_settings();
};

enum class EnrichStatus { Converged, MaxIterations, ZeroSource, BasisExhausted };

struct EnrichResult {
  EnrichStatus status = EnrichStatus::MaxIterations;
  double residual = 0;  // last normalized initial axial residual
  int iterations = 0;
  int unconverged_solves = 0;
};

// Adds one mode pair by alternating radial and axial solves.
class Enricher {
 public:
  Enricher(const Decomposition& d, SeparatedSource q, PgdSettings s);
  EnrichResult enrich(SeparatedFlux& f);

 private:
  Vec residual_source(Side unknown, const Vec& test, const SeparatedFlux& f) const;

  const Decomposition& d_;
  SeparatedSource q_;
  PgdSettings s_;
};

struct ModeRecord {
  int M = 0;
  double wall_time_s = 0;   // cumulative, excluding error evaluation
  double err_angular = -1;  // relative weighted L2; negative when no reference
  double err_scalar = -1;
  double residual = 0;
  int nonlinear_iters = 0;
  EnrichStatus status = EnrichStatus::MaxIterations;
};

struct RunReport {
  RomVariant variant;
  std::vector<ModeRecord> rows;
  bool exhausted = false;
  int unconverged_solves = 0;
};

// Reference for error evaluation: FOM psi and phi on the 3D space.
struct Reference {
  const Vec* psi = nullptr;
  const Vec* phi = nullptr;
};

RunReport run_pgd(const fom::Problem& p, RomVariant v, const PgdSettings& s, const Reference& ref,
                  SeparatedFlux* out = nullptr);

}  // namespace axpgd::pgd
