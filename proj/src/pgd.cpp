#include "axpgd/pgd.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/SparseLU>

#include "axpgd/dense.hpp"
#include "axpgd/errors.hpp"

namespace axpgd::pgd {

numerics::TransportSolveSettings submodel_settings() {
  numerics::TransportSolveSettings s;
  s.outer = {25, 100, 1e-5, 1e-3};
  s.inner = {25, 500, 1e-4, 1e-6};
  return s;
}

SubmodelSolve solve_submodel(const Decomposition& d, Side unknown, const numerics::Coefficients& coef,
                             const Vec& rhs, const Vec& x0, const numerics::TransportSolveSettings& s) {
  const numerics::TransportOperator op(d.space(unknown), coef);
  if (rhs.size() != op.size() || x0.size() != op.size()) throw ShapeError("submodel vectors do not match its space");
  SubmodelSolve out;
  const double rn = rhs.norm();
  out.initial_residual = rn > 0 ? (rhs - op.apply(x0)).norm() / rn : 0.0;
  const auto r = numerics::solve_transport(op, rhs, s, &x0);
  out.mode = r.psi;
  out.iterations = r.outer.iterations;
  out.converged = r.outer.converged;
  return out;
}

Vec solve_1d_p1_form(const Decomposition& d, const numerics::Coefficients& coef, const Vec& rhs) {
  if (d.variant.split != Split::Axial) throw StructureError("the phi/J form applies to the axial split only");
  const auto& sp = d.axial;
  if (rhs.size() != sp.size()) throw ShapeError("rhs does not match the axial space");
  const Eigen::MatrixXd A = numerics::assemble_dense(sp, coef);
  const int n = sp.size(), CK = sp.grid.num_cells() * sp.grid.nodes_per_cell();
  // Z- = (phi - J)/2, Z+ = (phi + J)/2; rows: E+ + E- and E+ - E-
  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> pt, qt;
  for (int g = 0; g < sp.groups; ++g)
    for (int k = 0; k < CK; ++k) {
      const int zm = sp.index(g, 0, 0, 0) + k, zp = sp.index(g, 1, 0, 0) + k;
      const int phi = zm, cur = zp;
      pt.push_back({zm, phi, 0.5});
      pt.push_back({zm, cur, -0.5});
      pt.push_back({zp, phi, 0.5});
      pt.push_back({zp, cur, 0.5});
      qt.push_back({phi, zp, 1.0});
      qt.push_back({phi, zm, 1.0});
      qt.push_back({cur, zp, 1.0});
      qt.push_back({cur, zm, -1.0});
    }
  Eigen::SparseMatrix<double> P(n, n), Q(n, n);
  P.setFromTriplets(pt.begin(), pt.end());
  Q.setFromTriplets(qt.begin(), qt.end());
  const Eigen::SparseMatrix<double> As = A.sparseView();
  Eigen::SparseMatrix<double> B = Q * As * P;
  B.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(B);
  if (lu.info() != Eigen::Success) throw SingularError("phi/J system is singular");
  const Vec y = lu.solve(Q * rhs);
  return P * y;
}

Enricher::Enricher(const Decomposition& d, SeparatedSource q, PgdSettings s)
    : d_(d), q_(std::move(q)), s_(std::move(s)) {}

Vec Enricher::residual_source(Side unknown, const Vec& test, const SeparatedFlux& f) const {
  Vec r = project_source(d_, unknown, test, q_);
  for (const auto& m : f.modes) {
    const Vec& trial = unknown == Side::Radial ? m.axial : m.radial;
    const Vec& known = unknown == Side::Radial ? m.radial : m.axial;
    const numerics::TransportOperator op(d_.space(unknown), project_operator(d_, unknown, test, trial), false);
    r -= op.apply(known);
  }
  return r;
}

namespace {

void normalize_radial(const Decomposition& d, Vec& R) {
  const auto& sp = d.radial;
  if (d.variant.energy == EnergyMode::BothMultigroup) {
    for (int g = 0; g < sp.groups; ++g) {
      const double n2 = group_norm2(d, Side::Radial, R, g);
      if (n2 > 0) R.segment(std::size_t(g) * sp.group_size(), sp.group_size()) /= std::sqrt(n2);
    }
  } else {
    const double n2 = mode_norm2(d, Side::Radial, R);
    if (n2 > 0) R /= std::sqrt(n2);
  }
}

// Cancels the streaming coefficient, refusing numerically zero test modes.
bool normalize_system(const Decomposition& d, Side opposite_side, const Vec& test, numerics::Coefficients& c,
                      Vec& rhs) {
  const double scale = mode_norm2(d, opposite_side, test);
  for (double s : c.streaming)
    if (!(std::abs(s) > 1e-14 * scale) || scale == 0) return false;
  const auto s = cancel_streaming(c);
  const auto& sp = d.space(opposite(opposite_side));
  for (int x = 0; x < sp.groups; ++x) rhs.segment(std::size_t(x) * sp.group_size(), sp.group_size()) /= s[x];
  return true;
}

}  // namespace

EnrichResult Enricher::enrich(SeparatedFlux& f) {
  EnrichResult res;
  Vec R = Vec::Ones(d_.radial.size());
  Vec Z = Vec::Ones(d_.axial.size());
  if (q_.empty() && f.modes.empty()) {
    res.status = EnrichStatus::ZeroSource;
    f.modes.push_back({Vec::Zero(R.size()), Vec::Zero(Z.size())});
    return res;
  }
  for (int it = 1; it <= s_.max_nonlinear; ++it) {
    res.iterations = it;
    normalize_radial(d_, R);

    auto cr = project_operator(d_, Side::Radial, Z, Z);
    Vec rr = residual_source(Side::Radial, Z, f);
    if (!normalize_system(d_, Side::Axial, Z, cr, rr)) {
      res.status = EnrichStatus::BasisExhausted;
      return res;
    }
    const auto sr = solve_submodel(d_, Side::Radial, cr, rr, R, s_.submodel);
    if (!sr.converged) ++res.unconverged_solves;
    R = sr.mode;

    auto cz = project_operator(d_, Side::Axial, R, R);
    Vec rz = residual_source(Side::Axial, R, f);
    if (!normalize_system(d_, Side::Radial, R, cz, rz)) {
      res.status = EnrichStatus::BasisExhausted;
      return res;
    }
    if (s_.p1_axial && d_.variant.split == Split::Axial) {
      const numerics::TransportOperator op(d_.axial, cz, false);
      const double rn = rz.norm();
      res.residual = rn > 0 ? (rz - op.apply(Z)).norm() / rn : 0.0;
      Z = solve_1d_p1_form(d_, cz, rz);
    } else {
      const auto sz = solve_submodel(d_, Side::Axial, cz, rz, Z, s_.submodel);
      if (!sz.converged) ++res.unconverged_solves;
      res.residual = sz.initial_residual;
      Z = sz.mode;
    }
    if (res.residual < s_.nonlinear_tol) {
      res.status = EnrichStatus::Converged;
      break;
    }
  }
  f.modes.push_back({R, Z});
  return res;
}

RunReport run_pgd(const fom::Problem& p, RomVariant v, const PgdSettings& s, const Reference& ref,
                  SeparatedFlux* out) {
  using clock = std::chrono::steady_clock;
  const auto t_setup = clock::now();
  const Decomposition d = decompose(p, v);
  Enricher en(d, separate_source(d, p.source), s);
  double elapsed = std::chrono::duration<double>(clock::now() - t_setup).count();

  RunReport rep;
  rep.variant = v;
  SeparatedFlux f;
  f.variant = v;
  Vec partial;
  double ref_ang = 0, ref_sca = 0;
  if (ref.psi) {
    partial = Vec::Zero(d.full.size());
    ref_ang = fom::angular_norm2(d.full, d.group_weight, *ref.psi);
    if (ref.phi) ref_sca = fom::scalar_norm2(d.full, d.group_weight, *ref.phi);
  }
  for (int M = 1; M <= s.max_modes; ++M) {
    const auto t0 = clock::now();
    const EnrichResult er = en.enrich(f);
    elapsed += std::chrono::duration<double>(clock::now() - t0).count();
    rep.unconverged_solves += er.unconverged_solves;
    if (er.status == EnrichStatus::BasisExhausted) {
      rep.exhausted = true;
      break;
    }
    ModeRecord row;
    row.M = M;
    row.wall_time_s = elapsed;
    row.residual = er.residual;
    row.nonlinear_iters = er.iterations;
    row.status = er.status;
    if (ref.psi) {
      add_product(d, f.modes.back().radial, f.modes.back().axial, 1.0, partial);
      const Vec diff = *ref.psi - partial;
      row.err_angular = ref_ang > 0 ? std::sqrt(fom::angular_norm2(d.full, d.group_weight, diff) / ref_ang) : 0.0;
      if (ref.phi) {
        const Vec dphi = *ref.phi - fom::scalar_flux(d.full, partial);
        row.err_scalar = ref_sca > 0 ? std::sqrt(fom::scalar_norm2(d.full, d.group_weight, dphi) / ref_sca) : 0.0;
      }
    }
    rep.rows.push_back(row);
    if (er.status == EnrichStatus::ZeroSource) break;
  }
  if (out) *out = std::move(f);
  return rep;
}

}  // namespace axpgd::pgd
