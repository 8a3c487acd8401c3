#include "axpgd/svdref.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "axpgd/errors.hpp"

namespace axpgd::svdref {

using pgd::Side;

double ReferenceDecomposition::tail2(int M) const {
  double s = 0;
  for (const auto& b : sigma)
    for (std::size_t m = std::max(M, 0); m < b.size(); ++m) s += b[m] * b[m];
  return s;
}

namespace {

// Index range of one unfolding: the groups of each side it covers.
struct Block {
  int radial_group = -1;  // -1: all groups of the radial space
  int axial_group = -1;
};

// Per-cell factor sqrt(w) L^T of the weighted mass w M = (sqrt(w) L)(sqrt(w) L)^T.
std::vector<Eigen::MatrixXd> mass_factors(const std::vector<Eigen::MatrixXd>& masses) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& M : masses) {
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) throw NumericalError("element mass matrix is not positive definite");
    out.push_back(llt.matrixU());
  }
  return out;
}

// Ratio of the 3D ordinate weight to the product of the factor weights; must
// be the same for every ordinate.
double weight_ratio(const pgd::Decomposition& d) {
  const auto& w3 = d.full.ordinates.weight;
  double c = 0;
  for (std::size_t n = 0; n < w3.size(); ++n) {
    const double wr = d.radial.ordinates.weight[d.radial_ordinate[n]];
    const double wz = d.axial.ordinates.weight[d.axial_ordinate[n]];
    const double r = w3[n] / (wr * wz);
    if (n == 0) c = r;
    else if (std::abs(r - c) > 1e-12 * c) throw StructureError("3D ordinate weights do not factor over the split");
  }
  return c;
}

// Side layout of one unfolding: offsets of the covered groups in the side space.
struct Axis {
  int first_group = 0, num_groups = 0;
  std::size_t size = 0;
};

Axis axis_of(const numerics::PhaseSpace& sp, int group) {
  Axis a;
  a.first_group = group < 0 ? 0 : group;
  a.num_groups = group < 0 ? sp.groups : 1;
  a.size = std::size_t(a.num_groups) * sp.group_size();
  return a;
}

// Applies (or inverts) the per-cell weighted factors along one axis of the
// unfolding: rows when on_rows, else columns.
void scale_axis(const pgd::Decomposition& d, Side s, const Axis& ax, const std::vector<Eigen::MatrixXd>& U,
                const std::vector<double>& group_w, double extra, Eigen::MatrixXd& A, bool on_rows) {
  const auto& sp = d.space(s);
  const int N = sp.ordinates.size(), C = sp.grid.num_cells(), K = sp.grid.nodes_per_cell();
  for (int gl = 0; gl < ax.num_groups; ++gl)
    for (int n = 0; n < N; ++n) {
      const double w = std::sqrt(sp.ordinates.weight[n] * group_w[ax.first_group + gl] * extra);
      for (int c = 0; c < C; ++c) {
        const Eigen::Index off = ((Eigen::Index(gl) * N + n) * C + c) * K;
        if (on_rows) A.middleRows(off, K) = (w * U[c]) * A.middleRows(off, K);
        else A.middleCols(off, K) = A.middleCols(off, K) * (w * U[c]).transpose();
      }
    }
}

// Solves (sqrt(w) U_c) x = y blockwise: weighted coordinates back to nodal values.
Vec unscale(const pgd::Decomposition& d, Side s, const Axis& ax, const std::vector<Eigen::MatrixXd>& U,
            const std::vector<double>& group_w, double extra, const Vec& y) {
  const auto& sp = d.space(s);
  const int N = sp.ordinates.size(), C = sp.grid.num_cells(), K = sp.grid.nodes_per_cell();
  Vec x = Vec::Zero(sp.size());
  const Eigen::Index base = Eigen::Index(ax.first_group) * sp.group_size();
  for (int gl = 0; gl < ax.num_groups; ++gl)
    for (int n = 0; n < N; ++n) {
      const double w = std::sqrt(sp.ordinates.weight[n] * group_w[ax.first_group + gl] * extra);
      for (int c = 0; c < C; ++c) {
        const Eigen::Index off = ((Eigen::Index(gl) * N + n) * C + c) * K;
        x.segment(base + off, K) = U[c].triangularView<Eigen::Upper>().solve(y.segment(off, K)) / w;
      }
    }
  return x;
}

}  // namespace

ReferenceDecomposition svd_reference(const pgd::Decomposition& d, const Vec& psi, int max_modes,
                                     std::size_t memory_cap) {
  if (psi.size() != d.full.size()) throw ShapeError("flux does not match the 3D space of the decomposition");
  if (max_modes < 0) throw ArgumentError("negative number of modes");
  const auto& v = d.variant;
  std::vector<Block> blocks;
  if (v.radial_multigroup() && v.axial_multigroup())
    for (int g = 0; g < d.groups; ++g) blocks.push_back({g, g});
  else
    blocks.push_back({v.radial_multigroup() ? -1 : 0, v.axial_multigroup() ? -1 : 0});

  {
    const Axis r = axis_of(d.radial, blocks[0].radial_group), z = axis_of(d.axial, blocks[0].axial_group);
    const std::size_t need = 3 * r.size * z.size * sizeof(double);
    if (need > memory_cap)
      throw SizeError("SVD unfolding needs " + std::to_string(need) + " bytes, cap is " + std::to_string(memory_cap));
  }

  const double ratio = weight_ratio(d);
  const auto Ur = mass_factors(d.radial_mass), Uz = mass_factors(d.axial_mass);
  const std::vector<double> ones(d.groups, 1.0);
  // inverse lethargy weights go to the side that resolves energy
  const bool w_on_rows = v.radial_multigroup();
  const auto& wr = w_on_rows ? d.group_weight : ones;
  const auto& wz = w_on_rows ? ones : d.group_weight;

  ReferenceDecomposition out;
  out.variant = v;
  out.flux.variant = v;
  const int N3 = d.full.ordinates.size(), C2 = d.radial.grid.num_cells(), Cz = d.axial.grid.num_cells();
  std::vector<std::vector<std::pair<Vec, Vec>>> factors(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Axis ra = axis_of(d.radial, blocks[b].radial_group), za = axis_of(d.axial, blocks[b].axial_group);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ra.size, za.size);
    const Eigen::Index r0 = Eigen::Index(ra.first_group) * d.radial.group_size();
    const Eigen::Index z0 = Eigen::Index(za.first_group) * d.axial.group_size();
    for (int g = 0; g < d.groups; ++g) {
      const int gr = d.mode_group(Side::Radial, g), gz = d.mode_group(Side::Axial, g);
      if (gr < ra.first_group || gr >= ra.first_group + ra.num_groups) continue;
      if (gz < za.first_group || gz >= za.first_group + za.num_groups) continue;
      for (int n = 0; n < N3; ++n)
        for (int cz = 0; cz < Cz; ++cz)
          for (int vz = 0; vz < 2; ++vz) {
            const Eigen::Index col = d.axial.index(gz, d.axial_ordinate[n], cz, vz) - z0;
            for (int c2 = 0; c2 < C2; ++c2)
              for (int vr = 0; vr < 4; ++vr)
                A(d.radial.index(gr, d.radial_ordinate[n], c2, vr) - r0, col) =
                    psi[d.full.index(g, n, c2 + C2 * cz, vr + 4 * vz)];
          }
    }
    scale_axis(d, Side::Radial, ra, Ur, wr, 1.0, A, true);
    scale_axis(d, Side::Axial, za, Uz, wz, ratio, A, false);
    out.norm2 += A.squaredNorm();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd s = svd.singularValues();
    out.sigma.emplace_back(s.data(), s.data() + s.size());
    for (int m = 0; m < std::min<int>(max_modes, s.size()); ++m) {
      if (s[m] == 0) break;
      Vec R = unscale(d, Side::Radial, ra, Ur, wr, 1.0, svd.matrixU().col(m) * s[m]);
      Vec Z = unscale(d, Side::Axial, za, Uz, wz, ratio, svd.matrixV().col(m));
      factors[b].push_back({std::move(R), std::move(Z)});
    }
  }

  // mode m joins the m-th triplet of every block (disjoint group supports)
  std::size_t count = 0;
  for (const auto& f : factors) count = std::max(count, f.size());
  for (std::size_t m = 0; m < count; ++m) {
    pgd::ModePair pair{Vec::Zero(d.radial.size()), Vec::Zero(d.axial.size())};
    for (const auto& f : factors)
      if (m < f.size()) {
        pair.radial += f[m].first;
        pair.axial += f[m].second;
      }
    out.flux.modes.push_back(std::move(pair));
  }
  return out;
}

std::vector<ErrorPoint> error_curves(const pgd::Decomposition& d, const pgd::SeparatedFlux& f, const Vec& psi_ref) {
  if (psi_ref.size() != d.full.size()) throw ShapeError("reference flux does not match the 3D space");
  const auto& w = d.group_weight;
  const double na = fom::angular_norm2(d.full, w, psi_ref);
  const Vec phi_ref = fom::scalar_flux(d.full, psi_ref);
  const double ns = fom::scalar_norm2(d.full, w, phi_ref);
  std::vector<ErrorPoint> out;
  Vec partial = Vec::Zero(d.full.size());
  for (const auto& m : f.modes) {
    pgd::add_product(d, m.radial, m.axial, 1.0, partial);
    const Vec diff = psi_ref - partial;
    ErrorPoint e;
    e.angular = na > 0 ? std::sqrt(fom::angular_norm2(d.full, w, diff) / na) : 0.0;
    e.scalar = ns > 0 ? std::sqrt(fom::scalar_norm2(d.full, w, phi_ref - fom::scalar_flux(d.full, partial)) / ns) : 0.0;
    out.push_back(e);
  }
  return out;
}

pgd::RunReport run_svd(const fom::Problem& p, pgd::RomVariant v, const Vec& psi_ref, int max_modes) {
  const pgd::Decomposition d = pgd::decompose(p, v);
  const auto t0 = std::chrono::steady_clock::now();
  const auto ref = svd_reference(d, psi_ref, max_modes);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto curve = error_curves(d, ref.flux, psi_ref);
  pgd::RunReport rep;
  rep.variant = v;
  for (std::size_t m = 0; m < curve.size(); ++m) {
    pgd::ModeRecord row;
    row.M = static_cast<int>(m) + 1;
    row.wall_time_s = wall;
    row.err_angular = ref.norm2 > 0 ? std::sqrt(std::max(ref.tail2(row.M), 0.0) / ref.norm2) : 0.0;
    row.err_scalar = curve[m].scalar;
    row.residual = 0;
    row.nonlinear_iters = 0;
    row.status = pgd::EnrichStatus::Converged;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace axpgd::svdref
