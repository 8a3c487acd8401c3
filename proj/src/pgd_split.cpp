#include "axpgd/pgd.hpp"

#include <cmath>

#include "axpgd/errors.hpp"

namespace axpgd::pgd {

std::string RomVariant::name() const {
  std::string s = split == Split::AxialPolar ? "axial-polar:" : "axial:";
  switch (energy) {
    case EnergyMode::BothMultigroup: return s + "both";
    case EnergyMode::RadialOnly: return s + "radial-only";
    case EnergyMode::AxialOnly: return s + "axial-only";
  }
  return s;
}

RomVariant parse_variant(const std::string& name) {
  for (const auto& v : all_variants())
    if (v.name() == name) return v;
  throw ArgumentError("unknown ROM variant '" + name + "'");
}

std::vector<RomVariant> all_variants() {
  std::vector<RomVariant> out;
  for (Split s : {Split::AxialPolar, Split::Axial})
    for (EnergyMode e : {EnergyMode::BothMultigroup, EnergyMode::RadialOnly, EnergyMode::AxialOnly})
      out.push_back({s, e});
  return out;
}

int Decomposition::slot(Side s, int region, int other_region) const {
  return s == Side::Radial ? region * xs.num_layers + other_region : other_region * xs.num_layers + region;
}

namespace {

int legendre_slot(int l, int m) { return l * (l + 1) / 2 + m; }

// (l, m) for m = 0..l in legendre_slot order.
std::vector<std::pair<int, int>> legendre_pairs(int L) {
  std::vector<std::pair<int, int>> out;
  for (int l = 0; l <= L; ++l)
    for (int m = 0; m <= l; ++m) out.push_back({l, m});
  return out;
}

double sign_power(int alpha_index, int p) { return p == 0 || alpha_index == 1 ? 1.0 : -1.0; }

void axial_polar_layouts(Decomposition& d, const angle::AngularQuadrature& q, int L) {
  const int na = q.num_azim(), np = q.num_polar();
  const auto lm = legendre_pairs(L);
  const int T = static_cast<int>(lm.size());

  // circle: moments k = -L..L, partner moments (l, m) on the polar line
  KernelLayout& r = d.radial_kernel;
  r.Y.resize(2 * L + 1, na);
  r.W.resize(2 * L + 1, na);
  for (int k = -L; k <= L; ++k)
    for (int a = 0; a < na; ++a) {
      r.Y(k + L, a) = angle::azimuthal(k, q.azim_nodes[a]);
      r.W(k + L, a) = q.azim_weights[a] * r.Y(k + L, a);
    }
  r.partner_W.resize(T, np);
  for (int t = 0; t < T; ++t)
    for (int p = 0; p < np; ++p)
      r.partner_W(t, p) = q.polar_weights[p] * angle::assoc_legendre(lm[t].first, lm[t].second, q.polar_nodes[p]);
  r.couple.assign(2 * L + 1, {});
  for (int k = -L; k <= L; ++k)
    for (int l = std::abs(k); l <= L; ++l) r.couple[k + L].push_back({legendre_slot(l, std::abs(k)), l});

  KernelLayout& z = d.axial_kernel;
  z.Y = r.partner_W;
  z.W = r.partner_W;
  for (int t = 0; t < T; ++t)
    for (int p = 0; p < np; ++p) z.Y(t, p) = z.W(t, p) / q.polar_weights[p];
  z.partner_W = r.W;
  z.couple.assign(T, {});
  for (int t = 0; t < T; ++t) {
    const auto [l, m] = lm[t];
    z.couple[t].push_back({m + L, l});
    if (m > 0) z.couple[t].push_back({-m + L, l});
  }
}

void axial_layouts(Decomposition& d, const angle::AngularQuadrature& hq, int L) {
  const auto idx = angle::harmonic_indices(L);
  const int H = static_cast<int>(idx.size()), N = hq.size();

  KernelLayout& r = d.radial_kernel;
  r.Y.resize(H, N);
  r.W.resize(H, N);
  for (int h = 0; h < H; ++h)
    for (int n = 0; n < N; ++n) {
      r.Y(h, n) = angle::eval_harmonic(idx[h], hq.mu[n], hq.omega[n]);
      r.W(h, n) = hq.weight[n] * r.Y(h, n);
    }
  r.partner_W.resize(2, 2);
  for (int p = 0; p < 2; ++p)
    for (int a = 0; a < 2; ++a) r.partner_W(p, a) = sign_power(a, p);
  r.couple.assign(H, {});
  for (int h = 0; h < H; ++h) r.couple[h].push_back({idx[h].parity(), idx[h].l});

  KernelLayout& z = d.axial_kernel;
  const int P = L > 0 ? 2 : 1;
  z.Y = r.partner_W.topRows(P);
  z.W = z.Y;
  z.partner_W = r.W;
  z.couple.assign(P, {});
  for (int h = 0; h < H; ++h) z.couple[idx[h].parity()].push_back({h, idx[h].l});
}

std::shared_ptr<const numerics::TransportOperator> streaming_only(const numerics::PhaseSpace& sp) {
  numerics::PhaseSpace one = sp;
  one.groups = 1;
  numerics::Coefficients co;
  co.streaming = {1.0};
  co.leakage = {0.0};
  co.total.assign(one.num_regions(), Eigen::VectorXd::Zero(1));
  co.kernel.Y.resize(0, one.ordinates.size());
  co.kernel.W.resize(0, one.ordinates.size());
  return std::make_shared<const numerics::TransportOperator>(one, co, false);
}

}  // namespace

Decomposition decompose(const fom::Problem& p, RomVariant v) {
  p.xs.validate();
  const auto& mesh = p.mesh;
  if (p.xs.num_areas != mesh.num_areas() || p.xs.num_layers != mesh.num_layers())
    throw MaterialError("cross sections do not match the mesh areas and layers");
  const auto& q = p.quadrature;
  if (!q.product || q.domain != angle::AngularDomain::Sphere)
    throw StructureError("the split needs a product quadrature over the sphere");
  Decomposition d;
  d.variant = v;
  d.groups = p.xs.groups;
  d.group_weight = data::group_weights(p.xs.energy_bounds);
  d.xs = p.xs;
  d.full = fom::fom_space(p);

  d.radial.grid.widths = {mesh.x_widths(), mesh.y_widths()};
  d.radial.region_of_cell = mesh.areas();
  d.axial.grid.widths = {mesh.z_widths()};
  d.axial.region_of_cell = mesh.layers();
  for (int s = 0; s < 2; ++s) {
    d.radial.reflective[0][s] = d.full.reflective[0][s];
    d.radial.reflective[1][s] = d.full.reflective[1][s];
    d.axial.reflective[0][s] = d.full.reflective[2][s];
  }
  d.radial.groups = v.radial_multigroup() ? d.groups : 1;
  d.axial.groups = v.axial_multigroup() ? d.groups : 1;

  const int np = q.num_polar(), na = q.num_azim(), L = p.xs.order;
  d.radial_ordinate.resize(q.size());
  d.axial_ordinate.resize(q.size());
  if (v.split == Split::AxialPolar) {
    d.radial.ordinates = numerics::circle_ordinates(q);
    d.axial.ordinates = numerics::polar_line_ordinates(q);
    for (int ip = 0; ip < np; ++ip)
      for (int a = 0; a < na; ++a) {
        d.radial_ordinate[q.index(ip, a)] = a;
        d.axial_ordinate[q.index(ip, a)] = ip;
      }
    axial_polar_layouts(d, q, L);
  } else {
    const auto hemi = angle::restrict_to_hemisphere(q);
    d.radial.ordinates = numerics::hemisphere_ordinates(hemi.quadrature);
    d.axial.ordinates = numerics::sign_ordinates();
    for (int n = 0; n < hemi.quadrature.size(); ++n) {
      d.radial_ordinate[hemi.upper[n]] = n;
      d.axial_ordinate[hemi.upper[n]] = 1;
      d.radial_ordinate[hemi.lower[n]] = n;
      d.axial_ordinate[hemi.lower[n]] = 0;
    }
    axial_layouts(d, hemi.quadrature, L);
  }
  for (int c = 0; c < d.radial.grid.num_cells(); ++c) d.radial_mass.push_back(numerics::cell_mass(d.radial.grid, c));
  for (int c = 0; c < d.axial.grid.num_cells(); ++c) d.axial_mass.push_back(numerics::cell_mass(d.axial.grid, c));
  d.radial_stream = streaming_only(d.radial);
  d.axial_stream = streaming_only(d.axial);
  return d;
}

void add_product(const Decomposition& d, const Vec& R, const Vec& Z, double scale, Vec& psi) {
  if (R.size() != d.radial.size() || Z.size() != d.axial.size() || psi.size() != d.full.size())
    throw ShapeError("mode sizes do not match the decomposition");
  const int N = d.full.ordinates.size();
  const int C2 = d.radial.grid.num_cells(), Cz = d.axial.grid.num_cells();
  for (int g = 0; g < d.groups; ++g) {
    const int gr = d.mode_group(Side::Radial, g), gz = d.mode_group(Side::Axial, g);
    for (int n = 0; n < N; ++n) {
      const double* rb = R.data() + d.radial.index(gr, d.radial_ordinate[n], 0, 0);
      const double* zb = Z.data() + d.axial.index(gz, d.axial_ordinate[n], 0, 0);
      for (int cz = 0; cz < Cz; ++cz)
        for (int nz = 0; nz < 2; ++nz) {
          const double zv = scale * zb[cz * 2 + nz];
          if (zv == 0) continue;
          for (int c2 = 0; c2 < C2; ++c2) {
            double* out = psi.data() + d.full.index(g, n, c2 + C2 * cz, 4 * nz);
            for (int nr = 0; nr < 4; ++nr) out[nr] += zv * rb[c2 * 4 + nr];
          }
        }
    }
  }
}

Vec product(const Decomposition& d, const Vec& R, const Vec& Z) {
  Vec psi = Vec::Zero(d.full.size());
  add_product(d, R, Z, 1.0, psi);
  return psi;
}

namespace {

template <class F>
void for_each_cell_inner(const Decomposition& d, Side s, const double* a, const double* b, F&& f) {
  const auto& sp = d.space(s);
  const auto& M = d.masses(s);
  const int N = sp.ordinates.size(), C = sp.grid.num_cells(), K = sp.grid.nodes_per_cell();
  for (int n = 0; n < N; ++n) {
    const double w = sp.ordinates.weight[n];
    for (int c = 0; c < C; ++c) {
      const std::size_t off = (static_cast<std::size_t>(n) * C + c) * K;
      const Eigen::Map<const Eigen::VectorXd> av(a + off, K), bv(b + off, K);
      f(c, w * av.dot(M[c] * bv));
    }
  }
}

}  // namespace

double weighted_inner(const Decomposition& d, Side s, const double* a, const double* b) {
  double t = 0;
  for_each_cell_inner(d, s, a, b, [&](int, double v) { t += v; });
  return t;
}

Eigen::VectorXd region_inners(const Decomposition& d, Side s, const double* a, const double* b) {
  const auto& sp = d.space(s);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sp.num_regions());
  for_each_cell_inner(d, s, a, b, [&](int c, double v) { out[sp.region_of_cell[c]] += v; });
  return out;
}

double group_norm2(const Decomposition& d, Side s, const Vec& f, int g) {
  const auto& sp = d.space(s);
  const double* p = f.data() + static_cast<std::size_t>(g) * sp.group_size();
  return weighted_inner(d, s, p, p);
}

double mode_norm2(const Decomposition& d, Side s, const Vec& f) {
  const auto& sp = d.space(s);
  if (f.size() != sp.size()) throw ShapeError("mode size does not match its space");
  if (sp.groups == 1) return group_norm2(d, s, f, 0);
  double t = 0;
  for (int g = 0; g < sp.groups; ++g) t += d.group_weight[g] * group_norm2(d, s, f, g);
  return t;
}

namespace {

// Isotropic nodal field on one side: value[g][region] / (sum of weights).
Vec isotropic_field(const numerics::PhaseSpace& sp, const Eigen::MatrixXd& value) {
  double wsum = 0;
  for (double w : sp.ordinates.weight) wsum += w;
  Vec f = Vec::Zero(sp.size());
  const int N = sp.ordinates.size(), C = sp.grid.num_cells(), K = sp.grid.nodes_per_cell();
  for (int g = 0; g < sp.groups; ++g)
    for (int c = 0; c < C; ++c) {
      const double v = value(g, sp.region_of_cell[c]) / wsum;
      if (v == 0) continue;
      for (int n = 0; n < N; ++n)
        for (int nu = 0; nu < K; ++nu) f[sp.index(g, n, c, nu)] = v;
    }
  return f;
}

}  // namespace

SeparatedSource separate_source(const Decomposition& d, const fom::FixedSource& q, double tol) {
  const int I = d.xs.num_areas, J = d.xs.num_layers, G = d.groups;
  if (static_cast<int>(q.density.size()) != I * J) throw ShapeError("source must give a density for every slot");
  for (const auto& s : q.density)
    if (static_cast<int>(s.size()) != G) throw ShapeError("source needs one value per group");
  const int Gr = d.radial.groups, Gz = d.axial.groups;
  SeparatedSource out;

  // rows (radial group, area), columns (axial group, layer) restricted to
  // the physical groups in `gs`
  auto separate = [&](const std::vector<int>& gs) {
    const bool rg = d.variant.radial_multigroup(), zg = d.variant.axial_multigroup();
    const int nr = (rg ? static_cast<int>(gs.size()) : 1) * I;
    const int nc = (zg ? static_cast<int>(gs.size()) : 1) * J;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nr, nc);
    for (int t = 0; t < static_cast<int>(gs.size()); ++t)
      for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j) {
          const int row = (rg ? t : 0) * I + i, col = (zg ? t : 0) * J + j;
          A(row, col) += q.density[i * J + j][gs[t]];
        }
    if (A.norm() == 0) return;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    for (int k = 0; k < sv.size(); ++k) {
      if (sv[k] <= tol * sv[0]) break;
      Eigen::MatrixXd rv = Eigen::MatrixXd::Zero(Gr, I), zv = Eigen::MatrixXd::Zero(Gz, J);
      for (int t = 0; t < static_cast<int>(gs.size()); ++t) {
        if (rg || t == 0)
          for (int i = 0; i < I; ++i) rv(rg ? gs[t] : 0, i) = sv[k] * svd.matrixU()((rg ? t : 0) * I + i, k);
        if (zg || t == 0)
          for (int j = 0; j < J; ++j) zv(zg ? gs[t] : 0, j) = svd.matrixV()((zg ? t : 0) * J + j, k);
      }
      out.push_back({isotropic_field(d.radial, rv), isotropic_field(d.axial, zv)});
    }
  };
  if (d.variant.energy == EnergyMode::BothMultigroup) {
    for (int g = 0; g < G; ++g) separate({g});
  } else {
    std::vector<int> all(G);
    for (int g = 0; g < G; ++g) all[g] = g;
    separate(all);
  }
  return out;
}

Vec reconstruct(const Decomposition& d, const SeparatedFlux& f, int count) {
  if (count < 0 || count > f.size()) count = f.size();
  Vec psi = Vec::Zero(d.full.size());
  for (int m = 0; m < count; ++m) add_product(d, f.modes[m].radial, f.modes[m].axial, 1.0, psi);
  return psi;
}

}  // namespace axpgd::pgd
