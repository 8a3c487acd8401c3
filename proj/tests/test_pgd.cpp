#include <cmath>
#include <numbers>

#include <doctest.h>

#include "pgd_oracle.hpp"

using namespace axpgd;
using namespace axpgd::pgd;
using testsupport::rel_diff;
using std::numbers::pi;

namespace {

Vec random_mode(std::mt19937& rng, const numerics::PhaseSpace& sp) { return testsupport::random_vector(rng, sp.size()); }

}  // namespace

TEST_CASE("variant names round trip") {
  CHECK(all_variants().size() == 6);
  for (const auto& v : all_variants()) {
    const auto w = parse_variant(v.name());
    CHECK(w.split == v.split);
    CHECK(w.energy == v.energy);
  }
  CHECK_THROWS_AS(parse_variant("radial:both"), ArgumentError);
}

TEST_CASE("reconstruction of an outer product is exact") {
  std::mt19937 rng(3);
  const auto p = testsupport::small_problem(rng, 2, 1);
  for (const auto& v : all_variants()) {
    const auto d = decompose(p, v);
    const Vec R = random_mode(rng, d.radial), Z = random_mode(rng, d.axial);
    const Vec psi = product(d, R, Z);
    const int N = d.full.ordinates.size(), C2 = d.radial.grid.num_cells();
    bool exact = true;
    for (int g = 0; g < d.groups; ++g)
      for (int n = 0; n < N; ++n)
        for (int c = 0; c < d.full.grid.num_cells(); ++c)
          for (int nu = 0; nu < 8; ++nu) {
            const double r = R[d.radial.index(d.mode_group(Side::Radial, g), d.radial_ordinate[n], c % C2, nu % 4)];
            const double z = Z[d.axial.index(d.mode_group(Side::Axial, g), d.axial_ordinate[n], c / C2, nu / 4)];
            exact = exact && psi[d.full.index(g, n, c, nu)] == r * z;
          }
    CHECK(exact);
  }
}

TEST_CASE("axial split maps every sphere ordinate to a hemisphere ordinate and a sign") {
  std::mt19937 rng(4);
  const auto p = testsupport::small_problem(rng, 1, 0, false, 2, 2);
  const auto d = decompose(p, {Split::Axial, EnergyMode::BothMultigroup});
  const auto& q = p.quadrature;
  for (int n = 0; n < q.size(); ++n) {
    const int h = d.radial_ordinate[n];
    const double alpha = d.axial.ordinates.velocity[0][d.axial_ordinate[n]];
    CHECK(alpha * d.radial.ordinates.leakage_factor[h] == doctest::Approx(q.mu[n]).epsilon(1e-14));
    CHECK(d.radial.ordinates.weight[h] == doctest::Approx(q.weight[n]).epsilon(1e-14));
  }
}

TEST_CASE("submodel operators are Galerkin projections of the 3D operator") {
  std::mt19937 rng(11);
  for (bool refl : {false, true}) {
    const auto p = testsupport::small_problem(rng, 2, 2, refl);
    const auto space = fom::fom_space(p);
    const numerics::TransportOperator A3(space, fom::fom_coefficients(p));
    const Vec q3 = A3.mass(fom::source_field(p, space));
    for (const auto& v : all_variants()) {
      const auto d = decompose(p, v);
      const auto src = separate_source(d, p.source);
      for (Side X : {Side::Radial, Side::Axial}) {
        const Side Y = opposite(X);
        const Vec test = random_mode(rng, d.space(Y)), trial = random_mode(rng, d.space(Y));
        const Vec u = random_mode(rng, d.space(X));
        const numerics::TransportOperator B(d.space(X), project_operator(d, X, test, trial), false);
        const Vec lhs = B.apply(u);
        const Vec psi = X == Side::Radial ? product(d, u, trial) : product(d, trial, u);
        const Vec rhs = testsupport::project_3d(d, X, test, A3.apply(psi));
        CHECK_MESSAGE(rel_diff(lhs, rhs) < 1e-12, v.name());
        const Vec qs = project_source(d, X, test, src);
        CHECK_MESSAGE(rel_diff(qs, testsupport::project_3d(d, X, test, q3)) < 1e-12, v.name());
      }
    }
  }
}

TEST_CASE("effective coefficients match direct quadrature of the closed-form definitions") {
  std::mt19937 rng(21);
  const auto p = testsupport::small_problem(rng, 2, 2);
  for (const auto& v : all_variants()) {
    const auto d = decompose(p, v);
    for (Side X : {Side::Radial, Side::Axial}) {
      const Side Y = opposite(X);
      const Vec test = random_mode(rng, d.space(Y)), trial = random_mode(rng, d.space(Y));
      CHECK_MESSAGE(testsupport::oracle_mismatch(d, X, test, trial) < 1e-12, v.name());
    }
  }
}

TEST_CASE("one-group coefficients are condensed multigroup coefficients") {
  std::mt19937 rng(31);
  const auto p = testsupport::small_problem(rng, 3, 1);
  const auto both = decompose(p, {Split::AxialPolar, EnergyMode::BothMultigroup});
  const auto axial_only = decompose(p, {Split::AxialPolar, EnergyMode::AxialOnly});
  const auto both_ax = decompose(p, {Split::Axial, EnergyMode::BothMultigroup});
  const auto radial_only = decompose(p, {Split::Axial, EnergyMode::RadialOnly});
  auto check = [&](const Decomposition& mg, const Decomposition& og, Side X) {
    const Side Y = opposite(X);
    const Vec test = random_mode(rng, mg.space(Y)), trial = random_mode(rng, mg.space(Y));
    const auto cm = project_operator(mg, X, test, trial);
    const auto co = project_operator(og, X, test, trial);
    const auto& w = mg.group_weight;
    const int G = mg.groups;
    double s = 0, lam = 0;
    for (int g = 0; g < G; ++g) {
      s += w[g] * cm.streaming[g];
      lam += w[g] * cm.leakage[g];
    }
    CHECK(testsupport::max_rel(co.streaming[0], s) < 1e-13);
    CHECK(testsupport::max_rel(co.leakage[0], lam) < 1e-13);
    for (std::size_t r = 0; r < cm.total.size(); ++r) {
      double t = 0;
      for (int g = 0; g < G; ++g) t += w[g] * cm.total[r][g];
      CHECK(testsupport::max_rel(co.total[r][0], t) < 1e-13);
    }
    for (std::size_t h = 0; h < cm.kernel.kappa.size(); ++h)
      for (std::size_t r = 0; r < cm.total.size(); ++r) {
        double k = 0;
        for (int g = 0; g < G; ++g) k += w[g] * cm.kernel.kappa[h][r].row(g).sum();
        CHECK(std::abs(co.kernel.kappa[h][r](0, 0) - k) <= 1e-13 * std::max(1.0, std::abs(k)));
      }
  };
  check(both, axial_only, Side::Radial);
  check(both_ax, radial_only, Side::Axial);
}

TEST_CASE("condensed source is the group-weighted sum") {
  std::mt19937 rng(32);
  const auto p = testsupport::small_problem(rng, 3, 0);
  const auto ao = decompose(p, {Split::AxialPolar, EnergyMode::AxialOnly});
  const auto gw = decompose(p, {Split::AxialPolar, EnergyMode::BothMultigroup});
  const Vec Z = random_mode(rng, gw.axial);
  const Vec qa = project_source(ao, Side::Radial, Z, separate_source(ao, p.source));
  const Vec qg = project_source(gw, Side::Radial, Z, separate_source(gw, p.source));
  const Eigen::Index gs = gw.radial.group_size();
  Vec sum = Vec::Zero(gs);
  for (int g = 0; g < gw.groups; ++g) sum += gw.group_weight[g] * qg.segment(g * gs, gs);
  CHECK(rel_diff(qa, sum) < 1e-13);
}

TEST_CASE("trivial projections") {
  std::mt19937 rng(41);
  auto p = testsupport::small_problem(rng, 1, 2);
  SUBCASE("odd Z gives no isotropic scattering") {
    const auto d = decompose(p, {Split::AxialPolar, EnergyMode::BothMultigroup});
    Vec Z = random_mode(rng, d.axial);
    const int Np = d.axial.ordinates.size();
    const Eigen::Index CK = d.axial.grid.num_cells() * 2;
    for (int ip = 0; ip < Np / 2; ++ip) Z.segment((Np - 1 - ip) * CK, CK) = -Z.segment(ip * CK, CK);
    const Vec Ze = Vec::Ones(d.axial.size());
    const auto co = project_operator(d, Side::Radial, Ze, Z);
    const int L = d.xs.order;
    for (auto& k : co.kernel.kappa[L]) CHECK(k.norm() < 1e-14);
  }
  SUBCASE("azimuthally constant R has no k > 0 moments") {
    const auto d = decompose(p, {Split::AxialPolar, EnergyMode::BothMultigroup});
    const int Na = d.radial.ordinates.size();
    const Eigen::Index CK = d.radial.grid.num_cells() * 4;
    Vec R(d.radial.size());
    const Vec base = testsupport::random_vector(rng, CK);
    for (int a = 0; a < Na; ++a) R.segment(a * CK, CK) = base;
    const auto co = project_operator(d, Side::Axial, R, R);
    int h = 0;
    for (int l = 0; l <= d.xs.order; ++l)
      for (int m = 0; m <= l; ++m, ++h)
        if (m > 0)
          for (auto& k : co.kernel.kappa[h]) CHECK(k.norm() < 1e-14);
  }
  SUBCASE("symmetric Z has no odd-parity moments") {
    const auto d = decompose(p, {Split::Axial, EnergyMode::BothMultigroup});
    Vec Z = random_mode(rng, d.axial);
    const Eigen::Index CK = d.axial.grid.num_cells() * 2;
    Z.segment(CK, CK) = Z.segment(0, CK);
    const auto co = project_operator(d, Side::Radial, Z, Z);
    const auto idx = angle::harmonic_indices(d.xs.order);
    for (std::size_t h = 0; h < idx.size(); ++h)
      if (idx[h].parity() == 1)
        for (auto& k : co.kernel.kappa[h]) CHECK(k.norm() < 1e-14);
  }
  SUBCASE("isotropic unit-area R gives s_1D = 1/2") {
    geometry::RadialSpec r{{0, 0.5, 1.0}, {0, 1.0}, {0, 0}};
    geometry::AxialSpec a{{0, 1.0}, {0}};
    geometry::MaterialTable mt{1, 1, {0}};
    fom::Problem q{geometry::build_extruded_mesh(r, a, mt, {}), testsupport::random_xs(rng, 1, 0, 1, 1),
                   angle::build_product_quadrature(3, 2), {}};
    const auto d = decompose(q, {Split::Axial, EnergyMode::BothMultigroup});
    Vec R = Vec::Ones(d.radial.size());
    R /= std::sqrt(mode_norm2(d, Side::Radial, R));
    const auto co = project_operator(d, Side::Axial, R, R);
    CHECK(co.streaming[0] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(co.kernel.kappa.size() == 1);
  }
}

TEST_CASE("constant axial mode on reflective layer: total equals the layer data, no leakage") {
  std::mt19937 rng(42);
  geometry::RadialSpec r{{0, 0.7, 1.5}, {0, 0.8}, {0, 1}};
  geometry::AxialSpec a{{0, 0.6, 1.1}, {0, 0}};
  geometry::MaterialTable mt{2, 1, {0, 1}};
  using geometry::Face;
  geometry::BoundarySpec bc;
  bc.face[2] = {Face::Reflective, Face::Reflective};
  fom::Problem q{geometry::build_extruded_mesh(r, a, mt, bc), testsupport::random_xs(rng, 2, 1, 2, 1),
                 angle::build_product_quadrature(2, 1), {}};
  const auto d = decompose(q, {Split::AxialPolar, EnergyMode::BothMultigroup});
  Vec Z = Vec::Ones(d.axial.size());
  for (int g = 0; g < 2; ++g) {
    const Eigen::Index gs = d.axial.group_size();
    Z.segment(g * gs, gs) /= std::sqrt(group_norm2(d, Side::Axial, Z, g));
  }
  const auto co = project_operator(d, Side::Radial, Z, Z);
  for (int g = 0; g < 2; ++g) {
    CHECK(std::abs(co.leakage[g]) < 1e-14);
    for (int i = 0; i < 2; ++i) CHECK(co.total[i][g] == doctest::Approx(q.xs.at(i, 0).total[g]).epsilon(1e-13));
  }
}

TEST_CASE("streaming coefficients are symmetric bilinear forms") {
  std::mt19937 rng(51);
  const auto p = testsupport::small_problem(rng, 2, 1);
  for (const auto& v : all_variants()) {
    const auto d = decompose(p, v);
    for (Side X : {Side::Radial, Side::Axial}) {
      const Side Y = opposite(X);
      const Vec a = random_mode(rng, d.space(Y)), b = random_mode(rng, d.space(Y));
      const auto ab = project_operator(d, X, a, b), ba = project_operator(d, X, b, a);
      for (std::size_t g = 0; g < ab.streaming.size(); ++g) CHECK(testsupport::max_rel(ab.streaming[g], ba.streaming[g]) < 1e-13);
    }
  }
}

TEST_CASE("1D two-ordinate and phi/J forms agree") {
  for (int L : {0, 1, 2}) {
    std::mt19937 rng(60 + L);
    const auto p = testsupport::small_problem(rng, 2, L);
    const auto d = decompose(p, {Split::Axial, EnergyMode::BothMultigroup});
    Vec R = Vec::Ones(d.radial.size()) + 0.3 * random_mode(rng, d.radial);
    auto co = project_operator(d, Side::Axial, R, R);
    cancel_streaming(co);
    const Vec rhs = testsupport::random_vector(rng, d.axial.size());
    auto tight = submodel_settings();
    tight.outer = {25, 500, 0, 1e-13};
    tight.inner = {25, 500, 0, 1e-14};
    const auto two = solve_submodel(d, Side::Axial, co, rhs, Vec::Zero(d.axial.size()), tight);
    CHECK(two.converged);
    const Vec p1 = solve_1d_p1_form(d, co, rhs);
    CHECK(rel_diff(two.mode, p1) < 1e-8);
    // against the dense oracle as well
    const Vec ref = numerics::dense_oracle_solve(d.axial, co, rhs);
    CHECK(rel_diff(ref, p1) < 1e-10);
  }
}

TEST_CASE("phi/J form: symmetric data and even source give zero current") {
  std::mt19937 rng(70);
  geometry::RadialSpec r{{0, 1.0}, {0, 1.0}, {0}};
  geometry::AxialSpec a{geometry::uniform_edges(0, 4, 8), {0, 0, 0, 0, 0, 0, 0, 0}};
  geometry::MaterialTable mt{1, 1, {0}};
  fom::Problem q{geometry::build_extruded_mesh(r, a, mt, {}), testsupport::random_xs(rng, 2, 1, 1, 1),
                 angle::build_product_quadrature(2, 1), {}};
  const auto d = decompose(q, {Split::Axial, EnergyMode::BothMultigroup});
  const Vec R = Vec::Ones(d.radial.size());
  auto co = project_operator(d, Side::Axial, R, R);
  cancel_streaming(co);
  // source symmetric in z and equal for both signs
  Vec rhs(d.axial.size());
  const int Cz = 8;
  for (int g = 0; g < 2; ++g)
    for (int s = 0; s < 2; ++s)
      for (int c = 0; c < Cz; ++c)
        for (int nu = 0; nu < 2; ++nu) rhs[d.axial.index(g, s, c, nu)] = 1.0 + 0.1 * g;
  const Vec Z = solve_1d_p1_form(d, co, rhs);
  for (int g = 0; g < 2; ++g)
    for (int c = 0; c < Cz; ++c)
      for (int nu = 0; nu < 2; ++nu) {
        // Z+(z) = Z-(h - z)
        const double up = Z[d.axial.index(g, 1, c, nu)];
        const double down = Z[d.axial.index(g, 0, Cz - 1 - c, 1 - nu)];
        CHECK(up == doctest::Approx(down).epsilon(1e-10));
      }
}

TEST_CASE("Galerkin orthogonality after a tight radial solve") {
  std::mt19937 rng(80);
  const auto p = testsupport::small_problem(rng, 2, 1);
  const auto space = fom::fom_space(p);
  const numerics::TransportOperator A3(space, fom::fom_coefficients(p));
  const Vec q3 = A3.mass(fom::source_field(p, space));
  for (const auto& v : all_variants()) {
    const auto d = decompose(p, v);
    const auto src = separate_source(d, p.source);
    const Vec Z = Vec::Ones(d.axial.size()) + 0.2 * random_mode(rng, d.axial);
    auto co = project_operator(d, Side::Radial, Z, Z);
    Vec rhs = project_source(d, Side::Radial, Z, src);
    const auto s = cancel_streaming(co);
    for (int x = 0; x < d.radial.groups; ++x)
      rhs.segment(x * d.radial.group_size(), d.radial.group_size()) /= s[x];
    auto tight = submodel_settings();
    tight.outer = {25, 500, 0, 1e-12};
    tight.inner = {25, 500, 0, 1e-13};
    const auto sol = solve_submodel(d, Side::Radial, co, rhs, Vec::Zero(d.radial.size()), tight);
    const Vec res3 = q3 - A3.apply(product(d, sol.mode, Z));
    const Vec proj = testsupport::project_3d(d, Side::Radial, Z, res3);
    CHECK_MESSAGE(proj.norm() < 1e-9 * project_source(d, Side::Radial, Z, src).norm(), v.name());
  }
}

TEST_CASE("zero source gives zero modes") {
  std::mt19937 rng(90);
  auto p = testsupport::small_problem(rng, 2, 1);
  for (auto& s : p.source.density) std::fill(s.begin(), s.end(), 0.0);
  PgdSettings s;
  s.max_modes = 3;
  SeparatedFlux f;
  const auto rep = run_pgd(p, {Split::AxialPolar, EnergyMode::BothMultigroup}, s, {}, &f);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].status == EnrichStatus::ZeroSource);
  CHECK(f.modes[0].radial.norm() == 0);
  CHECK(f.modes[0].axial.norm() == 0);
}

TEST_CASE("no modes requested gives an empty decomposition") {
  std::mt19937 rng(91);
  const auto p = testsupport::small_problem(rng, 1, 0);
  PgdSettings s;
  s.max_modes = 0;
  SeparatedFlux f;
  const auto rep = run_pgd(p, {Split::Axial, EnergyMode::BothMultigroup}, s, {}, &f);
  CHECK(rep.rows.empty());
  CHECK(f.size() == 0);
  const auto d = decompose(p, {Split::Axial, EnergyMode::BothMultigroup});
  CHECK(reconstruct(d, f).norm() == 0);
}

TEST_CASE("source separation reproduces the 3D source") {
  std::mt19937 rng(92);
  const auto p = testsupport::small_problem(rng, 3, 0);
  const auto space = fom::fom_space(p);
  const Vec q3 = fom::source_field(p, space);
  for (const auto& v : all_variants()) {
    const auto d = decompose(p, v);
    const auto src = separate_source(d, p.source);
    Vec sum = Vec::Zero(q3.size());
    for (const auto& t : src) add_product(d, t.radial, t.axial, 1.0, sum);
    CHECK_MESSAGE(rel_diff(sum, q3) < 1e-13, v.name());
  }
}

TEST_CASE("enrichment reduces the error against the full-order solution") {
  std::mt19937 rng(100);
  const auto p = testsupport::small_problem(rng, 2, 1, false, 2, 2);
  auto fs = fom::fom_settings();
  fs.outer.rel_tol = 1e-10;
  const auto ref = fom::solve_fom(p, fs);
  PgdSettings s;
  s.max_modes = 12;
  for (const auto& v : all_variants()) {
    const auto rep = run_pgd(p, v, s, {&ref.psi, &ref.phi});
    REQUIRE(rep.rows.size() >= 2);
    CHECK(rep.rows.back().err_angular < 0.5 * rep.rows.front().err_angular);
  }
}
