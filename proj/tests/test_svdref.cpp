#include <cmath>

#include <doctest.h>

#include "axpgd/svdref.hpp"
#include "pgd_support.hpp"

using namespace axpgd;
using namespace axpgd::pgd;
using testsupport::rel_diff;

namespace {

Vec random_field(std::mt19937& rng, const numerics::PhaseSpace& sp) { return testsupport::random_vector(rng, sp.size()); }

}  // namespace

TEST_CASE("outer product has one singular triplet") {
  std::mt19937 rng(1);
  const auto p = testsupport::small_problem(rng, 2, 0);
  for (const auto& v : all_variants()) {
    const auto d = decompose(p, v);
    const Vec psi = product(d, random_field(rng, d.radial), random_field(rng, d.axial));
    const auto ref = svdref::svd_reference(d, psi, 5);
    const auto err = svdref::error_curves(d, ref.flux, psi);
    REQUIRE(!err.empty());
    CHECK_MESSAGE(err[0].angular < 1e-12, v.name());
    CHECK(ref.tail2(1) < 1e-24 * ref.norm2);
    if (v.energy == EnergyMode::BothMultigroup) {
      for (const auto& s : ref.sigma) CHECK(s[1] < 1e-12 * s[0]);
    }
  }
}

TEST_CASE("full rank reproduces the flux and the tail sums are the errors") {
  std::mt19937 rng(2);
  const auto p = testsupport::small_problem(rng, 2, 0);
  for (const auto& v : all_variants()) {
    const auto d = decompose(p, v);
    const Vec psi = random_field(rng, d.full);
    const auto ref = svdref::svd_reference(d, psi, 1000);
    CHECK(ref.norm2 == doctest::Approx(fom::angular_norm2(d.full, d.group_weight, psi)).epsilon(1e-12));
    const auto err = svdref::error_curves(d, ref.flux, psi);
    CHECK_MESSAGE(err.back().angular < 1e-12, v.name());
    bool monotone = true, tails = true;
    for (std::size_t m = 0; m < err.size(); ++m) {
      if (m > 0) monotone = monotone && err[m].angular <= err[m - 1].angular + 1e-14;
      const double t = std::sqrt(std::max(ref.tail2(m + 1), 0.0) / ref.norm2);
      tails = tails && std::abs(t - err[m].angular) < 1e-10;
    }
    CHECK(monotone);
    CHECK(tails);
    for (const auto& s : ref.sigma)
      for (std::size_t m = 1; m < s.size(); ++m) CHECK(s[m] <= s[m - 1]);
  }
}

TEST_CASE("truncated SVD beats random and perturbed candidates of the same rank") {
  std::mt19937 rng(3);
  const auto p = testsupport::small_problem(rng, 2, 0);
  std::normal_distribution<double> nrm(0, 1);
  for (const auto& v : all_variants()) {
    const auto d = decompose(p, v);
    const Vec psi = random_field(rng, d.full);
    for (int M : {1, 3}) {
      const auto ref = svdref::svd_reference(d, psi, M);
      const double best = svdref::error_curves(d, ref.flux, psi).back().angular;
      bool dominated = true;
      for (int trial = 0; trial < 20; ++trial) {
        SeparatedFlux cand = ref.flux;
        const double eps = trial < 10 ? 1e-3 : 1.0;
        for (auto& m : cand.modes) {
          m.radial += eps * random_field(rng, d.radial) * m.radial.norm() / std::sqrt(double(m.radial.size()));
          m.axial += eps * random_field(rng, d.axial) * m.axial.norm() / std::sqrt(double(m.axial.size()));
        }
        dominated = dominated && svdref::error_curves(d, cand, psi).back().angular >= best - 1e-14;
      }
      CHECK_MESSAGE(dominated, v.name());
    }
  }
}

TEST_CASE("SVD modes are orthonormal in the weighted inner product") {
  std::mt19937 rng(4);
  const auto p = testsupport::small_problem(rng, 1, 0);
  const auto d = decompose(p, {Split::Axial, EnergyMode::BothMultigroup});
  const Vec psi = random_field(rng, d.full);
  const auto ref = svdref::svd_reference(d, psi, 4);
  // radial factors carry sigma and the lethargy weight, axial factors are unit vectors
  const double ratio = p.quadrature.weight[0] /
                       (d.radial.ordinates.weight[d.radial_ordinate[0]] * d.axial.ordinates.weight[d.axial_ordinate[0]]);
  for (std::size_t a = 0; a < ref.flux.size(); ++a)
    for (std::size_t b = 0; b < ref.flux.size(); ++b) {
      const double zz = ratio * weighted_inner(d, Side::Axial, ref.flux.modes[a].axial.data(), ref.flux.modes[b].axial.data());
      CHECK(zz == doctest::Approx(a == b ? 1.0 : 0.0).scale(1).epsilon(1e-12));
      const double rr = d.group_weight[0] * weighted_inner(d, Side::Radial, ref.flux.modes[a].radial.data(), ref.flux.modes[b].radial.data());
      const double expect = a == b ? std::pow(ref.sigma[0][a], 2) : 0.0;
      CHECK(rr == doctest::Approx(expect).scale(ref.sigma[0][0] * ref.sigma[0][0]).epsilon(1e-12));
    }
}

TEST_CASE("SVD error is below the PGD error at every rank") {
  std::mt19937 rng(5);
  const auto p = testsupport::small_problem(rng, 2, 1, false, 2, 2);
  auto fs = fom::fom_settings();
  fs.outer.rel_tol = 1e-10;
  const auto ref = fom::solve_fom(p, fs);
  PgdSettings s;
  s.max_modes = 8;
  for (const auto& v : all_variants()) {
    const auto rom = run_pgd(p, v, s, {&ref.psi, &ref.phi});
    const auto svd = svdref::run_svd(p, v, ref.psi, s.max_modes);
    REQUIRE(svd.rows.size() >= rom.rows.size());
    for (std::size_t m = 0; m < rom.rows.size(); ++m)
      CHECK_MESSAGE(svd.rows[m].err_angular <= rom.rows[m].err_angular + 1e-10, v.name());
  }
}

TEST_CASE("memory cap refuses oversized unfoldings") {
  std::mt19937 rng(6);
  const auto p = testsupport::small_problem(rng, 1, 0);
  const auto d = decompose(p, {Split::AxialPolar, EnergyMode::BothMultigroup});
  CHECK_THROWS_AS(svdref::svd_reference(d, Vec::Zero(d.full.size()), 1, 1000), SizeError);
  CHECK_THROWS_AS(svdref::svd_reference(d, Vec::Zero(3), 1), ShapeError);
  const auto z = svdref::svd_reference(d, Vec::Zero(d.full.size()), 3);
  CHECK(z.flux.size() == 0);
}
