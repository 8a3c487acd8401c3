#include <doctest.h>

#include "axpgd/dense.hpp"
#include "axpgd/errors.hpp"
#include "support.hpp"

using namespace testsupport;

namespace {

using Refl = std::array<std::array<bool, 2>, 3>;

double rel(const Vec& a, const Vec& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

void check_against_dense(std::vector<int> cells, OrdinateSet ords, int G, Refl refl, unsigned seed) {
  std::mt19937 rng(seed);
  auto [sp, co] = random_problem(rng, cells, std::move(ords), G, 2, 3, refl);
  const TransportOperator op(sp, co);
  const Eigen::MatrixXd A = assemble_dense(sp, co);
  double worst = 0, worst_sweep = 0;
  for (int t = 0; t < 50; ++t) {
    const Vec x = random_vector(rng, op.size());
    worst = std::max(worst, rel(op.apply(x), A * x));
    worst_sweep = std::max(worst_sweep, rel(op.sweep(op.apply_T(x)), x));
  }
  CHECK(worst < 1e-13);
  CHECK(worst_sweep < 1e-12);
}

}  // namespace

TEST_CASE("matrix-free operator matches dense assembly") {
  const Refl none{};
  Refl low{};
  low[0][0] = low[1][0] = low[2][0] = true;
  Refl all{};
  for (auto& a : all) a = {true, true};
  SUBCASE("3D sphere") {
    check_against_dense({2, 2, 2}, ordinates_for(3), 1, none, 1);
    check_against_dense({2, 2, 2}, ordinates_for(3), 2, low, 2);
    check_against_dense({2, 3, 2}, ordinates_for(3), 2, all, 3);
  }
  SUBCASE("2D circle and hemisphere") {
    check_against_dense({3, 2}, ordinates_for(2, 1, 2), 2, low, 4);
    check_against_dense({3, 3}, ordinates_for(-2, 2, 1), 2, all, 5);
  }
  SUBCASE("1D polar line and sign pair") {
    check_against_dense({5}, ordinates_for(1, 2), 3, all, 6);
    check_against_dense({5}, ordinates_for(-1), 2, low, 7);
    check_against_dense({4}, ordinates_for(1, 3), 1, none, 8);
  }
}

TEST_CASE("infinite homogeneous absorber balance") {
  PhaseSpace sp;
  sp.grid.widths = {{1, 0.5}, {0.7, 0.7}, {2, 1}};
  sp.ordinates = ordinates_for(3, 2, 2);
  sp.region_of_cell.assign(sp.grid.num_cells(), 0);
  for (auto& a : sp.reflective) a = {true, true};
  Coefficients co;
  co.streaming = {1};
  co.leakage = {0};
  co.total = {Eigen::VectorXd::Constant(1, 2.5)};
  const TransportOperator op(sp, co);
  const Vec q = Vec::Constant(op.size(), 1.0);
  const Vec psi = Vec::Constant(op.size(), 1 / 2.5);
  CHECK((op.mass(q) - op.apply(psi)).norm() < 1e-12);
  CHECK(op.apply(Vec::Zero(op.size())).norm() == 0);
}

TEST_CASE("purely axial streaming reduces to one column") {
  std::mt19937 rng(11);
  PhaseSpace s3;
  s3.grid.widths = {{1.0}, {1.0}, {0.5, 1.0, 0.8, 1.2}};
  s3.ordinates = ordinates_for(3, 2, 1);
  s3.region_of_cell = {0, 1, 1, 0};
  for (int d = 0; d < 2; ++d) s3.reflective[d] = {true, true};
  Coefficients co;
  co.streaming = {1};
  co.leakage = {0};
  co.total = {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 2.0)};
  const TransportOperator op3(s3, co);
  // A field constant in x and y: every radial node of a column holds the
  // same value and reflection maps it onto itself, so the x/y streaming
  // terms cancel.
  const int N = s3.ordinates.size();
  // depends on the polar index only, so it is invariant under x/y mirrors
  const int na = 4;
  const Vec polar = random_vector(rng, (N / na) * 4 * 2);
  Vec col(N * 4 * 2);
  for (int n = 0; n < N; ++n) col.segment(n * 8, 8) = polar.segment((n / na) * 8, 8);
  Vec psi(op3.size());
  for (int n = 0; n < N; ++n)
    for (int c = 0; c < 4; ++c)
      for (int nu = 0; nu < 8; ++nu) psi[s3.index(0, n, c, nu)] = col[(n * 4 + c) * 2 + (nu >> 2)];
  PhaseSpace s1;
  s1.grid.widths = {s3.grid.widths[2]};
  s1.region_of_cell = s3.region_of_cell;
  s1.ordinates.weight = s3.ordinates.weight;
  s1.ordinates.velocity = {s3.ordinates.velocity[2]};
  s1.ordinates.mirror = {s3.ordinates.mirror[2]};
  s1.ordinates.leakage_factor = s3.ordinates.leakage_factor;
  const TransportOperator op1(s1, co);
  const Vec r3 = op3.apply(psi), r1 = op1.apply(col);
  // the radial test functions of a unit cell integrate to 1/4 each
  for (int n = 0; n < N; ++n)
    for (int c = 0; c < 4; ++c)
      for (int nu = 0; nu < 8; ++nu)
        CHECK(r3[s3.index(0, n, c, nu)] == doctest::Approx(0.25 * r1[(n * 4 + c) * 2 + (nu >> 2)]).epsilon(1e-12));
}

TEST_CASE("dense oracle solve") {
  PhaseSpace sp;
  sp.grid.widths = {{1.0}};
  sp.ordinates = ordinates_for(1, 1);
  sp.region_of_cell = {0};
  for (auto& a : sp.reflective) a = {true, true};
  Coefficients co;
  co.streaming = {1};
  co.leakage = {0};
  co.total = {Eigen::VectorXd::Constant(1, 4.0)};
  const TransportOperator op(sp, co);
  const Vec q = Vec::Constant(op.size(), 2.0);
  const Vec psi = dense_oracle_solve(sp, co, op.mass(q));
  CHECK((psi - Vec::Constant(op.size(), 0.5)).norm() < 1e-13);

  Coefficients voided = co;
  voided.total = {Eigen::VectorXd::Zero(1)};
  CHECK_THROWS_AS(dense_oracle_solve(sp, voided, op.mass(q)), SingularError);

  PhaseSpace big = sp;
  big.grid.widths = {std::vector<double>(20000, 1.0)};
  big.region_of_cell.assign(20000, 0);
  CHECK_THROWS_AS(assemble_dense(big, co), SizeError);
}
