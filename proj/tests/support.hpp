#pragma once

#include <random>

#include "axpgd/angle.hpp"
#include "axpgd/transport.hpp"

namespace testsupport {

using namespace axpgd;
using namespace axpgd::numerics;

inline Eigen::MatrixXd random_matrix(std::mt19937& rng, int r, int c, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

inline Vec random_vector(std::mt19937& rng, int n) { return random_matrix(rng, n, 1); }

// Ordinates of the requested dimension: 1 polar line, 2 circle, 3 sphere;
// hemisphere-in-plane with dim = -2 and the sign pair with dim = -1.
inline OrdinateSet ordinates_for(int kind, int np = 1, int na = 1) {
  const auto q = angle::build_product_quadrature(np, na);
  switch (kind) {
    case 1: return polar_line_ordinates(q);
    case 2: return circle_ordinates(q);
    case -2: return hemisphere_ordinates(angle::restrict_to_hemisphere(q).quadrature);
    case -1: return sign_ordinates();
    default: return sphere_ordinates(q);
  }
}

// Random problem with R regions, random widths, moments and couplings.
inline std::pair<PhaseSpace, Coefficients> random_problem(std::mt19937& rng, std::vector<int> cells,
                                                          OrdinateSet ords, int G, int R, int H,
                                                          std::array<std::array<bool, 2>, 3> refl) {
  PhaseSpace sp;
  std::uniform_real_distribution<double> u(0.3, 1.7);
  for (int n : cells) {
    std::vector<double> w(n);
    for (auto& x : w) x = u(rng);
    sp.grid.widths.push_back(w);
  }
  sp.ordinates = std::move(ords);
  sp.groups = G;
  sp.reflective = refl;
  const int C = sp.grid.num_cells();
  for (int c = 0; c < C; ++c) sp.region_of_cell.push_back(static_cast<int>(rng() % R));
  sp.region_of_cell[0] = R - 1;
  Coefficients co;
  for (int g = 0; g < G; ++g) {
    co.streaming.push_back(u(rng));
    co.leakage.push_back(u(rng) - 1);
  }
  for (int r = 0; r < R; ++r) co.total.push_back(random_matrix(rng, G, 1, 1.5, 3.0));
  const int N = sp.ordinates.size();
  co.kernel.Y = random_matrix(rng, H, N);
  co.kernel.W = random_matrix(rng, H, N, 0, 0.2);
  co.kernel.kappa.assign(H, {});
  for (int h = 0; h < H; ++h)
    for (int r = 0; r < R; ++r) co.kernel.kappa[h].push_back(random_matrix(rng, G, G, 0, 0.3));
  return {sp, co};
}

}  // namespace testsupport
