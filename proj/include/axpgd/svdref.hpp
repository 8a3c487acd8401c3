#pragma once

#include <cstddef>
#include <vector>

#include "axpgd/pgd.hpp"

namespace axpgd::svdref {

using numerics::Vec;

// Truncated SVD of a 3D flux in the radial x axial unfolding of one variant,
// computed in the weighted L2 inner product (ordinate weights, element
// masses, inverse lethargy widths). Group-wise variants get one SVD per group.
struct ReferenceDecomposition {
  pgd::RomVariant variant;
  std::vector<std::vector<double>> sigma;  // [block][m], all singular values
  pgd::SeparatedFlux flux;                 // leading modes, R scaled by sigma
  double norm2 = 0;                        // weighted squared norm of the input

  // Weighted squared error of the rank-M truncation.
  double tail2(int M) const;
};

// Refuses dense unfoldings above memory_cap bytes.
ReferenceDecomposition svd_reference(const pgd::Decomposition& d, const Vec& psi, int max_modes,
                                     std::size_t memory_cap = std::size_t(4) << 30);

struct ErrorPoint {
  double angular = 0;
  double scalar = 0;
};

// Relative weighted L2 errors of the partial sums M = 1..size.
std::vector<ErrorPoint> error_curves(const pgd::Decomposition& d, const pgd::SeparatedFlux& f, const Vec& psi_ref);

// Report rows of the SVD curve; wall time is the time of the decomposition.
pgd::RunReport run_svd(const fom::Problem& p, pgd::RomVariant v, const Vec& psi_ref, int max_modes);

}  // namespace axpgd::svdref
