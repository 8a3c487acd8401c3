#pragma once

#include <Eigen/Dense>

#include "axpgd/transport.hpp"

namespace axpgd::numerics {

inline constexpr int kDenseUnknownCap = 20000;

// Full matrix of the transport operator built from global 1D matrices by
// Kronecker products, independently of the matrix-free kernels. Rows and
// columns use the PhaseSpace index order; rows are weak-form equations.
Eigen::MatrixXd assemble_dense(const PhaseSpace& space, const Coefficients& coef);

// Direct solve A psi = rhs (rhs in weak form). Refuses problems above the
// unknown cap with SizeError and reports singular systems with SingularError.
Vec dense_oracle_solve(const PhaseSpace& space, const Coefficients& coef, const Vec& rhs);

}  // namespace axpgd::numerics
