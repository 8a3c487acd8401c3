#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "axpgd/transport.hpp"

namespace axpgd::numerics {

using LinearMap = std::function<void(const Vec& in, Vec& out)>;

struct GmresSettings {
  int restart = 5;
  int max_iters = 1000;
  double abs_tol = 0;
  double rel_tol = 1e-6;
};

struct GmresResult {
  Vec x;
  std::vector<double> residuals;  // initial residual, then one per iteration
  int iterations = 0;
  bool converged = false;
};

// Restarted flexible GMRES with right preconditioning (the preconditioner may
// change between iterations), modified Gram-Schmidt and Givens rotations.
// Stops once ||b - A x|| <= max(abs_tol, rel_tol ||b - A x0||). A null
// preconditioner means identity; x0 defaults to zero.
GmresResult gmres_solve(const LinearMap& A, const Vec& b, const GmresSettings& s,
                        const LinearMap& precond = nullptr, const Vec* x0 = nullptr);

struct TransportSolveSettings {
  GmresSettings outer{5, 1000, 0, 1e-6};
  GmresSettings inner{15, 250, 1e-6, 1e-2};
  bool precondition = true;
};

struct TransportSolveResult {
  Vec psi;
  GmresResult outer;
  int inner_solves = 0;
  int inner_unconverged = 0;
  double uncollided_norm = 0;
};

// Solves A psi = rhs (weak form) as (I - T^{-1} K) psi = T^{-1} rhs. With the
// default x0 = 0 the reference residual is the norm of the uncollided flux.
// The preconditioner is one block Gauss-Seidel pass over groups with the
// within-group blocks solved by inner GMRES.
TransportSolveResult solve_transport(const TransportOperator& op, const Vec& rhs,
                                     const TransportSolveSettings& s, const Vec* x0 = nullptr);

// One Gauss-Seidel pass in energy applied to v for the operator I - T^{-1} K.
struct EnergyGaussSeidel {
  const TransportOperator* op = nullptr;
  GmresSettings inner;
  mutable int solves = 0;
  mutable int unconverged = 0;

  void operator()(const Vec& v, Vec& z) const;
};

}  // namespace axpgd::numerics
