#include "axpgd/dense.hpp"

#include <cmath>
#include <string>

#include "axpgd/errors.hpp"

namespace axpgd::numerics {

namespace {

using Eigen::MatrixXd;

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

// Global matrices of one axis over 2 n nodes ordered (cell, bit).
MatrixXd axis_mass(const std::vector<double>& w) {
  const int n = static_cast<int>(w.size());
  MatrixXd m = MatrixXd::Zero(2 * n, 2 * n);
  for (int c = 0; c < n; ++c) m.block(2 * c, 2 * c, 2, 2) << w[c] / 3, w[c] / 6, w[c] / 6, w[c] / 3;
  return m;
}

MatrixXd axis_stream(int n, int sign) {
  MatrixXd s = MatrixXd::Zero(2 * n, 2 * n);
  for (int c = 0; c < n; ++c) {
    if (sign > 0) {
      s.block(2 * c, 2 * c, 2, 2) << 0.5, 0.5, -0.5, 0.5;
      if (c > 0) s(2 * c, 2 * c - 1) = -1;
    } else {
      s.block(2 * c, 2 * c, 2, 2) << 0.5, -0.5, 0.5, 0.5;
      if (c < n - 1) s(2 * c + 1, 2 * c + 2) = -1;
    }
  }
  return s;
}

MatrixXd axis_boundary(int n, int side) {
  MatrixXd r = MatrixXd::Zero(2 * n, 2 * n);
  const int k = side == 0 ? 0 : 2 * n - 1;
  r(k, k) = 1;
  return r;
}

// Kronecker product with axis 0 varying fastest.
MatrixXd tensor(const std::vector<MatrixXd>& per_axis) {
  MatrixXd k = per_axis.back();
  for (int a = static_cast<int>(per_axis.size()) - 2; a >= 0; --a) k = kron(k, per_axis[a]);
  return k;
}

}  // namespace

MatrixXd assemble_dense(const PhaseSpace& space, const Coefficients& coef) {
  const auto& grid = space.grid;
  const auto& ord = space.ordinates;
  const int D = grid.dim(), K = grid.nodes_per_cell(), C = grid.num_cells();
  const int N = ord.size(), G = space.groups, CK = C * K;
  if (static_cast<long long>(G) * N * CK > kDenseUnknownCap)
    throw SizeError("dense assembly limited to " + std::to_string(kDenseUnknownCap) + " unknowns");

  // Axis-major node I = i0 + 2 n0 (i1 + 2 n1 i2) to cell-local (c, nu).
  std::vector<int> perm(CK);
  std::vector<int> region_of_node(CK);
  for (int I = 0; I < CK; ++I) {
    int rest = I, c = 0, nu = 0, cstride = 1;
    for (int a = 0; a < D; ++a) {
      const int ia = rest % (2 * grid.n(a));
      rest /= 2 * grid.n(a);
      c += (ia / 2) * cstride;
      nu += (ia % 2) << a;
      cstride *= grid.n(a);
    }
    perm[I] = c * K + nu;
    region_of_node[I] = space.region_of_cell[c];
  }

  std::vector<MatrixXd> masses;
  for (int a = 0; a < D; ++a) masses.push_back(axis_mass(grid.widths[a]));
  const MatrixXd mass = tensor(masses);

  auto with_axis = [&](int d, const MatrixXd& m) {
    std::vector<MatrixXd> f = masses;
    f[d] = m;
    return tensor(f);
  };

  MatrixXd A = MatrixXd::Zero(G * N * CK, G * N * CK);
  auto block = [&](int g, int n, int gp, int np) { return A.block((g * N + n) * CK, (gp * N + np) * CK, CK, CK); };

  for (int g = 0; g < G; ++g)
    for (int n = 0; n < N; ++n) {
      MatrixXd diag = MatrixXd::Zero(CK, CK);
      for (int I = 0; I < CK; ++I) {
        const double sig = coef.total[region_of_node[I]][g] + coef.leakage[g] * ord.leakage_factor[n];
        diag.row(I) = sig * mass.row(I);
      }
      for (int d = 0; d < D; ++d) {
        const double v = ord.velocity[d][n];
        if (v == 0) continue;
        const int sign = v > 0 ? 1 : -1;
        diag += coef.streaming[g] * std::abs(v) * with_axis(d, axis_stream(grid.n(d), sign));
        const int side = sign > 0 ? 0 : 1;
        if (space.reflective[d][side])
          block(g, n, g, ord.mirror[d][n]) -=
              coef.streaming[g] * std::abs(v) * with_axis(d, axis_boundary(grid.n(d), side));
      }
      block(g, n, g, n) += diag;
    }

  const auto& ker = coef.kernel;
  for (int h = 0; h < ker.num_moments(); ++h)
    for (int g = 0; g < G; ++g)
      for (int gp = 0; gp < G; ++gp) {
        MatrixXd km(CK, CK);
        for (int I = 0; I < CK; ++I) km.row(I) = ker.kappa[h][region_of_node[I]](g, gp) * mass.row(I);
        if (km.isZero(0)) continue;
        for (int n = 0; n < N; ++n)
          for (int np = 0; np < N; ++np) block(g, n, gp, np) -= ker.Y(h, n) * ker.W(h, np) * km;
      }

  // Reorder nodes within every (g, n) block.
  const int B = G * N;
  MatrixXd out(A.rows(), A.cols());
  for (int bi = 0; bi < B; ++bi)
    for (int bj = 0; bj < B; ++bj) {
      const auto src = A.block(bi * CK, bj * CK, CK, CK);
      if (src.isZero(0)) {
        out.block(bi * CK, bj * CK, CK, CK).setZero();
        continue;
      }
      for (int I = 0; I < CK; ++I)
        for (int J = 0; J < CK; ++J) out(bi * CK + perm[I], bj * CK + perm[J]) = src(I, J);
    }
  return out;
}

Vec dense_oracle_solve(const PhaseSpace& space, const Coefficients& coef, const Vec& rhs) {
  const MatrixXd A = assemble_dense(space, coef);
  if (rhs.size() != A.rows()) throw ShapeError("dense solve: right-hand side size mismatch");
  Eigen::PartialPivLU<MatrixXd> lu(A);
  if (!(lu.rcond() > 1e-13)) throw SingularError("dense transport matrix is singular");
  return lu.solve(rhs);
}

}  // namespace axpgd::numerics
