#include "axpgd/krylov.hpp"

#include <cmath>

#include "axpgd/errors.hpp"

namespace axpgd::numerics {

GmresResult gmres_solve(const LinearMap& A, const Vec& b, const GmresSettings& s,
                        const LinearMap& precond, const Vec* x0) {
  if (s.restart < 1) throw ArgumentError("gmres restart must be >= 1");
  const Eigen::Index n = b.size();
  GmresResult res;
  res.x = x0 ? *x0 : Vec::Zero(n);
  Vec r(n), w(n);
  if (x0) {
    A(res.x, w);
    r = b - w;
  } else {
    r = b;
  }
  double beta = r.norm();
  if (!std::isfinite(beta)) throw NumericalError("gmres: non-finite initial residual");
  const double target = std::max(s.abs_tol, s.rel_tol * beta);
  res.residuals.push_back(beta);
  if (beta <= target) {
    res.converged = true;
    return res;
  }
  const int m = s.restart;
  std::vector<Vec> V(m + 1, Vec(n)), Z(m, Vec(n));
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  Vec cs(m), sn(m), g(m + 1);
  while (res.iterations < s.max_iters) {
    V[0] = r / beta;
    g.setZero();
    g[0] = beta;
    H.setZero();
    int j = 0;
    bool broke = false;
    for (; j < m && res.iterations < s.max_iters; ++j) {
      if (precond)
        precond(V[j], Z[j]);
      else
        Z[j] = V[j];
      A(Z[j], w);
      const double wnorm = w.norm();
      for (int i = 0; i <= j; ++i) {
        H(i, j) = V[i].dot(w);
        w -= H(i, j) * V[i];
      }
      H(j + 1, j) = w.norm();
      if (!std::isfinite(H(j + 1, j))) throw NumericalError("gmres: non-finite Krylov vector");
      const bool breakdown = H(j + 1, j) <= 1e-14 * wnorm;
      if (!breakdown) V[j + 1] = w / H(j + 1, j);
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double den = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = den > 0 ? H(j, j) / den : 1;
      sn[j] = den > 0 ? H(j + 1, j) / den : 0;
      H(j, j) = den;
      H(j + 1, j) = 0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      ++res.iterations;
      const double est = std::abs(g[j + 1]);
      res.residuals.push_back(est);
      if (est <= target || breakdown) {
        ++j;
        broke = breakdown;
        break;
      }
    }
    Vec y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    for (int i = 0; i < j; ++i) res.x += y[i] * Z[i];
    A(res.x, w);
    r = b - w;
    beta = r.norm();
    if (!std::isfinite(beta)) throw NumericalError("gmres: non-finite residual");
    res.residuals.back() = beta;
    if (beta <= target) {
      res.converged = true;
      return res;
    }
    // breakdown short of the target: the Krylov space cannot improve further
    if (broke) return res;
  }
  return res;
}

void EnergyGaussSeidel::operator()(const Vec& v, Vec& z) const {
  const TransportOperator& A = *op;
  const int G = A.groups();
  const Eigen::Index gs = A.group_size();
  z = Vec::Zero(v.size());
  Vec tmp(gs), sw(gs), rhs(gs);
  // full-size scratch for the K application on group blocks
  Vec full = Vec::Zero(v.size());
  for (int g = 0; g < G; ++g) {
    rhs = v.segment(g * gs, gs);
    if (g > 0) {
      tmp.setZero();
      A.add_K_group(g, z, 0, g, tmp.data());
      if (tmp.squaredNorm() > 0) {
        A.sweep_group(g, tmp.data(), sw.data());
        rhs += sw;
      }
    }
    const LinearMap within = [&](const Vec& x, Vec& y) {
      full.segment(g * gs, gs) = x;
      tmp.setZero();
      A.add_K_group(g, full, g, g + 1, tmp.data());
      A.sweep_group(g, tmp.data(), sw.data());
      y = x - sw;
    };
    const GmresResult r = gmres_solve(within, rhs, inner);
    ++solves;
    if (!r.converged) ++unconverged;
    z.segment(g * gs, gs) = r.x;
    full.segment(g * gs, gs).setZero();
  }
}

TransportSolveResult solve_transport(const TransportOperator& op, const Vec& rhs,
                                     const TransportSolveSettings& s, const Vec* x0) {
  if (rhs.size() != op.size()) throw ShapeError("transport solve: rhs size mismatch");
  TransportSolveResult out;
  const Vec b = op.sweep(rhs);
  out.uncollided_norm = b.norm();
  const LinearMap A = [&](const Vec& x, Vec& y) { y = x - op.sweep(op.apply_K(x)); };
  EnergyGaussSeidel gs{&op, s.inner};
  LinearMap pre;
  if (s.precondition) pre = [&](const Vec& v, Vec& z) { gs(v, z); };
  out.outer = gmres_solve(A, b, s.outer, pre, x0);
  out.psi = out.outer.x;
  out.inner_solves = gs.solves;
  out.inner_unconverged = gs.unconverged;
  return out;
}

}  // namespace axpgd::numerics
