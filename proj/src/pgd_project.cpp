#include <cmath>
#include <numbers>

#include "axpgd/errors.hpp"
#include "axpgd/pgd.hpp"

namespace axpgd::pgd {

using std::numbers::pi;

namespace {

// Per-cell mass inner products of two spatial blocks, accumulated by region.
Eigen::VectorXd spatial_region_inner(const Decomposition& d, Side s, const double* a, const double* b) {
  const auto& sp = d.space(s);
  const auto& M = d.masses(s);
  const int C = sp.grid.num_cells(), K = sp.grid.nodes_per_cell();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sp.num_regions());
  for (int c = 0; c < C; ++c) {
    const Eigen::Map<const Eigen::VectorXd> av(a + std::size_t(c) * K, K), bv(b + std::size_t(c) * K, K);
    out[sp.region_of_cell[c]] += av.dot(M[c] * bv);
  }
  return out;
}

// Opposite-side quantities of one (test group, trial group) block.
struct BlockInner {
  double streaming = 0;
  double leakage = 0;
  Eigen::VectorXd mass;     // [region]
  Eigen::MatrixXd moments;  // [region] x T
};

class Projector {
 public:
  Projector(const Decomposition& d, Side unknown, const Vec& test, const Vec& trial)
      : d_(d), x_(unknown), y_(opposite(unknown)), test_(test), trial_(trial) {
    const auto& ys = d.space(y_);
    if (test.size() != ys.size() || trial.size() != ys.size())
      throw ShapeError("projection modes do not match the opposite space");
    const auto& lay = d.kernel(x_);
    const int G = ys.groups, N = ys.ordinates.size();
    const int CK = ys.grid.num_cells() * ys.grid.nodes_per_cell();
    for (int b = 0; b < G; ++b) {
      const Eigen::Map<const Eigen::MatrixXd> A(test.data() + std::size_t(b) * ys.group_size(), CK, N);
      const Eigen::Map<const Eigen::MatrixXd> B(trial.data() + std::size_t(b) * ys.group_size(), CK, N);
      test_mom_.push_back(A * lay.partner_W.transpose());
      trial_mom_.push_back(B * lay.partner_W.transpose());
    }
    blocks_.resize(G * G);
    done_.assign(G * G, false);
  }

  const BlockInner& block(int a, int b) {
    const int G = d_.space(y_).groups;
    BlockInner& out = blocks_[a * G + b];
    if (done_[a * G + b]) return out;
    done_[a * G + b] = true;
    const auto& ys = d_.space(y_);
    const int T = d_.kernel(x_).partner_W.rows();
    out.moments.resize(ys.num_regions(), T);
    for (int t = 0; t < T; ++t)
      out.moments.col(t) = spatial_region_inner(d_, y_, test_mom_[a].col(t).data(), trial_mom_[b].col(t).data());
    if (a != b) return out;
    const double* ta = test_.data() + std::size_t(a) * ys.group_size();
    const double* tb = trial_.data() + std::size_t(a) * ys.group_size();
    out.mass = region_inners(d_, y_, ta, tb);
    const int N = ys.ordinates.size(), CK = ys.grid.num_cells() * ys.grid.nodes_per_cell();
    for (int n = 0; n < N; ++n) {
      const double w = ys.ordinates.weight[n] * ys.ordinates.leakage_factor[n];
      const Eigen::VectorXd r = spatial_region_inner(d_, y_, ta + std::size_t(n) * CK, tb + std::size_t(n) * CK);
      out.streaming += w * r.sum();
    }
    const Vec lt = d_.stream(y_).apply(Eigen::Map<const Vec>(tb, ys.group_size()));
    for (int n = 0; n < N; ++n)
      out.leakage += ys.ordinates.weight[n] *
                     Eigen::Map<const Vec>(ta + std::size_t(n) * CK, CK).dot(lt.segment(std::size_t(n) * CK, CK));
    return out;
  }

 private:
  const Decomposition& d_;
  Side x_, y_;
  const Vec& test_;
  const Vec& trial_;
  std::vector<Eigen::MatrixXd> test_mom_, trial_mom_;  // per group: CK x T
  std::vector<BlockInner> blocks_;
  std::vector<bool> done_;
};

double condensation_weight(const Decomposition& d, Side s, int g) {
  return d.multigroup(s) ? 1.0 : d.group_weight[g];
}

}  // namespace

numerics::Coefficients project_operator(const Decomposition& d, Side unknown, const Vec& test,
                                        const Vec& trial) {
  const Side other = opposite(unknown);
  const auto& xs_space = d.space(unknown);
  const auto& lay = d.kernel(unknown);
  const int Gx = xs_space.groups, G = d.groups;
  const int RX = xs_space.num_regions(), RY = d.space(other).num_regions();
  const int H = static_cast<int>(lay.Y.rows());
  Projector proj(d, unknown, test, trial);

  numerics::Coefficients co;
  co.streaming.assign(Gx, 0.0);
  co.leakage.assign(Gx, 0.0);
  co.total.assign(RX, Eigen::VectorXd::Zero(Gx));
  co.kernel.Y = lay.Y;
  co.kernel.W = lay.W;
  co.kernel.kappa.assign(H, std::vector<Eigen::MatrixXd>(RX, Eigen::MatrixXd::Zero(Gx, Gx)));

  for (int g = 0; g < G; ++g) {
    const int x = d.mode_group(unknown, g), a = d.mode_group(other, g);
    const double w = condensation_weight(d, unknown, g);
    const BlockInner& diag = proj.block(a, a);
    co.streaming[x] += w * diag.streaming;
    co.leakage[x] += w * diag.leakage;
    for (int rx = 0; rx < RX; ++rx)
      for (int ry = 0; ry < RY; ++ry) co.total[rx][x] += w * d.xs.slots[d.slot(unknown, rx, ry)].total[g] * diag.mass[ry];
    for (int gp = 0; gp < G; ++gp) {
      const int xp = d.mode_group(unknown, gp), b = d.mode_group(other, gp);
      bool any = false;
      for (const auto& mat : d.xs.slots)
        for (const auto& s : mat.scatter) any = any || s(gp, g) != 0;
      if (!any) continue;
      const BlockInner& blk = proj.block(a, b);
      for (int h = 0; h < H; ++h)
        for (auto [t, l] : lay.couple[h])
          for (int rx = 0; rx < RX; ++rx)
            for (int ry = 0; ry < RY; ++ry) {
              const double sig = d.xs.slots[d.slot(unknown, rx, ry)].scatter[l](gp, g);
              if (sig == 0) continue;
              co.kernel.kappa[h][rx](x, xp) += w * (2 * l + 1) / (4 * pi) * sig * blk.moments(ry, t);
            }
    }
  }
  return co;
}

Vec project_source(const Decomposition& d, Side unknown, const Vec& test, const SeparatedSource& q) {
  const Side other = opposite(unknown);
  const auto& xsp = d.space(unknown);
  const auto& ysp = d.space(other);
  if (test.size() != ysp.size()) throw ShapeError("projection mode does not match the opposite space");
  Vec nodal = Vec::Zero(xsp.size());
  const std::size_t gx = xsp.group_size(), gy = ysp.group_size();
  for (const auto& term : q) {
    const Vec& qx = unknown == Side::Radial ? term.radial : term.axial;
    const Vec& qy = unknown == Side::Radial ? term.axial : term.radial;
    for (int g = 0; g < d.groups; ++g) {
      const int x = d.mode_group(unknown, g), a = d.mode_group(other, g);
      const double c = weighted_inner(d, other, test.data() + a * gy, qy.data() + a * gy);
      if (c == 0) continue;
      nodal.segment(x * gx, gx) += condensation_weight(d, unknown, g) * c * qx.segment(x * gx, gx);
    }
  }
  Vec dual = Vec::Zero(xsp.size());
  const auto& M = d.masses(unknown);
  const int K = xsp.grid.nodes_per_cell(), C = xsp.grid.num_cells();
  const int blocks = xsp.groups * xsp.ordinates.size();
  for (int bI = 0; bI < blocks; ++bI)
    for (int c = 0; c < C; ++c) {
      const std::size_t off = (std::size_t(bI) * C + c) * K;
      dual.segment(off, K) = M[c] * nodal.segment(off, K);
    }
  return dual;
}

std::vector<double> cancel_streaming(numerics::Coefficients& c) {
  std::vector<double> s = c.streaming;
  for (std::size_t x = 0; x < s.size(); ++x) {
    if (s[x] == 0) throw DegenerateModeError("streaming coefficient is zero");
    c.streaming[x] = 1.0;
    c.leakage[x] /= s[x];
    for (auto& t : c.total) t[x] /= s[x];
    for (auto& km : c.kernel.kappa)
      for (auto& k : km) k.row(x) /= s[x];
  }
  return s;
}

}  // namespace axpgd::pgd
