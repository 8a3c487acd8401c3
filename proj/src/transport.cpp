#include "axpgd/transport.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "axpgd/errors.hpp"

namespace axpgd::numerics {

int CartesianGrid::num_cells() const {
  int c = 1;
  for (const auto& w : widths) c *= static_cast<int>(w.size());
  return c;
}

int PhaseSpace::num_regions() const {
  int r = 0;
  for (int x : region_of_cell) r = std::max(r, x + 1);
  return r;
}

namespace {

void require_product(const angle::AngularQuadrature& q, int azim_multiple) {
  if (!q.product) throw StructureError("ordinate set needs a product quadrature");
  if (q.num_azim() % azim_multiple != 0)
    throw StructureError("azimuthal node count must be a multiple of " +
                         std::to_string(azim_multiple));
}

int mirror_x(int a, int na) { return ((na / 2 - 1 - a) % na + na) % na; }
int mirror_y(int a, int na) { return na - 1 - a; }

}  // namespace

OrdinateSet sphere_ordinates(const angle::AngularQuadrature& q) {
  require_product(q, 4);
  OrdinateSet s;
  const int np = q.num_polar(), na = q.num_azim();
  s.velocity.assign(3, std::vector<double>(q.size()));
  s.mirror.assign(3, std::vector<int>(q.size()));
  s.weight = q.weight;
  s.leakage_factor.assign(q.size(), 1.0);
  for (int p = 0; p < np; ++p)
    for (int a = 0; a < na; ++a) {
      const int n = q.index(p, a);
      const double st = std::sqrt(std::max(0.0, 1 - q.mu[n] * q.mu[n]));
      s.velocity[0][n] = st * std::cos(q.omega[n]);
      s.velocity[1][n] = st * std::sin(q.omega[n]);
      s.velocity[2][n] = q.mu[n];
      s.mirror[0][n] = q.index(p, mirror_x(a, na));
      s.mirror[1][n] = q.index(p, mirror_y(a, na));
      s.mirror[2][n] = q.index(np - 1 - p, a);
    }
  return s;
}

OrdinateSet circle_ordinates(const angle::AngularQuadrature& q) {
  require_product(q, 4);
  OrdinateSet s;
  const int na = q.num_azim();
  s.velocity.assign(2, std::vector<double>(na));
  s.mirror.assign(2, std::vector<int>(na));
  s.weight = q.azim_weights;
  s.leakage_factor.assign(na, 1.0);
  for (int a = 0; a < na; ++a) {
    s.velocity[0][a] = std::cos(q.azim_nodes[a]);
    s.velocity[1][a] = std::sin(q.azim_nodes[a]);
    s.mirror[0][a] = mirror_x(a, na);
    s.mirror[1][a] = mirror_y(a, na);
  }
  return s;
}

OrdinateSet polar_line_ordinates(const angle::AngularQuadrature& q) {
  OrdinateSet s;
  const int np = q.num_polar();
  s.velocity.assign(1, std::vector<double>(np));
  s.mirror.assign(1, std::vector<int>(np));
  s.weight = q.polar_weights;
  for (int p = 0; p < np; ++p) {
    const double mu = q.polar_nodes[p];
    s.velocity[0][p] = mu;
    s.mirror[0][p] = np - 1 - p;
    s.leakage_factor.push_back(std::sqrt(std::max(0.0, 1 - mu * mu)));
  }
  return s;
}

OrdinateSet hemisphere_ordinates(const angle::AngularQuadrature& hq) {
  require_product(hq, 4);
  OrdinateSet s;
  const int np = hq.num_polar(), na = hq.num_azim();
  s.velocity.assign(2, std::vector<double>(hq.size()));
  s.mirror.assign(2, std::vector<int>(hq.size()));
  s.weight = hq.weight;
  s.leakage_factor.resize(hq.size());
  for (int p = 0; p < np; ++p)
    for (int a = 0; a < na; ++a) {
      const int n = hq.index(p, a);
      const double st = std::sqrt(std::max(0.0, 1 - hq.mu[n] * hq.mu[n]));
      s.velocity[0][n] = st * std::cos(hq.omega[n]);
      s.velocity[1][n] = st * std::sin(hq.omega[n]);
      s.mirror[0][n] = hq.index(p, mirror_x(a, na));
      s.mirror[1][n] = hq.index(p, mirror_y(a, na));
      s.leakage_factor[n] = hq.mu[n];
    }
  return s;
}

OrdinateSet sign_ordinates() {
  OrdinateSet s;
  s.weight = {1.0, 1.0};
  s.velocity = {{-1.0, 1.0}};
  s.mirror = {{1, 0}};
  s.leakage_factor = {1.0, 1.0};
  return s;
}

namespace {

// 1D reference matrices on a cell of width h: mass, and the upwind
// streaming form for unit speed in the +/- direction.
double mass1(double h, int i, int j) { return h / 6 * (i == j ? 2 : 1); }
double stream1(int sign, int i, int j) {
  const double g = i == 0 ? -0.5 : 0.5;  // int phi_j phi_i'
  const int out = sign > 0 ? 1 : 0;
  return -sign * g + (i == out && j == out ? 1.0 : 0.0);
}

int bit(int nu, int a) { return (nu >> a) & 1; }

}  // namespace

struct TransportOperator::Impl {
  int D = 0, K = 0, C = 0, N = 0, G = 0, H = 0;
  std::array<int, 3> nc{1, 1, 1};
  std::array<int, 3> stride{1, 1, 1};
  std::vector<std::array<int, 3>> coord;
  std::vector<int> cls_of_cell;
  int num_classes = 0;
  std::vector<double> cls_mass;   // [cls] K*K
  std::vector<double> cls_perp;   // [cls][axis] (K/2)^2
  std::vector<double> loc_A;      // [(g*N + n)*NC + cls] K*K
  std::vector<double> loc_Ainv;
  std::array<std::array<std::vector<int>, 2>, 3> face;  // [axis][bit] -> local nodes
  std::vector<std::array<bool, 3>> lower;               // [n][axis]
  std::vector<double> kap;  // [((r*H + h)*G + g)*G + g']
  std::vector<std::vector<int>> cells_of_region;
  bool factorized = true;

  const double* mass(int cls) const { return &cls_mass[cls * K * K]; }
  const double* perp(int cls, int d) const {
    const int f = K / 2;
    return &cls_perp[(cls * 3 + d) * f * f];
  }
  int loc_index(int g, int n, int cls) const { return (g * N + n) * num_classes + cls; }
  double kappa(int r, int h, int g, int gp) const { return kap[((r * H + h) * G + g) * G + gp]; }
};

TransportOperator::~TransportOperator() = default;
TransportOperator::TransportOperator(TransportOperator&&) noexcept = default;
TransportOperator& TransportOperator::operator=(TransportOperator&&) noexcept = default;

TransportOperator::TransportOperator(PhaseSpace space, Coefficients coef, bool factorize)
    : space_(std::move(space)), coef_(std::move(coef)), impl_(std::make_unique<Impl>()) {
  Impl& m = *impl_;
  const auto& grid = space_.grid;
  const auto& ord = space_.ordinates;
  m.D = grid.dim();
  if (m.D < 1 || m.D > 3) throw ShapeError("grid dimension must be 1, 2 or 3");
  m.K = 1 << m.D;
  m.C = grid.num_cells();
  m.N = ord.size();
  m.G = space_.groups;
  if (static_cast<int>(ord.velocity.size()) != m.D || static_cast<int>(ord.mirror.size()) != m.D)
    throw ShapeError("ordinate velocities must match the grid dimension");
  if (static_cast<int>(ord.leakage_factor.size()) != m.N)
    throw ShapeError("leakage factor needed for every ordinate");
  if (static_cast<int>(space_.region_of_cell.size()) != m.C)
    throw ShapeError("region map must cover every cell");
  const int R = space_.num_regions();
  if (static_cast<int>(coef_.total.size()) < R) throw ShapeError("total cross section missing for a region");
  if (static_cast<int>(coef_.streaming.size()) != m.G || static_cast<int>(coef_.leakage.size()) != m.G)
    throw ShapeError("streaming and leakage coefficients needed per group");
  for (const auto& t : coef_.total)
    if (t.size() != m.G) throw ShapeError("total cross section needs one value per group");
  const auto& ker = coef_.kernel;
  m.H = ker.num_moments();
  if (m.H > 0) {
    if (ker.Y.cols() != m.N || ker.W.rows() != m.H || ker.W.cols() != m.N)
      throw ShapeError("scattering kernel does not match the ordinate set");
    if (static_cast<int>(ker.kappa.size()) != m.H) throw ShapeError("one kernel matrix set per moment");
  }
  m.kap.assign(static_cast<std::size_t>(R) * m.H * m.G * m.G, 0.0);
  for (int h = 0; h < m.H; ++h) {
    if (static_cast<int>(ker.kappa[h].size()) < R) throw ShapeError("kernel matrix missing for a region");
    for (int r = 0; r < R; ++r) {
      const auto& k = ker.kappa[h][r];
      if (k.rows() != m.G || k.cols() != m.G) throw ShapeError("kernel matrices must be G x G");
      for (int g = 0; g < m.G; ++g)
        for (int gp = 0; gp < m.G; ++gp) m.kap[((r * m.H + h) * m.G + g) * m.G + gp] = k(g, gp);
    }
  }
  m.cells_of_region.assign(R, {});
  for (int c = 0; c < m.C; ++c) m.cells_of_region[space_.region_of_cell[c]].push_back(c);

  for (int a = 0; a < m.D; ++a) m.nc[a] = grid.n(a);
  m.stride = {1, m.nc[0], m.nc[0] * m.nc[1]};
  m.coord.resize(m.C);
  for (int c = 0; c < m.C; ++c)
    m.coord[c] = {c % m.nc[0], (c / m.nc[0]) % m.nc[1], c / (m.nc[0] * m.nc[1])};

  for (int d = 0; d < 3; ++d)
    for (int b = 0; b < 2; ++b) {
      m.face[d][b].clear();
      if (d < m.D)
        for (int nu = 0; nu < m.K; ++nu)
          if (bit(nu, d) == b) m.face[d][b].push_back(nu);
    }

  // Cells sharing widths and region share local matrices.
  std::map<std::tuple<double, double, double, int>, int> classes;
  std::vector<std::array<double, 3>> cls_width;
  m.cls_of_cell.resize(m.C);
  for (int c = 0; c < m.C; ++c) {
    std::array<double, 3> w{1, 1, 1};
    for (int a = 0; a < m.D; ++a) w[a] = grid.widths[a][m.coord[c][a]];
    const auto key = std::make_tuple(w[0], w[1], w[2], space_.region_of_cell[c]);
    auto it = classes.find(key);
    if (it == classes.end()) {
      it = classes.emplace(key, static_cast<int>(cls_width.size())).first;
      cls_width.push_back(w);
    }
    m.cls_of_cell[c] = it->second;
  }
  m.num_classes = static_cast<int>(cls_width.size());
  std::vector<int> cls_region(m.num_classes);
  for (const auto& [key, id] : classes) cls_region[id] = std::get<3>(key);

  const int K = m.K, F = K / 2;
  m.cls_mass.assign(static_cast<std::size_t>(m.num_classes) * K * K, 0.0);
  m.cls_perp.assign(static_cast<std::size_t>(m.num_classes) * 3 * F * F, 0.0);
  for (int cls = 0; cls < m.num_classes; ++cls) {
    const auto& w = cls_width[cls];
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) {
        double v = 1;
        for (int a = 0; a < m.D; ++a) v *= mass1(w[a], bit(i, a), bit(j, a));
        m.cls_mass[(cls * K + i) * K + j] = v;
      }
    for (int d = 0; d < m.D; ++d)
      for (int t = 0; t < F; ++t)
        for (int u = 0; u < F; ++u) {
          const int i = m.face[d][0][t], j = m.face[d][0][u];
          double v = 1;
          for (int a = 0; a < m.D; ++a)
            if (a != d) v *= mass1(w[a], bit(i, a), bit(j, a));
          m.cls_perp[((cls * 3 + d) * F + t) * F + u] = v;
        }
  }

  const std::size_t nloc = static_cast<std::size_t>(m.G) * m.N * m.num_classes;
  m.loc_A.assign(nloc * K * K, 0.0);
  if (factorize) m.loc_Ainv.assign(nloc * K * K, 0.0);
  m.factorized = factorize;
  for (int g = 0; g < m.G; ++g)
    for (int n = 0; n < m.N; ++n)
      for (int cls = 0; cls < m.num_classes; ++cls) {
        const auto& w = cls_width[cls];
        const double sigma = coef_.total[cls_region[cls]][g] + coef_.leakage[g] * ord.leakage_factor[n];
        Eigen::MatrixXd A(K, K);
        for (int i = 0; i < K; ++i)
          for (int j = 0; j < K; ++j) {
            double v = sigma * m.cls_mass[(cls * K + i) * K + j];
            for (int d = 0; d < m.D; ++d) {
              const double vel = ord.velocity[d][n];
              if (vel == 0) continue;
              double t = std::abs(vel) * stream1(vel > 0 ? 1 : -1, bit(i, d), bit(j, d));
              for (int a = 0; a < m.D; ++a)
                if (a != d) t *= mass1(w[a], bit(i, a), bit(j, a));
              v += coef_.streaming[g] * t;
            }
            A(i, j) = v;
          }
        const std::size_t off = m.loc_index(g, n, cls) * static_cast<std::size_t>(K * K);
        for (int i = 0; i < K; ++i)
          for (int j = 0; j < K; ++j) m.loc_A[off + i * K + j] = A(i, j);
        if (!factorize) continue;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        if (!lu.isInvertible()) throw SingularError("singular local transport matrix");
        const Eigen::MatrixXd Ai = lu.inverse();
        for (int i = 0; i < K; ++i)
          for (int j = 0; j < K; ++j) m.loc_Ainv[off + i * K + j] = Ai(i, j);
      }

  // Sweep order: ordinates with fewer reflective inflow faces first, so that
  // mirrors on one-sided reflective problems are always available.
  std::vector<int> count(m.N, 0);
  for (int n = 0; n < m.N; ++n)
    for (int d = 0; d < m.D; ++d) {
      const double v = ord.velocity[d][n];
      if (v == 0) continue;
      if (space_.reflective[d][v > 0 ? 0 : 1]) ++count[n];
    }
  order_.resize(m.N);
  for (int n = 0; n < m.N; ++n) order_[n] = n;
  std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return count[a] < count[b]; });
  std::vector<int> pos(m.N);
  for (int i = 0; i < m.N; ++i) pos[order_[i]] = i;
  m.lower.assign(m.N, {false, false, false});
  for (int n = 0; n < m.N; ++n)
    for (int d = 0; d < m.D; ++d) {
      const int mir = ord.mirror[d][n];
      if (mir < 0 || mir >= m.N) throw ShapeError("mirror ordinate out of range");
      m.lower[n][d] = pos[mir] < pos[n];
    }
}

namespace {

// Inflow of one cell along one axis for ordinate n. Returns the source
// pointer (values at upwind face nodes, laid out as a full cell block) and
// the face bit the test functions receive it on; nullptr when nothing flows in.
struct Inflow {
  const double* cell = nullptr;  // K values of the upwind cell (or mirror)
  int src_bit = 0;               // face bit of the source nodes
  int dst_bit = 0;               // face bit of the receiving nodes
};

}  // namespace

template <int D>
struct Kernels {
  static constexpr int K = 1 << D;
  static constexpr int F = K / 2;
  using Mat = Eigen::Matrix<double, K, K, Eigen::RowMajor>;
  using FMat = Eigen::Matrix<double, F, F, Eigen::RowMajor>;
  using CVec = Eigen::Matrix<double, K, 1>;
  using FVec = Eigen::Matrix<double, F, 1>;

  // which: 0 interior + lower reflective (T), 1 upper reflective only (K part)
  static void gather_inflow(const TransportOperator::Impl& m, const PhaseSpace& sp, int n, int c,
                            int which, const double* field_g, int d, Inflow& in) {
    in.cell = nullptr;
    const double v = sp.ordinates.velocity[d][n];
    if (v == 0) return;
    const int fin = v > 0 ? 0 : 1;
    const int cd = m.coord[c][d];
    const bool interior = v > 0 ? cd > 0 : cd < m.nc[d] - 1;
    in.dst_bit = fin;
    if (interior) {
      if (which != 0) return;
      const int nb = c + (v > 0 ? -m.stride[d] : m.stride[d]);
      in.cell = field_g + (static_cast<std::size_t>(n) * m.C + nb) * K;
      in.src_bit = 1 - fin;
      return;
    }
    if (!sp.reflective[d][fin]) return;
    if ((which == 0) != m.lower[n][d]) return;
    const int mir = sp.ordinates.mirror[d][n];
    in.cell = field_g + (static_cast<std::size_t>(mir) * m.C + c) * K;
    in.src_bit = fin;
  }

  static void add_inflow(const TransportOperator::Impl& m, int cls, int d, double scale,
                         const Inflow& in, CVec& rhs) {
    FVec src;
    for (int t = 0; t < F; ++t) src[t] = in.cell[m.face[d][in.src_bit][t]];
    const FVec add = scale * (Eigen::Map<const FMat>(m.perp(cls, d)) * src);
    for (int t = 0; t < F; ++t) rhs[m.face[d][in.dst_bit][t]] += add[t];
  }

  static void sweep(const TransportOperator::Impl& m, const PhaseSpace& sp, const Coefficients& co,
                    const std::vector<int>& order, int g, const double* b, double* x) {
    const double cg = co.streaming[g];
    for (int n : order) {
      std::array<bool, 3> fwd{true, true, true};
      for (int d = 0; d < D; ++d) fwd[d] = sp.ordinates.velocity[d][n] >= 0;
      for (int i2 = 0; i2 < m.nc[2]; ++i2) {
        const int c2 = fwd[2] ? i2 : m.nc[2] - 1 - i2;
        for (int i1 = 0; i1 < m.nc[1]; ++i1) {
          const int c1 = fwd[1] ? i1 : m.nc[1] - 1 - i1;
          for (int i0 = 0; i0 < m.nc[0]; ++i0) {
            const int c0 = fwd[0] ? i0 : m.nc[0] - 1 - i0;
            const int c = c0 + m.stride[1] * c1 + m.stride[2] * c2;
            const std::size_t off = (static_cast<std::size_t>(n) * m.C + c) * K;
            const int cls = m.cls_of_cell[c];
            CVec rhs = Eigen::Map<const CVec>(b + off);
            for (int d = 0; d < D; ++d) {
              Inflow in;
              gather_inflow(m, sp, n, c, 0, x, d, in);
              if (in.cell) add_inflow(m, cls, d, cg * std::abs(sp.ordinates.velocity[d][n]), in, rhs);
            }
            const Eigen::Map<const Mat> Ai(&m.loc_Ainv[m.loc_index(g, n, cls) * std::size_t(K * K)]);
            Eigen::Map<CVec>(x + off) = Ai * rhs;
          }
        }
      }
    }
  }

  static void apply_T(const TransportOperator::Impl& m, const PhaseSpace& sp, const Coefficients& co,
                      int g, const double* psi, double* out) {
    const double cg = co.streaming[g];
    for (int n = 0; n < m.N; ++n)
      for (int c = 0; c < m.C; ++c) {
        const std::size_t off = (static_cast<std::size_t>(n) * m.C + c) * K;
        const int cls = m.cls_of_cell[c];
        const Eigen::Map<const Mat> A(&m.loc_A[m.loc_index(g, n, cls) * std::size_t(K * K)]);
        CVec inflow = CVec::Zero();
        for (int d = 0; d < D; ++d) {
          Inflow in;
          gather_inflow(m, sp, n, c, 0, psi, d, in);
          if (in.cell) add_inflow(m, cls, d, cg * std::abs(sp.ordinates.velocity[d][n]), in, inflow);
        }
        Eigen::Map<CVec>(out + off) = A * Eigen::Map<const CVec>(psi + off) - inflow;
      }
  }

  static void add_upper_reflection(const TransportOperator::Impl& m, const PhaseSpace& sp,
                                   const Coefficients& co, int g, const double* psi, double* out) {
    const double cg = co.streaming[g];
    for (int n = 0; n < m.N; ++n)
      for (int d = 0; d < D; ++d) {
        const double v = sp.ordinates.velocity[d][n];
        if (v == 0) continue;
        const int fin = v > 0 ? 0 : 1;
        if (!sp.reflective[d][fin] || m.lower[n][d]) continue;
        // cells on the inflow boundary face
        const int edge = fin == 0 ? 0 : m.nc[d] - 1;
        for (int c = 0; c < m.C; ++c) {
          if (m.coord[c][d] != edge) continue;
          Inflow in;
          gather_inflow(m, sp, n, c, 1, psi, d, in);
          if (!in.cell) continue;
          CVec acc = CVec::Zero();
          add_inflow(m, m.cls_of_cell[c], d, cg * std::abs(v), in, acc);
          Eigen::Map<CVec>(out + (static_cast<std::size_t>(n) * m.C + c) * K) += acc;
        }
      }
  }

  static void apply_mass(const TransportOperator::Impl& m, const double* in, double* out, int blocks) {
    for (int bI = 0; bI < blocks; ++bI)
      for (int c = 0; c < m.C; ++c) {
        const std::size_t off = (static_cast<std::size_t>(bI) * m.C + c) * K;
        const Eigen::Map<const Mat> M(m.mass(m.cls_of_cell[c]));
        Eigen::Map<CVec>(out + off) += M * Eigen::Map<const CVec>(in + off);
      }
  }
};

namespace {

template <class F>
void dispatch(int dim, F&& f) {
  switch (dim) {
    case 1: f(std::integral_constant<int, 1>{}); break;
    case 2: f(std::integral_constant<int, 2>{}); break;
    default: f(std::integral_constant<int, 3>{}); break;
  }
}

void check_size(const Vec& v, int n, const char* what) {
  if (v.size() != n) throw ShapeError(std::string(what) + ": vector size does not match the phase space");
}

}  // namespace

void TransportOperator::sweep_group(int g, const double* b, double* x) const {
  if (!impl_->factorized) throw StructureError("sweep on an operator built without factorization");
  dispatch(impl_->D, [&](auto D) { Kernels<D()>::sweep(*impl_, space_, coef_, order_, g, b, x); });
}

Vec TransportOperator::sweep(const Vec& b) const {
  check_size(b, size(), "sweep");
  Vec x = Vec::Zero(size());
  for (int g = 0; g < groups(); ++g)
    sweep_group(g, b.data() + std::size_t(g) * group_size(), x.data() + std::size_t(g) * group_size());
  return x;
}

Vec TransportOperator::apply_T(const Vec& psi) const {
  check_size(psi, size(), "apply");
  Vec out(size());
  for (int g = 0; g < groups(); ++g)
    dispatch(impl_->D, [&](auto D) {
      Kernels<D()>::apply_T(*impl_, space_, coef_, g, psi.data() + std::size_t(g) * group_size(),
                            out.data() + std::size_t(g) * group_size());
    });
  return out;
}

void TransportOperator::add_K_group(int g, const Vec& psi, int from_lo, int from_hi, double* out) const {
  check_size(psi, size(), "apply");
  const Impl& m = *impl_;
  const std::size_t gs = group_size();
  from_lo = std::max(from_lo, 0);
  from_hi = std::min(from_hi, m.G);
  if (g >= from_lo && g < from_hi)
    dispatch(m.D, [&](auto D) {
      Kernels<D()>::add_upper_reflection(m, space_, coef_, g, psi.data() + g * gs, out);
    });
  if (m.H == 0 || from_lo >= from_hi) return;
  const int CK = m.C * m.K;
  const auto& ker = coef_.kernel;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(CK, m.H);
  bool any = false;
  for (int gp = from_lo; gp < from_hi; ++gp) {
    bool coupled = false;
    for (int r = 0; r < static_cast<int>(m.cells_of_region.size()) && !coupled; ++r)
      for (int h = 0; h < m.H && !coupled; ++h) coupled = m.kappa(r, h, g, gp) != 0;
    if (!coupled) continue;
    any = true;
    const Eigen::Map<const Eigen::MatrixXd> P(psi.data() + gp * gs, CK, m.N);
    const Eigen::MatrixXd phi = P * ker.W.transpose();  // CK x H
    for (int r = 0; r < static_cast<int>(m.cells_of_region.size()); ++r)
      for (int h = 0; h < m.H; ++h) {
        const double k = m.kappa(r, h, g, gp);
        if (k == 0) continue;
        for (int c : m.cells_of_region[r]) Q.block(c * m.K, h, m.K, 1) += k * phi.block(c * m.K, h, m.K, 1);
      }
  }
  if (!any) return;
  const Eigen::MatrixXd nodal = Q * ker.Y;  // CK x N
  dispatch(m.D, [&](auto D) { Kernels<D()>::apply_mass(m, nodal.data(), out, m.N); });
}

Vec TransportOperator::apply_K(const Vec& psi) const {
  check_size(psi, size(), "apply");
  Vec out = Vec::Zero(size());
  for (int g = 0; g < groups(); ++g) add_K_group(g, psi, 0, groups(), out.data() + std::size_t(g) * group_size());
  return out;
}

Vec TransportOperator::apply(const Vec& psi) const { return apply_T(psi) - apply_K(psi); }

Vec TransportOperator::mass(const Vec& field) const {
  check_size(field, size(), "mass");
  Vec out = Vec::Zero(size());
  dispatch(impl_->D, [&](auto D) {
    Kernels<D()>::apply_mass(*impl_, field.data(), out.data(), groups() * space_.ordinates.size());
  });
  return out;
}

Vec TransportOperator::scalar_flux(const Vec& psi) const {
  check_size(psi, size(), "scalar_flux");
  const int CK = impl_->C * impl_->K;
  const Eigen::Map<const Eigen::VectorXd> w(space_.ordinates.weight.data(), impl_->N);
  Vec phi(static_cast<Eigen::Index>(groups()) * CK);
  for (int g = 0; g < groups(); ++g)
    phi.segment(std::size_t(g) * CK, CK) =
        Eigen::Map<const Eigen::MatrixXd>(psi.data() + std::size_t(g) * group_size(), CK, impl_->N) * w;
  return phi;
}

Vec isotropic_source(const PhaseSpace& space, const std::vector<double>& q_per_group,
                     const std::vector<bool>& region_mask) {
  if (static_cast<int>(q_per_group.size()) != space.groups) throw ShapeError("source needs one value per group");
  double wsum = 0;
  for (double w : space.ordinates.weight) wsum += w;
  Vec q = Vec::Zero(space.size());
  const int N = space.ordinates.size(), C = space.grid.num_cells(), K = space.grid.nodes_per_cell();
  for (int g = 0; g < space.groups; ++g)
    for (int n = 0; n < N; ++n)
      for (int c = 0; c < C; ++c) {
        const int r = space.region_of_cell[c];
        if (r >= static_cast<int>(region_mask.size()) || !region_mask[r]) continue;
        for (int nu = 0; nu < K; ++nu) q[space.index(g, n, c, nu)] = q_per_group[g] / wsum;
      }
  return q;
}

}  // namespace axpgd::numerics

namespace axpgd::numerics {

Eigen::MatrixXd cell_mass(const CartesianGrid& grid, int c) {
  const int D = grid.dim(), K = grid.nodes_per_cell();
  std::array<double, 3> w{1, 1, 1};
  int rest = c;
  for (int a = 0; a < D; ++a) {
    w[a] = grid.widths[a][rest % grid.n(a)];
    rest /= grid.n(a);
  }
  Eigen::MatrixXd M(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) {
      double v = 1;
      for (int a = 0; a < D; ++a) v *= mass1(w[a], bit(i, a), bit(j, a));
      M(i, j) = v;
    }
  return M;
}

double mass_inner(const CartesianGrid& grid, const double* a, const double* b) {
  const int D = grid.dim(), K = grid.nodes_per_cell(), C = grid.num_cells();
  double s = 0;
  for (int c = 0; c < C; ++c) {
    std::array<double, 3> w{1, 1, 1};
    int rest = c;
    for (int ax = 0; ax < D; ++ax) {
      w[ax] = grid.widths[ax][rest % grid.n(ax)];
      rest /= grid.n(ax);
    }
    const double* ac = a + static_cast<std::size_t>(c) * K;
    const double* bc = b + static_cast<std::size_t>(c) * K;
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) {
        double v = 1;
        for (int ax = 0; ax < D; ++ax) v *= mass1(w[ax], bit(i, ax), bit(j, ax));
        s += ac[i] * v * bc[j];
      }
  }
  return s;
}

}  // namespace axpgd::numerics
