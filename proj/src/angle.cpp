#include "axpgd/angle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "axpgd/errors.hpp"

namespace axpgd::angle {

using std::numbers::pi;

double domain_measure(AngularDomain d) {
  switch (d) {
    case AngularDomain::Sphere: return 4 * pi;
    case AngularDomain::UpperHemisphere: return 2 * pi;
    case AngularDomain::Circle: return 2 * pi;
    case AngularDomain::PolarSign: return 2;
    case AngularDomain::PolarLine: return 2;
  }
  return 0;
}

double AngularQuadrature::weight_sum() const {
  return std::accumulate(weight.begin(), weight.end(), 0.0);
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw ArgumentError("gauss_legendre: n must be >= 1");
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
    }
    const double w = 2 / ((1 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0;
  return r;
}

AngularQuadrature build_product_quadrature(int n_polar_per_octant, int n_azim_per_octant) {
  if (n_polar_per_octant < 1 || n_azim_per_octant < 1)
    throw ArgumentError("product quadrature needs at least one polar and azimuthal angle per octant");
  AngularQuadrature q;
  q.domain = AngularDomain::Sphere;
  // Gauss-Legendre on each half range [-1, 0] and [0, 1], so integrals over
  // either hemisphere are exact as well.
  const GaussRule gl = gauss_legendre(n_polar_per_octant);
  const int half = n_polar_per_octant;
  q.polar_nodes.resize(2 * half);
  q.polar_weights.resize(2 * half);
  for (int i = 0; i < half; ++i) {
    const double x = 0.5 * (1 + gl.nodes[i]);
    const double w = 0.5 * gl.weights[i];
    q.polar_nodes[half + i] = x;
    q.polar_weights[half + i] = w;
    q.polar_nodes[half - 1 - i] = -x;
    q.polar_weights[half - 1 - i] = w;
  }
  const int na = 4 * n_azim_per_octant;
  for (int a = 0; a < na; ++a) {
    q.azim_nodes.push_back((a + 0.5) * 2 * pi / na);
    q.azim_weights.push_back(2 * pi / na);
  }
  for (int p = 0; p < q.num_polar(); ++p)
    for (int a = 0; a < na; ++a) {
      q.mu.push_back(q.polar_nodes[p]);
      q.omega.push_back(q.azim_nodes[a]);
      q.weight.push_back(q.polar_weights[p] * q.azim_weights[a]);
    }
  return q;
}

Hemisphere restrict_to_hemisphere(const AngularQuadrature& q) {
  if (!q.product || q.domain != AngularDomain::Sphere)
    throw StructureError("hemisphere restriction needs a product quadrature over S2");
  const int np = q.num_polar();
  if (np % 2 != 0) throw StructureError("polar rule must be symmetric with an even node count");
  for (int p = 0; p < np; ++p)
    if (std::abs(q.polar_nodes[p] + q.polar_nodes[np - 1 - p]) > 1e-14)
      throw StructureError("polar rule is not symmetric about mu = 0");
  Hemisphere h;
  AngularQuadrature& hq = h.quadrature;
  hq.domain = AngularDomain::UpperHemisphere;
  hq.azim_nodes = q.azim_nodes;
  hq.azim_weights = q.azim_weights;
  for (int p = np / 2; p < np; ++p) {
    hq.polar_nodes.push_back(q.polar_nodes[p]);
    hq.polar_weights.push_back(q.polar_weights[p]);
  }
  for (int ph = 0; ph < hq.num_polar(); ++ph)
    for (int a = 0; a < hq.num_azim(); ++a) {
      const int up = q.index(np / 2 + ph, a);
      const int down = q.index(np / 2 - 1 - ph, a);
      hq.mu.push_back(q.mu[up]);
      hq.omega.push_back(q.omega[up]);
      hq.weight.push_back(q.weight[up]);
      h.upper.push_back(up);
      h.lower.push_back(down);
    }
  return h;
}

std::vector<int> polar_mirror(const AngularQuadrature& q) {
  if (!q.product) throw StructureError("polar mirror needs a product quadrature");
  std::vector<int> m(q.size());
  const int np = q.num_polar();
  for (int p = 0; p < np; ++p)
    for (int a = 0; a < q.num_azim(); ++a) m[q.index(p, a)] = q.index(np - 1 - p, a);
  return m;
}

AngularQuadrature circle_of(const AngularQuadrature& q) {
  AngularQuadrature c;
  c.domain = AngularDomain::Circle;
  c.polar_nodes = {0.0};
  c.polar_weights = {1.0};
  c.azim_nodes = q.azim_nodes;
  c.azim_weights = q.azim_weights;
  for (int a = 0; a < c.num_azim(); ++a) {
    c.mu.push_back(0.0);
    c.omega.push_back(c.azim_nodes[a]);
    c.weight.push_back(c.azim_weights[a]);
  }
  return c;
}

AngularQuadrature polar_line_of(const AngularQuadrature& q) {
  AngularQuadrature l;
  l.domain = AngularDomain::PolarLine;
  l.polar_nodes = q.polar_nodes;
  l.polar_weights = q.polar_weights;
  l.azim_nodes = {0.0};
  l.azim_weights = {1.0};
  for (int p = 0; p < l.num_polar(); ++p) {
    l.mu.push_back(l.polar_nodes[p]);
    l.omega.push_back(0.0);
    l.weight.push_back(l.polar_weights[p]);
  }
  return l;
}

AngularQuadrature polar_sign_set() {
  AngularQuadrature s;
  s.domain = AngularDomain::PolarSign;
  s.polar_nodes = {-1.0, 1.0};
  s.polar_weights = {1.0, 1.0};
  s.azim_nodes = {0.0};
  s.azim_weights = {1.0};
  s.mu = {-1.0, 1.0};
  s.omega = {0.0, 0.0};
  s.weight = {1.0, 1.0};
  return s;
}

std::vector<HarmonicIndex> harmonic_indices(int max_degree) {
  std::vector<HarmonicIndex> out;
  for (int l = 0; l <= max_degree; ++l)
    for (int k = -l; k <= l; ++k) out.push_back({l, k});
  return out;
}

double assoc_legendre(int l, int m, double mu) {
  if (m < 0 || m > l) return 0.0;
  const double s = std::sqrt(std::max(0.0, 1 - mu * mu));
  // P_m^m = (2m-1)!! s^m, no phase
  double pmm = 1;
  for (int i = 1; i <= m; ++i) pmm *= (2 * i - 1) * s;
  double value = pmm;
  if (l > m) {
    double p_prev = pmm;
    double p_cur = mu * (2 * m + 1) * pmm;
    for (int ll = m + 2; ll <= l; ++ll) {
      const double p_next = ((2 * ll - 1) * mu * p_cur - (ll + m - 1) * p_prev) / (ll - m);
      p_prev = p_cur;
      p_cur = p_next;
    }
    value = p_cur;
  }
  double ratio = 1;  // (l-m)!/(l+m)!
  for (int i = l - m + 1; i <= l + m; ++i) ratio /= i;
  return value * std::sqrt(ratio);
}

double azimuthal(int k, double omega) {
  if (k < 0) return std::sqrt(2.0) * std::sin(-k * omega);
  if (k == 0) return 1.0;
  return std::sqrt(2.0) * std::cos(k * omega);
}

double eval_harmonic(HarmonicIndex idx, double mu, double omega) {
  return assoc_legendre(idx.l, std::abs(idx.k), mu) * azimuthal(idx.k, omega);
}

}  // namespace axpgd::angle
