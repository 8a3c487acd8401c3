#pragma once

#include <vector>

namespace axpgd::angle {

enum class AngularDomain {
  Sphere,           // S2, measure 4 pi
  UpperHemisphere,  // S2+, measure 2 pi
  Circle,           // S1, measure 2 pi
  PolarSign,        // S0 = {-1, +1}, weights {1, 1}
  PolarLine,        // polar cosine on [-1, 1], measure 2
};

double domain_measure(AngularDomain d);

// Ordinates (mu, omega) and weights. Product quadratures store ordinate
// n = p * num_azim + a over polar node p and azimuthal node a; for PolarSign
// the "polar nodes" are alpha = -1, +1 and for Circle there is a single
// polar node at mu = 0.
struct AngularQuadrature {
  AngularDomain domain = AngularDomain::Sphere;
  bool product = true;
  std::vector<double> mu;
  std::vector<double> omega;
  std::vector<double> weight;
  std::vector<double> polar_nodes;
  std::vector<double> polar_weights;
  std::vector<double> azim_nodes;
  std::vector<double> azim_weights;

  int size() const { return static_cast<int>(weight.size()); }
  int num_polar() const { return static_cast<int>(polar_nodes.size()); }
  int num_azim() const { return static_cast<int>(azim_nodes.size()); }
  int index(int p, int a) const { return p * num_azim() + a; }
  double weight_sum() const;
};

struct GaussRule {
  std::vector<double> nodes;  // ascending on [-1, 1]
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

// Product (double) Gauss-Legendre x Chebyshev quadrature on S2 with the given number
// of polar and azimuthal angles per octant.
AngularQuadrature build_product_quadrature(int n_polar_per_octant, int n_azim_per_octant);

struct Hemisphere {
  AngularQuadrature quadrature;  // over S2+; polar node ph has mu > 0
  std::vector<int> upper;        // hemisphere ordinate -> sphere index of (mu, omega)
  std::vector<int> lower;        // hemisphere ordinate -> sphere index of (-mu, omega)
};

Hemisphere restrict_to_hemisphere(const AngularQuadrature& q);

// Sphere index of (-mu, omega) for every ordinate of a product quadrature.
std::vector<int> polar_mirror(const AngularQuadrature& q);

AngularQuadrature circle_of(const AngularQuadrature& q);
AngularQuadrature polar_line_of(const AngularQuadrature& q);
AngularQuadrature polar_sign_set();

struct HarmonicIndex {
  int l = 0;
  int k = 0;
  int parity() const { return ((l + k) % 2 + 2) % 2; }
};

// All (l, k) with l <= max_degree, ordered by l then k = -l..l.
std::vector<HarmonicIndex> harmonic_indices(int max_degree);

// Associated Legendre function of degree l, order m >= 0, scaled by
// sqrt((l-m)!/(l+m)!) and without the Condon-Shortley phase.
double assoc_legendre(int l, int m, double mu);

// sqrt(2) sin(-k w) for k < 0, 1 for k = 0, sqrt(2) cos(k w) for k > 0.
double azimuthal(int k, double omega);

double eval_harmonic(HarmonicIndex idx, double mu, double omega);

}  // namespace axpgd::angle
