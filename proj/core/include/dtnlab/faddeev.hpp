#pragma once

#include <string>

#include "dtnlab/potential.hpp"

namespace dtnlab {

// Complex frequency k = re + i*im on the zero variety k^2 = 0, i.e.
// |re| = |im| and re.im = 0.
struct ComplexFrequency {
  Vec re{0, 0, 0};
  Vec im{0, 0, 0};

  double rho() const { return norm2(im); }
  CVec components() const {
    return {cplx(re[0], im[0]), cplx(re[1], im[1]), cplx(re[2], im[2])};
  }
  ComplexFrequency negated() const {
    return ComplexFrequency{Vec{-re[0], -re[1], -re[2]},
                            Vec{-im[0], -im[1], -im[2]}};
  }
  // Construction with the variety constraint enforced to 1e-12 relative.
  static ComplexFrequency on_variety(const Vec& re, const Vec& im);
};

// Frequency pair (k, l) with shared imaginary part, so p = k - l is real by
// construction.
struct ThetaPair {
  Vec k_re{0, 0, 0};
  Vec l_re{0, 0, 0};
  Vec im{0, 0, 0};

  ComplexFrequency k() const { return ComplexFrequency::on_variety(k_re, im); }
  ComplexFrequency l() const { return ComplexFrequency::on_variety(l_re, im); }
  Vec p() const { return k_re - l_re; }
  double rho() const { return norm2(im); }
};

// Unit vector orthogonal to p, even under p -> -p (evenness makes conjugate
// symmetries of the amplitude exact; any piecewise-continuous choice works).
Vec gamma_direction(const Vec& p, int dim);

// k = p/2 + i(|p|/2) gamma,  l = -p/2 + i(|p|/2) gamma. p = 0 degenerates to
// k = l = 0.
ThetaPair born_pair(const Vec& p, int dim);

// d=3 pair with |Im k| = rho >= |p|/2:
//   Im k = Im l = rho*eta1, Re k = p/2 + t*eta2, Re l = -p/2 + t*eta2,
//   t = sqrt(rho^2 - |p|^2/4), eta1, eta2 unit, orthogonal to p and each
//   other. In two dimensions the variety pins rho = |p|/2 (born_pair).
ThetaPair theta_pair_3d(const Vec& p, double rho, const Vec& eta1, const Vec& eta2);
ThetaPair theta_pair_3d(const Vec& p, double rho);  // deterministic frame

// Faddeev Green function g(.,k) sampled on the half-step difference lattice
// x = j*(h/2), |j| <= ext per axis. Synthesized from the lattice-consistent
// symbol on an offset frequency lattice of M points per axis (band edge
// pi/h), so that the twisted discrete Laplacian applied to the table
// reproduces the discrete delta exactly up to rounding.
struct GreenTable {
  ComplexFrequency k;
  const Domain* dom = nullptr;
  int M = 0;
  double offset = 0.5;
  double xi_max = 0.0;
  double min_symbol = 0.0;   // smallest |symbol| met on the lattice
  cplx sigma_k;              // discrete symbol of the plane wave exp(ikx)
  int ext = 0;
  std::vector<cplx> table;   // (2 ext + 1)^d values, index j + ext per axis
  std::vector<cplx> coeff;   // M^d symbol coefficients (FFT layout), reused
                             // by the convolution operator

  cplx at(int j0, int j1, int j2) const;
  // g(x - y) for two points on the half-step lattice of the domain.
  cplx between(const Vec& x, const Vec& y) const;
};

// pad_factor scales the synthesis box (box = pad * side rounded to a power
// of two in lattice units); pad_factor <= 0 picks a default per dimension.
GreenTable faddeev_green(const ComplexFrequency& k, const Domain& dom,
                         int pad_factor = 0);

// Largest |twisted_lap_h g - delta| over off-origin stencil points of the
// coarse (step h) sublattice.
double green_delta_residual(const GreenTable& g);

// w -> w - g*(v w) with the convolution evaluated by FFT on the synthesis
// lattice; shared by the direct field solver and the background kernel
// equation.
class LippmannOperator {
 public:
  LippmannOperator(const Potential& v, const GreenTable& g);

  // h^d sum_y g(x-y) w(y) over interior cells, all interior outputs.
  std::vector<cplx> convolve(const std::vector<cplx>& w) const;
  std::vector<cplx> apply(const std::vector<cplx>& x) const;

  struct Solution {
    std::vector<cplx> x;
    int iterations = 0;
    double residual = 0.0;
    std::string method;
  };
  // Solve (I - g*(v .)) x = rhs to the given max-norm residual; Neumann
  // iteration while it contracts, Bi-CGSTAB otherwise.
  Solution solve(const std::vector<cplx>& rhs, double tol) const;

  const Potential& potential() const { return *v_; }
  const GreenTable& green() const { return *g_; }

 private:
  const Potential* v_;
  const GreenTable* g_;
  std::vector<cplx> coeff_;  // M^d symbol coefficients, FFT layout
  std::vector<cplx> twist_;  // per-axis offset phases e^{i 2 pi c j / M}
};

struct FaddeevField {
  ComplexFrequency k;
  const Domain* dom = nullptr;
  std::vector<cplx> mu;  // on interior cells; psi = exp(ikx) mu
  int iterations = 0;
  double residual = 0.0;      // integral-equation residual, max norm
  double pde_residual = 0.0;  // discrete-equation residual on supp v, scaled by h^2/max|mu|
  std::string method;

  double sup_mu_minus_one() const;
};

FaddeevField lippmann_schwinger(const Potential& v, const ComplexFrequency& k,
                                const GreenTable& g, double target_residual = 1e-12);

// mu evaluated at the boundary face midpoints through the integral formula.
std::vector<cplx> mu_on_boundary(const FaddeevField& field, const Potential& v,
                                 const GreenTable& g);

struct ScatteringSample {
  ThetaPair pair;
  cplx h;
};

// h(k,l) = (2 pi)^-d int exp(-ilx) v psi(x,k) dx; pair.k must match the
// field's frequency.
ScatteringSample amplitude_h(const Potential& v, const FaddeevField& field,
                             const ThetaPair& pair);

struct DecayRow {
  double rho = 0.0;
  double sup_mu_minus_one = 0.0;
  double h_gap = 0.0;  // |h - vhat(p)|
  cplx h;
  cplx vhat;
};

// Sweep |Im k| over rho_list at fixed p and tabulate high-energy decay.
std::vector<DecayRow> asymptotic_diagnostic(const Potential& v, const Vec& p,
                                            const std::vector<double>& rho_list,
                                            int pad_factor = 0);

// Smallest |Im k| in the ascending list at which the field stays bounded by
// c in the sup norm; solver divergence at a size counts as unbounded. The
// value is an empirical threshold report, not a claimed constant. Returns a
// quiet NaN when no listed size qualifies. In two dimensions the real
// frequency is rescaled to 2*rho along p (variety rigidity); in three
// dimensions p is kept and the pair tilts out of the plane.
double bounded_field_threshold(const Potential& v, const Vec& p,
                               const std::vector<double>& rho_list, double c = 1.5,
                               int pad_factor = 0);

}  // namespace dtnlab
